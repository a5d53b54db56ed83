#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmcp {

/// Raised when a HabitatSpec cannot describe a consistent periodic chessboard.
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Periodic chessboard: a d-dimensional torus of side `extent`, tiled by
/// alternating host-1/host-2 blocks of side 2L, with sup-norm dispersal
/// radius R.
struct HabitatSpec {
  int d = 2;
  int L = 1;
  int R = 1;
  int extent = 4;

  bool operator==(const HabitatSpec&) const = default;
};

/// A lattice point, coordinates reduced into [0, extent).
struct Site {
  std::vector<int> coords;

  auto operator<=>(const Site&) const = default;
};

using SiteIndex = std::int32_t;

/// Throws GeometryError naming the first violated constraint:
/// every field >= 1, extent a multiple of 4L, 2R + 1 <= extent.
void validate_geometry(const HabitatSpec& spec);

/// Host type (1 or 2) of a site. Tiles are half-open: the tile coordinate
/// along axis i is floor((x_i + L) / (2L)), and the host is 1 when the tile
/// coordinates sum to an even number.
int host_type(const Site& x, const HabitatSpec& spec);

/// All sites z with 0 < |x - z|_inf <= R on the torus, in row-major offset
/// order (first axis slowest, offsets ascending from -R to R). Always
/// (2R+1)^d - 1 entries.
std::vector<Site> neighborhood(const Site& x, const HabitatSpec& spec);

/// (2R+1)^d - 1.
int neighborhood_size(const HabitatSpec& spec);

/// Precomputed geometry for a validated spec: row-major site indexing,
/// host types and the canonical neighbor table. Immutable once built.
class Lattice {
 public:
  explicit Lattice(const HabitatSpec& spec);

  const HabitatSpec& spec() const { return spec_; }
  SiteIndex size() const { return size_; }
  int neighborhood_size() const { return nu_; }

  int host(SiteIndex i) const { return host_[static_cast<std::size_t>(i)]; }
  SiteIndex neighbor(SiteIndex i, int k) const {
    return neighbors_[static_cast<std::size_t>(i) * static_cast<std::size_t>(nu_) +
                      static_cast<std::size_t>(k)];
  }
  std::span<const SiteIndex> neighbors(SiteIndex i) const {
    return {neighbors_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(nu_),
            static_cast<std::size_t>(nu_)};
  }

  Site site(SiteIndex i) const;
  SiteIndex index(const Site& x) const;

  /// Sup-norm distance on the torus.
  int distance(SiteIndex a, SiteIndex b) const;

 private:
  HabitatSpec spec_;
  SiteIndex size_ = 0;
  int nu_ = 0;
  std::vector<std::uint8_t> host_;
  std::vector<SiteIndex> neighbors_;
};

}  // namespace hmcp
