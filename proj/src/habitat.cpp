#include "hmcp/habitat.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

namespace hmcp {

namespace {

// Neighbor tables beyond this many entries are refused rather than allocated.
constexpr std::int64_t kMaxTableEntries = std::int64_t{1} << 28;

int wrap(long long v, int extent) {
  long long r = v % extent;
  return static_cast<int>(r < 0 ? r + extent : r);
}

std::vector<std::vector<int>> offsets(int d, int R) {
  std::vector<std::vector<int>> out;
  std::vector<int> w(static_cast<std::size_t>(d), -R);
  while (true) {
    bool zero = true;
    for (int c : w) zero = zero && c == 0;
    if (!zero) out.push_back(w);
    // Increment the last axis fastest so the first axis varies slowest.
    int i = d - 1;
    while (i >= 0 && w[static_cast<std::size_t>(i)] == R) {
      w[static_cast<std::size_t>(i)] = -R;
      --i;
    }
    if (i < 0) break;
    ++w[static_cast<std::size_t>(i)];
  }
  return out;
}

void check_site(const Site& x, const HabitatSpec& spec) {
  if (static_cast<int>(x.coords.size()) != spec.d)
    throw std::invalid_argument("site has " + std::to_string(x.coords.size()) +
                                " coordinates, expected d = " + std::to_string(spec.d));
  for (int c : x.coords)
    if (c < 0 || c >= spec.extent)
      throw std::invalid_argument("site coordinate " + std::to_string(c) +
                                  " outside [0, extent)");
}

}  // namespace

void validate_geometry(const HabitatSpec& spec) {
  if (spec.d < 1) throw GeometryError("dimension d must be >= 1");
  if (spec.L < 1) throw GeometryError("habitat scale L must be >= 1");
  if (spec.R < 1) throw GeometryError("dispersal range R must be >= 1");
  if (spec.extent < 1) throw GeometryError("extent must be >= 1");
  if (spec.extent % (4 * spec.L) != 0)
    throw GeometryError("extent " + std::to_string(spec.extent) +
                        " is not a multiple of 4L = " + std::to_string(4 * spec.L));
  if (2 * spec.R + 1 > spec.extent)
    throw GeometryError("2R + 1 = " + std::to_string(2 * spec.R + 1) +
                        " exceeds extent " + std::to_string(spec.extent) +
                        " (neighborhood would wrap onto itself)");
  std::int64_t n = 1;
  for (int i = 0; i < spec.d; ++i) {
    n *= spec.extent;
    if (n > std::numeric_limits<SiteIndex>::max())
      throw GeometryError("lattice has more sites than a 32-bit index can address");
  }
}

int host_type(const Site& x, const HabitatSpec& spec) {
  check_site(x, spec);
  long long sum = 0;
  for (int c : x.coords) sum += (c + spec.L) / (2 * spec.L);
  return sum % 2 == 0 ? 1 : 2;
}

int neighborhood_size(const HabitatSpec& spec) {
  long long n = 1;
  for (int i = 0; i < spec.d; ++i) n *= 2 * spec.R + 1;
  return static_cast<int>(n - 1);
}

std::vector<Site> neighborhood(const Site& x, const HabitatSpec& spec) {
  check_site(x, spec);
  std::vector<Site> out;
  for (const auto& w : offsets(spec.d, spec.R)) {
    Site z{x.coords};
    for (std::size_t i = 0; i < w.size(); ++i)
      z.coords[i] = wrap(static_cast<long long>(z.coords[i]) + w[i], spec.extent);
    out.push_back(std::move(z));
  }
  return out;
}

Lattice::Lattice(const HabitatSpec& spec) : spec_(spec) {
  validate_geometry(spec);
  std::int64_t n = 1;
  for (int i = 0; i < spec.d; ++i) n *= spec.extent;
  size_ = static_cast<SiteIndex>(n);
  nu_ = hmcp::neighborhood_size(spec);
  if (n * nu_ > kMaxTableEntries)
    throw GeometryError("neighbor table of " + std::to_string(n * nu_) +
                        " entries exceeds the supported size");

  host_.resize(static_cast<std::size_t>(n));
  neighbors_.resize(static_cast<std::size_t>(n * nu_));
  const auto offs = offsets(spec.d, spec.R);
  for (SiteIndex i = 0; i < size_; ++i) {
    Site x = site(i);
    long long sum = 0;
    for (int c : x.coords) sum += (c + spec.L) / (2 * spec.L);
    host_[static_cast<std::size_t>(i)] = sum % 2 == 0 ? 1 : 2;
    for (std::size_t k = 0; k < offs.size(); ++k) {
      SiteIndex j = 0;
      for (std::size_t a = 0; a < offs[k].size(); ++a)
        j = j * spec.extent + wrap(static_cast<long long>(x.coords[a]) + offs[k][a], spec.extent);
      neighbors_[static_cast<std::size_t>(i) * static_cast<std::size_t>(nu_) + k] = j;
    }
  }
}

Site Lattice::site(SiteIndex i) const {
  Site x{std::vector<int>(static_cast<std::size_t>(spec_.d))};
  for (int a = spec_.d - 1; a >= 0; --a) {
    x.coords[static_cast<std::size_t>(a)] = i % spec_.extent;
    i /= spec_.extent;
  }
  return x;
}

SiteIndex Lattice::index(const Site& x) const {
  check_site(x, spec_);
  SiteIndex j = 0;
  for (int c : x.coords) j = j * spec_.extent + c;
  return j;
}

int Lattice::distance(SiteIndex a, SiteIndex b) const {
  int best = 0;
  for (int axis = 0; axis < spec_.d; ++axis) {
    int diff = std::abs(a % spec_.extent - b % spec_.extent);
    diff = std::min(diff, spec_.extent - diff);
    best = std::max(best, diff);
    a /= spec_.extent;
    b /= spec_.extent;
  }
  return best;
}

}  // namespace hmcp
