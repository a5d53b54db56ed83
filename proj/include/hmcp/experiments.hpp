#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hmcp/engine.hpp"

namespace hmcp {

/// Fractions of sites per state, index = to_int(State).
std::array<double, 4> densities(const Configuration& config);
std::array<double, 4> densities(const Counts& counts);

/// Runs tasks 0..count-1 on up to `workers` threads (0 = hardware
/// concurrency). Each task must write only its own output slot.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task);

struct AlphaPoint {
  double alpha = 0.0;
  double mean_rho_spec = 0.0;  // rho1 + rho2 at t_end, averaged over replicates
  double mean_rho_gen = 0.0;   // rho3 at t_end, averaged over replicates
};

struct CriticalAlphaOptions {
  double beta = 2.0;
  HabitatSpec spec;
  std::vector<double> alpha_grid;
  double t_end = 100.0;
  int replicates = 8;
  std::uint64_t seed = 0;
  ProductDensities init;
  /// Stop at the first grid point that meets the criterion; later points
  /// cannot change the answer.
  bool stop_at_threshold = true;
  unsigned workers = 0;
};

struct CriticalAlphaResult {
  double beta = 0.0;
  HabitatSpec spec;
  double t_end = 0.0;
  std::vector<double> alpha_grid;
  int replicates = 0;
  /// Smallest grid alpha whose mean specialist density strictly exceeds the
  /// mean generalist density at t_end; empty when none does.
  std::optional<double> alpha_hat;
  /// One entry per grid point that was simulated, in grid order.
  std::vector<AlphaPoint> points;
};

/// Replicate (alpha index i, replicate r) uses init seed
/// derive_seed(seed, {i, r, 0}) and dynamics seed derive_seed(seed, {i, r, 1}),
/// so the result does not depend on the worker count.
CriticalAlphaResult critical_alpha(const CriticalAlphaOptions& options);

struct BlockSpec {
  /// J_n is the box of half-width floor(L / n) around the tile center.
  int n = 4;
  /// Side of the small squares D(w); 0 means ceil(L^0.1).
  int sub_side = 0;

  int resolved_sub_side(int L) const;
};

enum class BlockKind { s, g };

/// Tile coordinate along each axis, in [0, extent / (2L)). Tile z covers
/// 2Lz - L <= x < 2Lz + L (mod extent) and is centered at 2Lz.
using TileIndex = std::vector<int>;

/// Host type of the sites of a tile (1 for even coordinate sum).
int tile_parity(const TileIndex& z);

/// s-good: J_n(z) holds no 3's and every small square D(w) inside J_n(z)
/// holds at least one specialist of the tile's host type. g-good: the same
/// with that specialist and 3 exchanged.
/// Throws std::invalid_argument for tiles out of range, or when no D(w)
/// fits inside J_n(z).
bool block_goodness(const Configuration& config, const TileIndex& z, const BlockSpec& bs, BlockKind kind);

/// One character per tile, rows over the first tile axis: 'S' s-good,
/// 'G' g-good, '.' neither. Only defined for d = 2.
std::vector<std::string> block_map(const Configuration& config, const BlockSpec& bs);

/// True iff every requested type has density above `threshold` at every
/// sample with t >= t_from.
bool coexistence_check(const Trajectory& traj, const std::vector<State>& types, double threshold,
                       double t_from);

/// Densities by sup-norm distance to the nearest tile edge: row k covers
/// sites whose distance to a site of the other host type is k + 1.
struct ProfileRow {
  int depth = 0;
  std::int64_t sites = 0;
  std::array<double, 4> rho{};
};

std::vector<ProfileRow> boundary_profile(const Configuration& config);

}  // namespace hmcp
