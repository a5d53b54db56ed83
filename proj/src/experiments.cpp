#include "hmcp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "hmcp/rng.hpp"

namespace hmcp {

std::array<double, 4> densities(const Counts& counts) {
  std::int64_t total = 0;
  for (auto n : counts) total += n;
  std::array<double, 4> out{};
  if (total == 0) return out;
  for (std::size_t i = 0; i < 4; ++i) out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return out;
}

std::array<double, 4> densities(const Configuration& config) { return densities(config.counts()); }

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

CriticalAlphaResult critical_alpha(const CriticalAlphaOptions& options) {
  if (options.alpha_grid.empty()) throw std::invalid_argument("alpha grid is empty");
  for (std::size_t i = 1; i < options.alpha_grid.size(); ++i)
    if (!(options.alpha_grid[i] > options.alpha_grid[i - 1]))
      throw std::invalid_argument("alpha grid must be strictly ascending");
  if (options.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (!(options.t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
  Params{options.alpha_grid.front(), options.beta}.validate();

  auto lattice = std::make_shared<const Lattice>(options.spec);
  CriticalAlphaResult result;
  result.beta = options.beta;
  result.spec = options.spec;
  result.t_end = options.t_end;
  result.alpha_grid = options.alpha_grid;
  result.replicates = options.replicates;

  const SamplingPlan plan{std::max(options.t_end, 1.0), {}};
  for (std::size_t i = 0; i < options.alpha_grid.size(); ++i) {
    const Params params{options.alpha_grid[i], options.beta};
    std::vector<std::array<double, 4>> finals(static_cast<std::size_t>(options.replicates));
    parallel_for(finals.size(), options.workers, [&](std::size_t r) {
      Configuration init = init_config(lattice, options.init, derive_seed(options.seed, {i, r, 0}));
      Trajectory traj = run_direct(std::move(init), params, options.t_end,
                                   derive_seed(options.seed, {i, r, 1}), plan);
      finals[r] = densities(traj.samples.back().counts);
    });
    AlphaPoint point{params.alpha, 0.0, 0.0};
    for (const auto& rho : finals) {
      point.mean_rho_spec += rho[1] + rho[2];
      point.mean_rho_gen += rho[3];
    }
    point.mean_rho_spec /= options.replicates;
    point.mean_rho_gen /= options.replicates;
    result.points.push_back(point);
    if (!result.alpha_hat && point.mean_rho_spec > point.mean_rho_gen) {
      result.alpha_hat = params.alpha;
      if (options.stop_at_threshold) break;
    }
  }
  return result;
}

int BlockSpec::resolved_sub_side(int L) const {
  if (sub_side > 0) return sub_side;
  return std::max(1, static_cast<int>(std::ceil(std::pow(static_cast<double>(L), 0.1) - 1e-12)));
}

int tile_parity(const TileIndex& z) {
  long long sum = 0;
  for (int c : z) sum += c;
  return sum % 2 == 0 ? 1 : 2;
}

namespace {

int wrap(long long v, int extent) {
  long long r = v % extent;
  return static_cast<int>(r < 0 ? r + extent : r);
}

/// Calls f(offset) for every integer vector with lo[i] <= offset[i] <= hi[i];
/// stops early when f returns false. Returns false iff stopped.
template <typename F>
bool for_each_offset(const std::vector<int>& lo, const std::vector<int>& hi, F&& f) {
  std::vector<int> w = lo;
  while (true) {
    if (!f(w)) return false;
    int i = static_cast<int>(w.size()) - 1;
    while (i >= 0 && w[static_cast<std::size_t>(i)] == hi[static_cast<std::size_t>(i)]) {
      w[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
      --i;
    }
    if (i < 0) return true;
    ++w[static_cast<std::size_t>(i)];
  }
}

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
int ceil_div(int a, int b) { return -floor_div(-a, b); }

}  // namespace

bool block_goodness(const Configuration& config, const TileIndex& z, const BlockSpec& bs, BlockKind kind) {
  const HabitatSpec& spec = config.spec();
  const int tiles = spec.extent / (2 * spec.L);
  if (static_cast<int>(z.size()) != spec.d) throw std::invalid_argument("tile index has wrong dimension");
  for (int c : z)
    if (c < 0 || c >= tiles) throw std::invalid_argument("tile coordinate out of range");
  if (bs.n < 1) throw std::invalid_argument("inner-box divisor n must be >= 1");

  const int half = spec.L / bs.n;
  const int side = bs.resolved_sub_side(spec.L);
  const int below = (side - 1) / 2;
  const int above = side - 1 - below;
  const int w_min = ceil_div(-half + below, side);
  const int w_max = floor_div(half - above, side);
  if (w_min > w_max) throw std::invalid_argument("no small square fits inside the inner box");

  auto at = [&](const std::vector<int>& offset) {
    SiteIndex idx = 0;
    for (std::size_t a = 0; a < offset.size(); ++a)
      idx = idx * spec.extent + wrap(2LL * spec.L * z[a] + offset[a], spec.extent);
    return config.at(idx);
  };
  const State specialist = state_from_int(tile_parity(z));
  const State focal = kind == BlockKind::s ? specialist : State::generalist;
  const State banned = kind == BlockKind::s ? State::generalist : specialist;

  const std::vector<int> box_lo(static_cast<std::size_t>(spec.d), -half);
  const std::vector<int> box_hi(static_cast<std::size_t>(spec.d), half);
  if (!for_each_offset(box_lo, box_hi, [&](const std::vector<int>& o) { return at(o) != banned; }))
    return false;

  const std::vector<int> wl(static_cast<std::size_t>(spec.d), w_min);
  const std::vector<int> wh(static_cast<std::size_t>(spec.d), w_max);
  return for_each_offset(wl, wh, [&](const std::vector<int>& w) {
    std::vector<int> lo(w.size()), hi(w.size());
    for (std::size_t a = 0; a < w.size(); ++a) {
      lo[a] = side * w[a] - below;
      hi[a] = side * w[a] + above;
    }
    // Keep going while the square holds a focal particle.
    return !for_each_offset(lo, hi, [&](const std::vector<int>& o) { return at(o) != focal; });
  });
}

std::vector<std::string> block_map(const Configuration& config, const BlockSpec& bs) {
  const HabitatSpec& spec = config.spec();
  if (spec.d != 2) throw std::invalid_argument("block maps are only defined for d = 2");
  const int tiles = spec.extent / (2 * spec.L);
  std::vector<std::string> rows;
  for (int i = 0; i < tiles; ++i) {
    std::string row;
    for (int j = 0; j < tiles; ++j) {
      const TileIndex z{i, j};
      if (block_goodness(config, z, bs, BlockKind::s)) row += 'S';
      else if (block_goodness(config, z, bs, BlockKind::g)) row += 'G';
      else row += '.';
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

bool coexistence_check(const Trajectory& traj, const std::vector<State>& types, double threshold,
                       double t_from) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
  if (traj.samples.empty() || !(t_from < traj.samples.back().t))
    throw std::invalid_argument("t_from must precede the end of the trajectory");
  if (types.empty()) return true;
  for (const auto& sample : traj.samples) {
    if (sample.t < t_from) continue;
    const auto rho = densities(sample.counts);
    for (State s : types)
      if (!(rho[static_cast<std::size_t>(to_int(s))] > threshold)) return false;
  }
  return true;
}

std::vector<ProfileRow> boundary_profile(const Configuration& config) {
  const HabitatSpec& spec = config.spec();
  std::vector<ProfileRow> rows(static_cast<std::size_t>(spec.L));
  std::vector<Counts> counts(rows.size());
  const Lattice& lat = config.lattice();
  for (SiteIndex i = 0; i < lat.size(); ++i) {
    SiteIndex rest = i;
    int depth = spec.L;
    for (int a = 0; a < spec.d; ++a) {
      const int p = (rest % spec.extent + spec.L) % (2 * spec.L);
      depth = std::min(depth, std::min(p + 1, 2 * spec.L - p));
      rest /= spec.extent;
    }
    ++counts[static_cast<std::size_t>(depth - 1)][static_cast<std::size_t>(to_int(config.at(i)))];
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].depth = static_cast<int>(k) + 1;
    for (auto n : counts[k]) rows[k].sites += n;
    rows[k].rho = densities(counts[k]);
  }
  return rows;
}

}  // namespace hmcp
