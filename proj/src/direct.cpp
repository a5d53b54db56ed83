#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hmcp/engine.hpp"
#include "hmcp/rng.hpp"

namespace hmcp {

double TrajectorySample::density(State s) const {
  std::int64_t total = 0;
  for (auto n : counts) total += n;
  return total == 0 ? 0.0 : static_cast<double>(counts[static_cast<std::size_t>(to_int(s))]) /
                                static_cast<double>(total);
}

bool Trajectory::operator==(const Trajectory& other) const {
  if (sites != other.sites || events != other.events) return false;
  if (samples.size() != other.samples.size() || snapshots.size() != other.snapshots.size())
    return false;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].t != other.samples[i].t || samples[i].counts != other.samples[i].counts)
      return false;
  for (std::size_t i = 0; i < snapshots.size(); ++i)
    if (snapshots[i].t != other.snapshots[i].t || !(snapshots[i].config == other.snapshots[i].config))
      return false;
  return true;
}

std::vector<double> sample_times(const SamplingPlan& plan, double t_end) {
  if (!(plan.dt > 0.0)) throw std::invalid_argument("sampling interval must be positive");
  std::vector<double> out;
  for (std::int64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * plan.dt;
    if (t > t_end * (1.0 + 1e-12)) break;
    out.push_back(std::min(t, t_end));
  }
  if (out.empty() || out.back() < t_end) out.push_back(t_end);
  return out;
}

namespace {

/// Occupied sites, with O(1) insert, erase and uniform pick.
class SiteList {
 public:
  explicit SiteList(SiteIndex n) : pos_(static_cast<std::size_t>(n), -1) {}

  void insert(SiteIndex s) {
    pos_[static_cast<std::size_t>(s)] = static_cast<SiteIndex>(sites_.size());
    sites_.push_back(s);
  }
  void erase(SiteIndex s) {
    const SiteIndex p = pos_[static_cast<std::size_t>(s)];
    const SiteIndex last = sites_.back();
    sites_[static_cast<std::size_t>(p)] = last;
    pos_[static_cast<std::size_t>(last)] = p;
    sites_.pop_back();
    pos_[static_cast<std::size_t>(s)] = -1;
  }
  std::size_t size() const { return sites_.size(); }
  SiteIndex operator[](std::size_t i) const { return sites_[i]; }

 private:
  std::vector<SiteIndex> sites_;
  std::vector<SiteIndex> pos_;
};

/// Integer weights per site with prefix-sum search.
class Fenwick {
 public:
  explicit Fenwick(SiteIndex n) : tree_(static_cast<std::size_t>(n) + 1, 0) {
    top_ = 1;
    while (top_ * 2 <= n) top_ *= 2;
  }

  void add(SiteIndex i, std::int64_t delta) {
    total_ += delta;
    for (auto k = static_cast<std::size_t>(i) + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
  }
  std::int64_t total() const { return total_; }
  /// Site whose cumulative weight range contains target, 0 <= target < total().
  SiteIndex find(std::int64_t target) const {
    std::size_t pos = 0;
    for (std::size_t step = static_cast<std::size_t>(top_); step > 0; step /= 2) {
      const std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] <= target) {
        pos = next;
        target -= tree_[next];
      }
    }
    return static_cast<SiteIndex>(pos);
  }

 private:
  std::vector<std::int64_t> tree_;
  std::int64_t total_ = 0;
  SiteIndex top_ = 1;
};

struct Checkpoint {
  double t;
  bool sample;
  bool snapshot;
};

std::vector<Checkpoint> checkpoints(const SamplingPlan& plan, double t_end) {
  std::vector<Checkpoint> out;
  for (double t : sample_times(plan, t_end)) out.push_back({t, true, false});
  for (double t : plan.snapshot_times) {
    if (t < 0.0 || t > t_end) throw std::invalid_argument("snapshot time outside [0, t_end]");
    out.push_back({t, false, true});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Checkpoint& a, const Checkpoint& b) { return a.t < b.t; });
  return out;
}

}  // namespace

Trajectory run_direct(Configuration config, const Params& params, double t_end, std::uint64_t seed,
                      const SamplingPlan& plan) {
  params.validate();
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be >= 0");

  const Lattice& lat = config.lattice();
  const SiteIndex n = lat.size();
  auto& grid = ConfigurationAccess::states(config);
  auto at = [&](SiteIndex i) { return grid[static_cast<std::size_t>(i)]; };

  // For every site: occupied neighbors able to colonize it. host_nbrs counts
  // specialists matching the site's host, gen_nbrs counts generalists. Only
  // empty sites carry weight in the trees.
  std::vector<std::int32_t> host_nbrs(static_cast<std::size_t>(n), 0);
  std::vector<std::int32_t> gen_nbrs(static_cast<std::size_t>(n), 0);
  SiteList occupied(n);
  Counts counts{};
  for (SiteIndex i = 0; i < n; ++i) {
    const State s = at(i);
    ++counts[static_cast<std::size_t>(to_int(s))];
    if (s == State::empty) continue;
    occupied.insert(i);
    for (SiteIndex y : lat.neighbors(i)) {
      if (s == State::generalist) ++gen_nbrs[static_cast<std::size_t>(y)];
      else if (lat.host(y) == to_int(s)) ++host_nbrs[static_cast<std::size_t>(y)];
    }
  }
  Fenwick spec_tree(n);
  Fenwick gen_tree(n);
  for (SiteIndex i = 0; i < n; ++i) {
    if (at(i) != State::empty) continue;
    spec_tree.add(i, host_nbrs[static_cast<std::size_t>(i)]);
    gen_tree.add(i, gen_nbrs[static_cast<std::size_t>(i)]);
  }

  auto place = [&](SiteIndex z, State s) {
    const auto zi = static_cast<std::size_t>(z);
    const State old = grid[zi];
    grid[zi] = s;
    --counts[static_cast<std::size_t>(to_int(old))];
    ++counts[static_cast<std::size_t>(to_int(s))];
    const int sign = s == State::empty ? -1 : 1;
    const State who = s == State::empty ? old : s;
    if (s == State::empty) {
      occupied.erase(z);
      spec_tree.add(z, host_nbrs[zi]);
      gen_tree.add(z, gen_nbrs[zi]);
    } else {
      occupied.insert(z);
      spec_tree.add(z, -host_nbrs[zi]);
      gen_tree.add(z, -gen_nbrs[zi]);
    }
    for (SiteIndex y : lat.neighbors(z)) {
      const auto yi = static_cast<std::size_t>(y);
      const bool open = grid[yi] == State::empty;
      if (who == State::generalist) {
        gen_nbrs[yi] += sign;
        if (open) gen_tree.add(y, sign);
      } else if (lat.host(y) == to_int(who)) {
        host_nbrs[yi] += sign;
        if (open) spec_tree.add(y, sign);
      }
    }
  };

  Trajectory traj;
  traj.sites = n;
  const auto marks = checkpoints(plan, t_end);
  std::size_t next_mark = 0;

  Rng rng(seed);
  double t = 0.0;
  std::int64_t events = 0;
  while (true) {
    const double deaths = static_cast<double>(occupied.size());
    const double spec_births = params.alpha * static_cast<double>(spec_tree.total());
    const double gen_births = params.beta * static_cast<double>(gen_tree.total());
    const double total = deaths + spec_births + gen_births;
    const double t_next =
        total > 0.0 ? t + rng.exponential(total) : std::numeric_limits<double>::infinity();
    while (next_mark < marks.size() && marks[next_mark].t < t_next) {
      const Checkpoint& m = marks[next_mark++];
      if (m.sample) traj.samples.push_back({m.t, counts});
      if (m.snapshot) traj.snapshots.push_back({m.t, config});
    }
    if (next_mark == marks.size()) break;
    t = t_next;
    ++events;

    const double u = rng.uniform() * total;
    if (u < deaths || spec_births + gen_births <= 0.0) {
      const auto k = std::min(static_cast<std::size_t>(u), occupied.size() - 1);
      place(occupied[k], State::empty);
    } else if (u < deaths + spec_births || gen_births <= 0.0) {
      const auto w = std::clamp(static_cast<std::int64_t>((u - deaths) / params.alpha), std::int64_t{0},
                                spec_tree.total() - 1);
      const SiteIndex z = spec_tree.find(w);
      place(z, state_from_int(lat.host(z)));
    } else {
      const auto w = std::clamp(static_cast<std::int64_t>((u - deaths - spec_births) / params.beta),
                                std::int64_t{0}, gen_tree.total() - 1);
      place(gen_tree.find(w), State::generalist);
    }
  }
  traj.events = events;
  return traj;
}

}  // namespace hmcp
