#pragma once

#include <cstdint>
#include <vector>

#include "hmcp/configuration.hpp"

namespace hmcp {

/// When to record the state of a run. Counts are sampled at 0, dt, 2dt, ...
/// and at t_end; full configurations are copied at each snapshot time.
struct SamplingPlan {
  double dt = 1.0;
  std::vector<double> snapshot_times;
};

struct TrajectorySample {
  double t = 0.0;
  Counts counts{};

  double density(State s) const;
};

struct Snapshot {
  double t = 0.0;
  Configuration config;
};

struct Trajectory {
  std::int64_t sites = 0;
  std::vector<TrajectorySample> samples;
  std::vector<Snapshot> snapshots;
  /// Number of transitions applied.
  std::int64_t events = 0;

  bool operator==(const Trajectory& other) const;
};

/// Sample times implied by a plan for a run of length t_end.
std::vector<double> sample_times(const SamplingPlan& plan, double t_end);

/// Exact continuous-time simulation of the chessboard process.
///
/// Rejection-free Gillespie: every empty site carries the integer counts of
/// neighbors able to colonize it, kept in prefix-sum trees, so each step
/// draws one of the transitions
///   0 -> i at alpha * #{type-i neighbors} on H_i,
///   0 -> 3 at beta * #{type-3 neighbors},
///   i -> 0 at 1
/// directly, at O(nu_R log N) cost per event.
/// Deterministic in (config, params, t_end, seed, plan).
Trajectory run_direct(Configuration config, const Params& params, double t_end, std::uint64_t seed,
                      const SamplingPlan& plan = {});

}  // namespace hmcp
