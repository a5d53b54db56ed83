#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hmcp/engine.hpp"

namespace hmcp {

enum class CouplingMode {
  /// First: specialists only (no 3's). Second: the plain contact process at
  /// rate alpha started from the first with every specialist replaced by a
  /// 3. Checked: occupied(first) is contained in occupied(second).
  specialists_vs_replacement,
  /// First: the chessboard process. Second: the homogeneous three-type
  /// contact process (1's and 2's breed at rate alpha everywhere, 3's at
  /// beta), same start, alpha >= beta. Checked: 3's(first) contains
  /// 3's(second) and {1,2}(first) is contained in {1,2}(second).
  hetero_vs_homo,
};

const char* to_string(CouplingMode mode);
CouplingMode coupling_mode_from_string(const std::string& name);

struct CouplingViolation {
  double time = 0.0;
  SiteIndex site = 0;
  State first = State::empty;
  State second = State::empty;
};

struct CoupledRun {
  Trajectory first;
  Trajectory second;
  std::vector<CouplingViolation> violations;
};

/// The partner configuration the mode prescribes for `first`. Throws
/// std::invalid_argument when `first` is not an admissible start.
Configuration paired_initial(CouplingMode mode, const Configuration& first);

/// Runs both processes from one shared stream of Harris marks drawn on the
/// fly (deaths at rate 1 per site, arrows at rate alpha per directed pair,
/// labelled as in the graphical representation). After every mark the sites
/// it touched are checked against the mode's inclusions, and the full
/// configurations are compared at every sample time.
CoupledRun run_coupled(CouplingMode mode, const Configuration& first, const Configuration& second,
                       const Params& params, double t_end, std::uint64_t seed,
                       const SamplingPlan& plan = {});

}  // namespace hmcp
