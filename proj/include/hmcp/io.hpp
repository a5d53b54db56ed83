#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hmcp/dual.hpp"
#include "hmcp/engine.hpp"
#include "hmcp/experiments.hpp"
#include "hmcp/meanfield.hpp"

namespace hmcp {

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

/// Everything needed to reproduce a run. Written before any computation;
/// each output file carries the digest in a leading "# manifest <digest>"
/// comment line.
struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> params;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::string> outputs;

  /// key = value lines, params in the order given.
  std::string text() const;
  /// FNV-1a 64 of text(), as 16 hex digits.
  std::string digest() const;
};

/// Columns t,n0,n1,n2,n3,rho1,rho2,rho3.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::string& digest);

/// One text row per run of `extent` consecutive sites (row-major), one
/// character '0'-'3' per site, after the header
///   # manifest <digest>
///   # d=<d> L=<L> R=<R> extent=<extent> t=<t> seed=<seed>
void write_snapshot(std::ostream& out, const Configuration& config, double t, std::uint64_t seed,
                    const std::string& digest);

struct SnapshotFile {
  HabitatSpec spec;
  double t = 0.0;
  std::uint64_t seed = 0;
  std::vector<State> states;
};

/// Parses the snapshot format; throws std::runtime_error on malformed input.
SnapshotFile read_snapshot(std::istream& in);

/// Columns t,v11,v22,v13,v23,u1,u2.
void write_meanfield_csv(std::ostream& out, const std::vector<meanfield::Sample>& samples,
                         const std::string& digest);

/// Columns kind,v11,v22,v13,v23,stability,leading_rate,rhs_norm.
void write_equilibria_csv(std::ostream& out, const meanfield::Params& p,
                          const std::vector<meanfield::Equilibrium>& eqs, const std::string& digest);

struct RegimeCell {
  double a = 0.0;
  double b = 0.0;
  meanfield::Regime regime{};
};

/// Columns a,b,regime.
void write_regime_grid_csv(std::ostream& out, const std::vector<RegimeCell>& cells, const std::string& digest);

/// Columns beta,L,R,extent,t_end,alpha,mean_rho_spec,mean_rho_gen,alpha_hat_flag;
/// the flag is 1 on the row whose alpha equals alpha_hat.
void write_sweep_csv(std::ostream& out, const CriticalAlphaResult& result, const std::string& digest);

void write_block_map(std::ostream& out, const std::vector<std::string>& rows, double t, const std::string& digest);

/// Columns parent_key,child_key,site,time.
void write_dual_edges(std::ostream& out, const std::vector<DualEdge>& edges, const std::string& digest);

/// Columns depth,sites,rho0,rho1,rho2,rho3.
void write_boundary_profile(std::ostream& out, const std::vector<ProfileRow>& rows, const std::string& digest);

}  // namespace hmcp
