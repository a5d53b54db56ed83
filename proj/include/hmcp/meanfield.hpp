#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmcp::meanfield {

/// Densities of hosts of type i carrying a consumer of type j.
struct State {
  double v11 = 0.0;
  double v22 = 0.0;
  double v13 = 0.0;
  double v23 = 0.0;

  /// Unassociated host-1 and host-2 densities.
  double u1() const { return 0.5 - v11 - v13; }
  double u2() const { return 0.5 - v22 - v23; }

  std::array<double, 4> as_array() const { return {v11, v22, v13, v23}; }
  static State from_array(const std::array<double, 4>& v) { return {v[0], v[1], v[2], v[3]}; }

  /// Distance from the admissible region {v >= 0, u1 >= 0, u2 >= 0}; 0 inside.
  double region_violation() const;

  bool operator==(const State&) const = default;
};

/// Birth rates rescaled by the neighborhood size: a = alpha * nu_R,
/// b = beta * nu_R.
struct Params {
  double a = 0.0;
  double b = 0.0;

  void validate() const;
};

/// Exact rational parameter, for classifying points on the boundary lines
/// without rounding.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// dv11/dt = -v11 + a u1 v11
/// dv22/dt = -v22 + a u2 v22
/// dv13/dt = -v13 + b u1 (v13 + v23)
/// dv23/dt = -v23 + b u2 (v13 + v23)
State rhs(const State& s, const Params& p);

struct Sample {
  double t = 0.0;
  State state;
};

/// Classical fixed-step RK4. Samples are taken every `sample_dt` (rounded to
/// a whole number of steps) and at t_end. Throws StepSizeError if any step
/// leaves the admissible region by more than 1e-9.
std::vector<Sample> integrate(const State& s0, const Params& p, double t_end, double h = 0.01,
                              double sample_dt = 0.1);

enum class EquilibriumKind {
  trivial,
  specialists,         // v11 = v22 = 1/2 - 1/a
  generalists,         // v13 = v23 = 1/2 - 1/(2b)
  invasion_without_2,  // v22 = 0, the other three positive
  invasion_without_1,  // mirror image, v11 = 0
  neutral_coexistence, // one point of the continuum on a = 2b > 2
};

enum class Stability { stable, unstable, marginal };

const char* to_string(EquilibriumKind k);
const char* to_string(Stability s);

struct Equilibrium {
  EquilibriumKind kind;
  State state;
  Stability stability;
  /// Largest real part among the linearization's eigenvalues, from the
  /// closed-form spectrum (for the invasion points, the growth rate of the
  /// missing specialist, which already decides the label).
  double leading_rate;
};

/// All equilibria that exist for p, with their local stability.
std::vector<Equilibrium> equilibria(const Params& p);

enum class Regime { extinction, specialists_win, generalists_win, neutral_line, subcritical_boundary };

const char* to_string(Regime r);

/// extinction: b < 1 and a < 2; specialists_win: a > 2b and a > 2;
/// generalists_win: a < 2b and b > 1; neutral_line: a = 2b > 2; anything
/// else lies on a boundary line and is reported as subcritical_boundary.
/// Equalities are tested with tolerance 1e-12.
Regime classify_regime(const Params& p);
/// Exact version.
Regime classify_regime(const Rational& a, const Rational& b);

}  // namespace hmcp::meanfield
