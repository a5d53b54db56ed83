#include "hmcp/meanfield.hpp"

#include <algorithm>
#include <cmath>

namespace hmcp::meanfield {

namespace {

__extension__ typedef __int128 Wide;

constexpr double kEqualityTol = 1e-12;
constexpr double kRegionTol = 1e-9;

bool near(double x, double y) {
  return std::abs(x - y) <= kEqualityTol * std::max({1.0, std::abs(x), std::abs(y)});
}
bool less(double x, double y) { return x < y && !near(x, y); }

Stability label(double leading) {
  if (leading < -kEqualityTol) return Stability::stable;
  if (leading > kEqualityTol) return Stability::unstable;
  return Stability::marginal;
}

State axpy(const State& s, double h, const State& k) {
  return {s.v11 + h * k.v11, s.v22 + h * k.v22, s.v13 + h * k.v13, s.v23 + h * k.v23};
}

State rk4_step(const State& s, const Params& p, double h) {
  const State k1 = rhs(s, p);
  const State k2 = rhs(axpy(s, h / 2, k1), p);
  const State k3 = rhs(axpy(s, h / 2, k2), p);
  const State k4 = rhs(axpy(s, h, k3), p);
  auto comb = [h](double y, double a, double b, double c, double d) {
    return y + h / 6.0 * (a + 2.0 * b + 2.0 * c + d);
  };
  return {comb(s.v11, k1.v11, k2.v11, k3.v11, k4.v11), comb(s.v22, k1.v22, k2.v22, k3.v22, k4.v22),
          comb(s.v13, k1.v13, k2.v13, k3.v13, k4.v13), comb(s.v23, k1.v23, k2.v23, k3.v23, k4.v23)};
}

}  // namespace

double State::region_violation() const {
  return std::max({0.0, -v11, -v22, -v13, -v23, -u1(), -u2()});
}

void Params::validate() const {
  if (!std::isfinite(a) || a < 0.0) throw std::invalid_argument("a must be finite and non-negative");
  if (!std::isfinite(b) || b < 0.0) throw std::invalid_argument("b must be finite and non-negative");
}

State rhs(const State& s, const Params& p) {
  const double u1 = s.u1();
  const double u2 = s.u2();
  const double gen = s.v13 + s.v23;
  return {-s.v11 + p.a * u1 * s.v11, -s.v22 + p.a * u2 * s.v22, -s.v13 + p.b * u1 * gen,
          -s.v23 + p.b * u2 * gen};
}

std::vector<Sample> integrate(const State& s0, const Params& p, double t_end, double h,
                              double sample_dt) {
  p.validate();
  if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be >= 0");
  if (!(sample_dt > 0.0)) throw std::invalid_argument("sample interval must be positive");
  if (s0.region_violation() > kEqualityTol)
    throw std::invalid_argument("initial state lies outside the admissible region");

  const auto steps = static_cast<std::int64_t>(std::ceil(t_end / h - 1e-9));
  const auto every = std::max<std::int64_t>(1, std::llround(sample_dt / h));
  std::vector<Sample> out{{0.0, s0}};
  State s = s0;
  for (std::int64_t k = 1; k <= steps; ++k) {
    const double t = std::min(static_cast<double>(k) * h, t_end);
    const double step = t - std::min(static_cast<double>(k - 1) * h, t_end);
    s = rk4_step(s, p, step);
    if (s.region_violation() > kRegionTol)
      throw StepSizeError("step size " + std::to_string(h) + " leaves the admissible region at t = " +
                          std::to_string(t));
    if (k % every == 0 || k == steps) out.push_back({t, s});
  }
  return out;
}

const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::trivial: return "trivial";
    case EquilibriumKind::specialists: return "specialists";
    case EquilibriumKind::generalists: return "generalists";
    case EquilibriumKind::invasion_without_2: return "invasion_without_2";
    case EquilibriumKind::invasion_without_1: return "invasion_without_1";
    case EquilibriumKind::neutral_coexistence: return "neutral_coexistence";
  }
  return "?";
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::marginal: return "marginal";
  }
  return "?";
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::extinction: return "extinction";
    case Regime::specialists_win: return "specialists_win";
    case Regime::generalists_win: return "generalists_win";
    case Regime::neutral_line: return "neutral_line";
    case Regime::subcritical_boundary: return "subcritical_boundary";
  }
  return "?";
}

std::vector<Equilibrium> equilibria(const Params& p) {
  p.validate();
  const double a = p.a;
  const double b = p.b;
  std::vector<Equilibrium> out;

  // Spectra of the linearization, block by block:
  //   trivial:     a/2 - 1 (twice), b - 1, -1
  //   specialists: 1 - a/2 (twice), -1, 2b/a - 1
  //   generalists: a/(2b) - 1 (twice), 1 - b, -b
  const double trivial = std::max({a / 2 - 1, b - 1, -1.0});
  out.push_back({EquilibriumKind::trivial, {}, label(trivial), trivial});

  if (a > 2.0) {
    const double v = 0.5 - 1.0 / a;
    const double lead = std::max({1 - a / 2, -1.0, 2 * b / a - 1});
    out.push_back({EquilibriumKind::specialists, {v, v, 0.0, 0.0}, label(lead), lead});
  }
  if (b > 1.0) {
    const double v = 0.5 - 1.0 / (2 * b);
    const double lead = std::max({a / (2 * b) - 1, 1 - b, -b});
    out.push_back({EquilibriumKind::generalists, {0.0, 0.0, v, v}, label(lead), lead});
  }
  if (a > 2.0 && less(2 * a / (a + 2), b) && less(b, a / 2)) {
    // u1 = 1/a, u2 = 1/b - 1/a; the absent specialist grows at a u2 - 1.
    const double v23 = 0.5 - 1.0 / b + 1.0 / a;
    const double gen = v23 / (1.0 - b / a);
    const double v13 = gen - v23;
    const double v11 = 0.5 - 1.0 / a - v13;
    const double lead = a / b - 2.0;
    out.push_back({EquilibriumKind::invasion_without_2, {v11, 0.0, v13, v23}, label(lead), lead});
    out.push_back({EquilibriumKind::invasion_without_1, {0.0, v11, v23, v13}, label(lead), lead});
  }
  if (a > 2.0 && near(a, 2 * b)) {
    const double g = (0.5 - 1.0 / a) / 2;
    out.push_back({EquilibriumKind::neutral_coexistence, {0.5 - 1.0 / a - g, 0.5 - 1.0 / a - g, g, g},
                   Stability::marginal, 0.0});
  }
  return out;
}

Regime classify_regime(const Params& p) {
  p.validate();
  const double a = p.a;
  const double b = p.b;
  if (less(b, 1) && less(a, 2)) return Regime::extinction;
  if (less(2 * b, a) && less(2, a)) return Regime::specialists_win;
  if (less(a, 2 * b) && less(1, b)) return Regime::generalists_win;
  if (near(a, 2 * b) && less(2, a)) return Regime::neutral_line;
  return Regime::subcritical_boundary;
}

Regime classify_regime(const Rational& a, const Rational& b) {
  if (a.den == 0 || b.den == 0) throw std::invalid_argument("zero denominator");
  // Sign-normalized comparison of x.num/x.den against k * y.num/y.den.
  auto cmp = [](const Rational& x, Wide k, const Rational& y) {
    Wide lhs = Wide{x.num} * y.den;
    Wide rhs = k * y.num * x.den;
    if ((Wide{x.den} * y.den) < 0) {
      lhs = -lhs;
      rhs = -rhs;
    }
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  };
  const Rational one{1, 1};
  if (cmp(a, 0, one) < 0 || cmp(b, 0, one) < 0) throw std::invalid_argument("a and b must be non-negative");
  const int b_vs_1 = cmp(b, 1, one);
  const int a_vs_2 = cmp(a, 2, one);
  const int a_vs_2b = cmp(a, 2, b);
  if (b_vs_1 < 0 && a_vs_2 < 0) return Regime::extinction;
  if (a_vs_2b > 0 && a_vs_2 > 0) return Regime::specialists_win;
  if (a_vs_2b < 0 && b_vs_1 > 0) return Regime::generalists_win;
  if (a_vs_2b == 0 && a_vs_2 > 0) return Regime::neutral_line;
  return Regime::subcritical_boundary;
}

}  // namespace hmcp::meanfield
