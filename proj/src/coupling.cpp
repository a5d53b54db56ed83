#include "hmcp/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hmcp/event_log.hpp"
#include "hmcp/rng.hpp"

namespace hmcp {

const char* to_string(CouplingMode mode) {
  switch (mode) {
    case CouplingMode::specialists_vs_replacement: return "specialists_vs_replacement";
    case CouplingMode::hetero_vs_homo: return "hetero_vs_homo";
  }
  return "?";
}

CouplingMode coupling_mode_from_string(const std::string& name) {
  if (name == "specialists_vs_replacement") return CouplingMode::specialists_vs_replacement;
  if (name == "hetero_vs_homo") return CouplingMode::hetero_vs_homo;
  throw std::invalid_argument("unknown coupling mode '" + name + "'");
}

Configuration paired_initial(CouplingMode mode, const Configuration& first) {
  if (mode == CouplingMode::hetero_vs_homo) return first;
  std::vector<State> states(first.states().begin(), first.states().end());
  for (State& s : states) {
    if (s == State::generalist)
      throw std::invalid_argument("specialists_vs_replacement needs a start without generalists");
    if (s != State::empty) s = State::generalist;
  }
  return Configuration(first.lattice_ptr(), std::move(states));
}

namespace {

bool included(CouplingMode mode, State a, State b) {
  if (mode == CouplingMode::specialists_vs_replacement) return a == State::empty || b != State::empty;
  if (b == State::generalist && a != State::generalist) return false;
  if (is_specialist(a) && !is_specialist(b)) return false;
  return true;
}

}  // namespace

CoupledRun run_coupled(CouplingMode mode, const Configuration& first, const Configuration& second,
                       const Params& params, double t_end, std::uint64_t seed,
                       const SamplingPlan& plan) {
  params.validate();
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be >= 0");
  if (!(first.spec() == second.spec())) throw std::invalid_argument("paired configurations differ in habitat");
  if (mode == CouplingMode::hetero_vs_homo && params.alpha < params.beta)
    throw std::invalid_argument("hetero_vs_homo needs alpha >= beta");
  if (!(paired_initial(mode, first) == second))
    throw std::invalid_argument(std::string("initial configurations are not a valid ") + to_string(mode) +
                                " pairing");

  const Lattice& lat = first.lattice();
  const int nu = lat.neighborhood_size();
  const SiteIndex n = lat.size();
  const bool labelled = mode == CouplingMode::hetero_vs_homo;
  const double s_prob =
      labelled && params.alpha > 0.0 ? (params.alpha - params.beta) / params.alpha : 0.0;
  const double site_rate = 1.0 + params.alpha * nu;
  const double total = static_cast<double>(n) * site_rate;

  std::vector<State> a(first.states().begin(), first.states().end());
  std::vector<State> b(second.states().begin(), second.states().end());

  CoupledRun run;
  run.first.sites = run.second.sites = n;
  auto check = [&](double t, SiteIndex x) {
    const auto i = static_cast<std::size_t>(x);
    if (!included(mode, a[i], b[i])) run.violations.push_back({t, x, a[i], b[i]});
  };
  auto counts_of = [](const std::vector<State>& v) {
    Counts c{};
    for (State s : v) ++c[static_cast<std::size_t>(to_int(s))];
    return c;
  };

  const auto times = sample_times(plan, t_end);
  std::size_t next = 0;
  Rng rng(seed);
  double t = 0.0;
  std::int64_t events = 0;
  while (next < times.size()) {
    t += rng.exponential(total);
    while (next < times.size() && times[next] < t) {
      run.first.samples.push_back({times[next], counts_of(a)});
      run.second.samples.push_back({times[next], counts_of(b)});
      for (SiteIndex x = 0; x < n; ++x) check(times[next], x);
      ++next;
    }
    if (next == times.size()) break;
    ++events;

    const auto x = static_cast<SiteIndex>(rng.below(static_cast<std::uint64_t>(n)));
    const double v = rng.uniform() * site_rate;
    const auto xi = static_cast<std::size_t>(x);
    if (v < 1.0 || params.alpha <= 0.0) {
      a[xi] = b[xi] = State::empty;
      check(t, x);
      continue;
    }
    const int k = std::min(static_cast<int>((v - 1.0) / params.alpha), nu - 1);
    const SiteIndex z = lat.neighbor(x, k);
    const auto zi = static_cast<std::size_t>(z);
    GraphEvent arrow{t, x, z, s_prob > 0.0 && rng.bernoulli(s_prob), lat.host(x) != lat.host(z)};
    if (!labelled) arrow.s_flag = false;

    if (a[zi] == State::empty && arrow.usable_by(a[xi])) a[zi] = a[xi];
    if (b[zi] == State::empty && b[xi] != State::empty) {
      // Second process ignores the habitat: only the s label can block, and
      // only for 3's.
      const bool blocked = labelled && b[xi] == State::generalist && arrow.s_flag;
      if (!blocked) b[zi] = b[xi];
    }
    check(t, x);
    check(t, z);
  }
  run.first.events = run.second.events = events;
  return run;
}

}  // namespace hmcp
