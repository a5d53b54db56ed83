#include <doctest.h>

#include "hmcp/coupling.hpp"
#include "hmcp/rng.hpp"

using namespace hmcp;

namespace {

std::shared_ptr<const Lattice> board(int L = 2, int extent = 16) {
  return std::make_shared<const Lattice>(HabitatSpec{2, L, 1, extent});
}

}  // namespace

TEST_CASE("coupling mode names") {
  for (auto m : {CouplingMode::specialists_vs_replacement, CouplingMode::hetero_vs_homo})
    CHECK(coupling_mode_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(coupling_mode_from_string("other"), std::invalid_argument);
}

TEST_CASE("paired initial configurations") {
  auto lat = board();
  const auto spec_only = init_config(lat, ProductDensities{0.3, 0.3, 0}, 1);
  const auto repl = paired_initial(CouplingMode::specialists_vs_replacement, spec_only);
  for (SiteIndex i = 0; i < lat->size(); ++i)
    CHECK((repl.at(i) == State::generalist) == (spec_only.at(i) != State::empty));
  const auto mixed = init_config(lat, ProductDensities{}, 1);
  CHECK_THROWS_AS(paired_initial(CouplingMode::specialists_vs_replacement, mixed), std::invalid_argument);
  CHECK(paired_initial(CouplingMode::hetero_vs_homo, mixed) == mixed);
  CHECK_THROWS_AS(run_coupled(CouplingMode::hetero_vs_homo, mixed, spec_only, {2, 1}, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_coupled(CouplingMode::hetero_vs_homo, mixed, mixed, {1, 2}, 1.0, 1), std::invalid_argument);
}

TEST_CASE("empty starts couple trivially") {
  auto lat = board();
  const Configuration e(lat);
  for (auto m : {CouplingMode::specialists_vs_replacement, CouplingMode::hetero_vs_homo}) {
    const auto run = run_coupled(m, e, e, {2, 1}, 3.0, 1);
    CHECK(run.violations.empty());
    CHECK(run.first.samples.back().counts[0] == lat->size());
  }
}

TEST_CASE("inclusions hold along coupled runs") {
  auto lat = board();
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const auto spec_only = init_config(lat, ProductDensities{0.3, 0.3, 0}, derive_seed(4, {trial}));
    const auto a = run_coupled(CouplingMode::specialists_vs_replacement, spec_only,
                               paired_initial(CouplingMode::specialists_vs_replacement, spec_only), {2.5, 2.0}, 5.0,
                               derive_seed(5, {trial}));
    CHECK(a.violations.empty());
    const auto mixed = init_config(lat, ProductDensities{}, derive_seed(6, {trial}));
    const auto b = run_coupled(CouplingMode::hetero_vs_homo, mixed, mixed, {3.0, 1.0 + trial % 3}, 5.0,
                               derive_seed(7, {trial}));
    CHECK(b.violations.empty());
    // Every surviving specialist of the first process still has one in the second.
    const auto& fa = b.first.samples.back().counts;
    const auto& fb = b.second.samples.back().counts;
    CHECK(fa[1] + fa[2] <= fb[1] + fb[2]);
    CHECK(fa[3] >= fb[3]);
  }
}

TEST_CASE("run_coupled is deterministic") {
  auto lat = board();
  const auto mixed = init_config(lat, ProductDensities{}, 2);
  const auto a = run_coupled(CouplingMode::hetero_vs_homo, mixed, mixed, {2, 1}, 2.0, 9);
  const auto b = run_coupled(CouplingMode::hetero_vs_homo, mixed, mixed, {2, 1}, 2.0, 9);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
}
