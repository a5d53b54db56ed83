#include <doctest.h>

#include <set>

#include "hmcp/dual.hpp"
#include "hmcp/rng.hpp"

using namespace hmcp;

namespace {

std::shared_ptr<const Lattice> board() { return std::make_shared<const Lattice>(HabitatSpec{2, 2, 1, 8}); }

SiteIndex at(const Lattice& lat, int x, int y) { return lat.index({{x, y}}); }

HierarchyKey key(std::vector<int> d) { return HierarchyKey(std::move(d)); }

}  // namespace

TEST_CASE("hierarchy keys") {
  CHECK(key({}) == key({0, 0}));
  CHECK(key({1, 0}) == key({1}));
  CHECK(key({}) < key({1}));
  CHECK(key({1}) < key({1, 1}));
  CHECK(key({1, 5}) < key({2}));
  CHECK(key({0, 1}) < key({1}));
  CHECK(key({}) < key({0, 1}));
  CHECK(key({2}).child(3) == key({2, 3}));
  CHECK(key({2, 3}).descends_from(key({2})));
  CHECK_FALSE(key({2}).descends_from(key({2, 3})));
  CHECK(key({2}).descends_from(key({})));
  CHECK(key({}).str() == "()");
  CHECK(key({1, 2}).str() == "(1,2)");
}

TEST_CASE("dual_ancestors examples") {
  auto lat = board();
  const SiteIndex x = at(*lat, 0, 0);
  const SiteIndex y = at(*lat, 0, 1);
  const double T = 3.0;

  const auto none = EventLog::from_events(lat, T, {});
  for (double s : {0.0, 1.0, 3.0}) {
    const auto d = dual_ancestors(x, T, none, s);
    REQUIRE(d.ancestors.size() == 1);
    CHECK(d.ancestors[0].site == x);
    CHECK(d.ancestors[0].key == key({}));
  }

  const auto death = EventLog::from_events(lat, T, {GraphEvent::death(T - 1.0, x)});
  CHECK(dual_ancestors(x, T, death, 0.5).alive());
  CHECK_FALSE(dual_ancestors(x, T, death, 1.5).alive());

  const auto arrow = EventLog::from_events(lat, T, {GraphEvent::arrow(T - 1.0, y, x)});
  CHECK(dual_ancestors(x, T, arrow, 0.5).ancestors.size() == 1);
  const auto d = dual_ancestors(x, T, arrow, 1.01);
  REQUIRE(d.ancestors.size() == 2);
  CHECK(d.ancestors[0].site == x);
  CHECK(d.ancestors[1].site == y);
  CHECK(d.ancestors[0].key < d.ancestors[1].key);

  CHECK_THROWS_AS(dual_ancestors(x, T, arrow, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(dual_ancestors(x, T, arrow, -1.0), std::invalid_argument);
}

TEST_CASE("reconstruct_type examples") {
  auto lat = board();
  const SiteIndex h1 = at(*lat, 1, 0);
  const SiteIndex h1b = at(*lat, 0, 0);
  const SiteIndex h2 = at(*lat, 2, 0);
  const SiteIndex h2b = at(*lat, 3, 0);
  REQUIRE(lat->host(h1) == 1);
  REQUIRE(lat->host(h1b) == 1);
  REQUIRE(lat->host(h2) == 2);
  REQUIRE(lat->host(h2b) == 2);
  const double T = 3.0;

  Configuration c(lat);
  c.set(h2, State::generalist);
  CHECK(reconstruct_type(h2, T, EventLog::from_events(lat, T, {}), c) == State::generalist);
  CHECK(reconstruct_type(h2, T, EventLog::from_events(lat, T, {GraphEvent::death(1.0, h2)}), c) == State::empty);

  // Specialist 1 on host 1 sends its only arrow across the habitat border.
  Configuration s(lat);
  s.set(h1, State::specialist1);
  CHECK(reconstruct_type(h2, T, EventLog::from_events(lat, T, {GraphEvent::arrow(1.0, h1, h2)}), s) == State::empty);

  struct Case {
    std::vector<GraphEvent> events;
    State h1b_state;
    State expected;
  };
  // h1 -> h2 at t=1 is g-blocked for specialists; h2b -> h2 at t=2 is clean.
  // h1b feeds h1 at t=0.5.
  const std::vector<Case> cases{
      {{GraphEvent::arrow(0.5, h1b, h1), GraphEvent::arrow(1.0, h1, h2), GraphEvent::arrow(2.0, h2b, h2)},
       State::generalist,
       State::generalist},
      {{GraphEvent::arrow(0.5, h1b, h1), GraphEvent::arrow(1.0, h1, h2), GraphEvent::arrow(2.0, h2b, h2)},
       State::specialist1,
       State::specialist2},
      {{GraphEvent::arrow(0.5, h1b, h1), GraphEvent::arrow(1.0, h1, h2, true), GraphEvent::arrow(2.0, h2b, h2)},
       State::generalist,
       State::specialist2},
      {{GraphEvent::arrow(0.5, h1b, h1), GraphEvent::arrow(1.0, h1, h2), GraphEvent::death(1.5, h2),
        GraphEvent::arrow(2.0, h2b, h2)},
       State::generalist,
       State::specialist2},
  };
  for (std::size_t i = 0; i < cases.size(); ++i) {
    CAPTURE(i);
    Configuration xi0(lat);
    xi0.set(h1b, cases[i].h1b_state);
    xi0.set(h2b, State::specialist2);
    const auto log = EventLog::from_events(lat, T, cases[i].events);
    CHECK(evolve_by_events(xi0, log).at(h2) == cases[i].expected);
    CHECK(reconstruct_type(h2, T, log, xi0) == cases[i].expected);
    CHECK(reconstruct_type_exhaustive(h2, T, log, xi0) == cases[i].expected);
  }
}

TEST_CASE("distinguished_path follows the smallest key") {
  auto lat = board();
  const SiteIndex x = at(*lat, 0, 0);
  const SiteIndex y = at(*lat, 0, 1);
  const double T = 3.0;
  CHECK(distinguished_path(x, T, EventLog::from_events(lat, T, {})).size() == 1);

  // Arrow y -> x at dual time u = 1, death at x at dual time v = 2. The tip
  // only adds y behind x; x keeps the smallest key until its death mark.
  const auto log = EventLog::from_events(lat, T, {GraphEvent::arrow(T - 1.0, y, x), GraphEvent::death(T - 2.0, x)});
  const auto path = distinguished_path(x, T, log);
  REQUIRE(path.size() == 2);
  CHECK(path[0].s == 0.0);
  CHECK(path[0].site == x);
  CHECK(path[1].s == doctest::Approx(2.0));
  CHECK(path[1].site == y);

  // With the death of x above the arrow the dual dies out.
  const auto gone = EventLog::from_events(lat, T, {GraphEvent::death(T - 0.5, x), GraphEvent::arrow(T - 1.0, y, x)});
  const auto p2 = distinguished_path(x, T, gone);
  REQUIRE(p2.size() == 2);
  CHECK(p2[1].site == -1);
}

TEST_CASE("dual structure on random logs") {
  auto lat = board();
  const double T = 2.0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const auto log = EventLog::generate(lat, {2, 1}, T, derive_seed(12, {rep}));
    const SiteIndex x = static_cast<SiteIndex>(rep * 3 % 64);
    const auto path = distinguished_path(x, T, log);
    const std::size_t n = log.events().size();
    std::size_t prev = 1;
    for (std::size_t k = 0; k < n; ++k) {
      // Probe just past the k-th event met going backward.
      const GraphEvent& e = log.event(static_cast<std::uint32_t>(n - 1 - k));
      const double next = k + 1 < n ? T - log.event(static_cast<std::uint32_t>(n - 2 - k)).time : T;
      const double s = 0.5 * ((T - e.time) + next);
      const auto d = dual_ancestors(x, T, log, s);
      std::set<SiteIndex> sites;
      std::set<std::string> keys;
      for (const auto& a : d.ancestors) {
        sites.insert(a.site);
        keys.insert(a.key.str());
      }
      CHECK(sites.size() == d.ancestors.size());
      CHECK(keys.size() == d.ancestors.size());
      CHECK(std::is_sorted(d.ancestors.begin(), d.ancestors.end(),
                           [](const Ancestor& a, const Ancestor& b) { return a.key < b.key; }));
      const auto now = d.ancestors.size();
      if (e.is_death()) {
        CHECK(now <= prev);
        CHECK(now + 1 >= prev);
      } else {
        CHECK(now >= prev);
        CHECK(now <= prev + 1);
      }
      prev = now;
      SiteIndex expected = -1;
      for (const auto& piece : path)
        if (piece.s <= s) expected = piece.site;
      CHECK(expected == (d.alive() ? d.ancestors.front().site : -1));
      if (!d.alive()) break;
    }
  }
}

TEST_CASE("three routes to the type of a space-time point agree") {
  auto lat = board();
  int checked = 0;
  for (std::uint64_t rep = 0; rep < 60; ++rep) {
    const double T = 0.25 + 0.25 * static_cast<double>(rep % 4);
    const Params params = rep % 3 == 0 ? Params{2, 2} : (rep % 3 == 1 ? Params{2, 1} : Params{3, 1});
    const auto xi0 = init_config(lat, ProductDensities{0.2, 0.2, 0.2}, derive_seed(13, {rep, 0}));
    const auto log = EventLog::generate(lat, params, T, derive_seed(13, {rep, 1}));
    const auto forward = evolve_by_events(xi0, log);
    for (SiteIndex x = 0; x < lat->size(); ++x) {
      const State fast = reconstruct_type(x, T, log, xi0);
      CHECK(fast == forward.at(x));
      State slow;
      try {
        slow = reconstruct_type_exhaustive(x, T, log, xi0, 20000);
      } catch (const std::length_error&) {
        continue;
      }
      CHECK(slow == fast);
      ++checked;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("generalists only: occupied iff some ancestor starts occupied") {
  auto lat = board();
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const double T = 2.0;
    const auto xi0 = init_config(lat, ProductDensities{0, 0, 0.15}, derive_seed(14, {rep, 0}));
    const auto log = EventLog::generate(lat, {1.5, 1.5}, T, derive_seed(14, {rep, 1}));
    const auto forward = evolve_by_events(xi0, log);
    for (SiteIndex x = 0; x < lat->size(); ++x) {
      bool any = false;
      for (const auto& a : dual_ancestors(x, T, log, T).ancestors) any = any || xi0.at(a.site) != State::empty;
      CHECK(any == (forward.at(x) == State::generalist));
    }
  }
}

TEST_CASE("dual tree edges") {
  auto lat = board();
  const SiteIndex x = at(*lat, 0, 0);
  const SiteIndex y = at(*lat, 0, 1);
  const SiteIndex z = at(*lat, 1, 1);
  const auto log = EventLog::from_events(lat, 3.0, {GraphEvent::arrow(2.0, y, x), GraphEvent::arrow(1.0, z, y)});
  const auto edges = dual_tree_edges(x, 3.0, log);
  REQUIRE(edges.size() == 2);
  CHECK(edges[0].site == y);
  CHECK(edges[0].parent == key({}));
  CHECK(edges[0].time == 2.0);
  CHECK(edges[1].site == z);
  CHECK(edges[1].parent == edges[0].child);
  CHECK(edges[1].child.descends_from(edges[0].child));
}
