#include <doctest.h>

#include <cmath>
#include <set>

#include "hmcp/rng.hpp"

using namespace hmcp;

TEST_CASE("derive_seed is a pure function of its labels") {
  CHECK(derive_seed(7, {1, 2}) == derive_seed(7, {1, 2}));
  CHECK(derive_seed(7, {1, 2}) != derive_seed(7, {2, 1}));
  CHECK(derive_seed(7, {1}) != derive_seed(8, {1}));
  CHECK(derive_seed(7, {0}) != derive_seed(7, {0, 0}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 100; ++i)
    for (std::uint64_t j = 0; j < 100; ++j) seen.insert(derive_seed(3, {i, j}));
  CHECK(seen.size() == 10000);
}

TEST_CASE("Rng draws") {
  Rng a(5);
  Rng b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.bits() == b.bits());

  Rng rng(11);
  const int n = 200000;
  double sum = 0.0;
  double esum = 0.0;
  std::int64_t counts[7] = {};
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    esum += rng.exponential(2.0);
    const auto k = rng.below(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  CHECK(std::abs(sum / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(esum / n - 0.5) < 4 * 0.5 / std::sqrt(n));
  double chi2 = 0.0;
  for (auto c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  CHECK(chi2 < 22.46);  // chi-square(6) upper 0.001 point
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform_open();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}
