#include <doctest.h>

#include <cmath>
#include <set>

#include "clockwork/random_stream.hpp"
#include "oracles.hpp"

using namespace clockwork;

TEST_CASE("same seed gives the same sequence") {
  RandomStream a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  RandomStream c(1, 2, 3), d(1, 2, 3);
  for (int i = 0; i < 100; ++i) CHECK(c.uniform() == d.uniform());
}

TEST_CASE("derived seeds differ across replications and streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 20; ++r)
    for (std::uint64_t s = 0; s < 20; ++s) seen.insert(derive_seed(7, r, s));
  CHECK(seen.size() == 400);
  CHECK(derive_seed(7, 0, 0) != derive_seed(8, 0, 0));
}

TEST_CASE("uniform stays in the open unit interval with mean 1/2") {
  RandomStream rng(3);
  std::vector<double> v;
  for (int i = 0; i < 200000; ++i) {
    double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    v.push_back(u);
  }
  auto m = oracle::mean_se(v);
  CHECK(std::abs(m.mean - 0.5) < 4 * m.se);
}

TEST_CASE("standard normal has mean 0 and variance 1") {
  RandomStream rng(5);
  std::vector<double> v, sq;
  for (int i = 0; i < 200000; ++i) {
    double z = rng.standard_normal();
    v.push_back(z);
    sq.push_back(z * z);
  }
  auto m = oracle::mean_se(v);
  auto s = oracle::mean_se(sq);
  CHECK(std::abs(m.mean) < 4 * m.se);
  CHECK(std::abs(s.mean - 1.0) < 4 * s.se);
}

TEST_CASE("index is uniform over its range") {
  RandomStream rng(11);
  std::vector<int> counts(3, 0);
  const int n = 300000;
  for (int i = 0; i < n; ++i) {
    auto k = rng.index(3);
    REQUIRE(k < 3);
    ++counts[k];
  }
  const double p = 1.0 / 3.0, se = std::sqrt(p * (1 - p) / n);
  for (int c : counts) CHECK(std::abs(c / double(n) - p) < 4 * se);
}
