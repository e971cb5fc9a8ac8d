#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "clockwork/clock_models.hpp"
#include "oracles.hpp"

using namespace clockwork;

TEST_CASE("moment examples") {
  CHECK(ClockSpec::exponential(2.0).moment(3) == doctest::Approx(0.75));
  CHECK(ClockSpec::erlang(2, 2.0).moment(1) == doctest::Approx(1.0));
  CHECK(ClockSpec::uniform(0.0, 3.0).moment(2) == doctest::Approx(3.0));
  CHECK_THROWS_AS(ClockSpec::exponential(1.0).moment(4), std::invalid_argument);
  CHECK_THROWS_AS(ClockSpec::exponential(1.0).moment(0), std::invalid_argument);
}

TEST_CASE("scv examples and identity") {
  CHECK(ClockSpec::exponential(3.0).scv() == doctest::Approx(1.0));
  CHECK(ClockSpec::erlang(4, 1.7).scv() == doctest::Approx(0.25));
  CHECK(ClockSpec::deterministic(2.0).scv() == 0.0);
  for (const auto& c : {ClockSpec::exponential(2.0), ClockSpec::erlang(3, 1.0), ClockSpec::uniform(1.0, 2.0),
                        ClockSpec::lognormal(0.1, 0.5), ClockSpec::balanced_hyperexponential(1.0, 4.0)}) {
    CHECK(c.scv() == doctest::Approx(c.moment(2) / (c.moment(1) * c.moment(1)) - 1.0).epsilon(1e-12));
    CHECK(c.scv() > 0.0);
    CHECK(c.moment(2) >= c.moment(1) * c.moment(1));
  }
}

TEST_CASE("deterministic samples its value") {
  RandomStream rng(1);
  CHECK(ClockSpec::deterministic(2.5).sample(rng) == 2.5);
}

TEST_CASE("sampling is reproducible") {
  RandomStream a(99), b(99);
  auto c = ClockSpec::exponential(1.0);
  for (int i = 0; i < 10; ++i) CHECK(c.sample(a) == c.sample(b));
}

TEST_CASE("degenerate hyperexponential behaves like its live phase") {
  auto c = ClockSpec::hyperexponential({1.0, 0.0}, {3.0, 7.0});
  RandomStream rng(4);
  std::vector<double> v;
  for (int i = 0; i < 1000000; ++i) v.push_back(c.sample(rng));
  auto m = oracle::mean_se(v);
  CHECK(std::abs(m.mean - 1.0 / 3.0) < 3 * m.se);
}

TEST_CASE("empirical moments match closed forms for every family") {
  const std::vector<ClockSpec> clocks{ClockSpec::exponential(1.5),
                                      ClockSpec::erlang(2, 2.0),
                                      ClockSpec::hyperexponential({0.3, 0.7}, {0.5, 4.0}),
                                      ClockSpec::balanced_hyperexponential(0.9, 4.0),
                                      ClockSpec::uniform(0.5, 2.0),
                                      ClockSpec::lognormal(-0.2, 0.6),
                                      ClockSpec::deterministic(1.3)};
  std::uint64_t seed = 1;
  for (const auto& c : clocks) {
    RandomStream rng(seed++);
    std::vector<double> p1, p2, p3;
    for (int i = 0; i < 1000000; ++i) {
      double x = c.sample(rng);
      REQUIRE(x >= 0.0);
      p1.push_back(x);
      p2.push_back(x * x);
      p3.push_back(x * x * x);
    }
    int m = 1;
    for (auto* v : {&p1, &p2, &p3}) {
      auto e = oracle::mean_se(*v);
      INFO(c.describe() << " moment " << m);
      CHECK(std::abs(e.mean - c.moment(m)) <= 4 * e.se + 1e-9 * c.moment(m));
      ++m;
    }
  }
}

TEST_CASE("Erlang and hyperexponential moments match independent formulas") {
  // Erlang(k, r): E X^m = k (k+1) ... (k+m-1) / r^m
  auto e = ClockSpec::erlang(3, 2.0);
  CHECK(e.moment(2) == doctest::Approx(3.0 * 4.0 / 4.0));
  CHECK(e.moment(3) == doctest::Approx(3.0 * 4.0 * 5.0 / 8.0));
  // mixture of exponentials: sum p_i m! / r_i^m
  auto h = ClockSpec::hyperexponential({0.25, 0.75}, {1.0, 3.0});
  CHECK(h.moment(3) == doctest::Approx(0.25 * 6.0 + 0.75 * 6.0 / 27.0));
  // balanced H2: mean and scv as requested, p1/r1 = p2/r2
  auto b = ClockSpec::balanced_hyperexponential(2.0, 4.0);
  CHECK(b.mean() == doctest::Approx(2.0));
  CHECK(b.scv() == doctest::Approx(4.0));
  const auto& f = std::get<HyperExponential>(b.family());
  CHECK(f.probabilities[0] / f.rates[0] == doctest::Approx(f.probabilities[1] / f.rates[1]));
}

TEST_CASE("abs_centered_cubed against numeric integration") {
  CHECK(ClockSpec::deterministic(3.0).abs_centered_cubed() == 0.0);

  // exponential: int |1 - x|^3 e^{-x} dx
  double expo = oracle::simpson([](double x) { return std::pow(std::abs(1 - x), 3) * std::exp(-x); }, 0, 1) +
                oracle::simpson([](double x) { return std::pow(std::abs(1 - x), 3) * std::exp(-x); }, 1, 80);
  CHECK(expo == doctest::Approx(2.4145532940).epsilon(1e-9));
  CHECK(ClockSpec::exponential(2.7).abs_centered_cubed() == doctest::Approx(expo).epsilon(1e-8));

  // Uniform(0, 2): mean 1, 2 * int_0^1 u^3 / 2 du = 1/4
  double uni = oracle::simpson([](double x) { return std::pow(std::abs(1 - x), 3) * 0.5; }, 0, 1) +
               oracle::simpson([](double x) { return std::pow(std::abs(1 - x), 3) * 0.5; }, 1, 2);
  CHECK(uni == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(ClockSpec::uniform(0.0, 2.0).abs_centered_cubed() == doctest::Approx(uni).epsilon(1e-10));

  // Erlang(2, 2): density 4 x e^{-2x}, mean 1
  auto erl = [](double x) { return std::pow(std::abs(1 - x), 3) * 4 * x * std::exp(-2 * x); };
  double e2 = oracle::simpson(erl, 0, 1) + oracle::simpson(erl, 1, 60);
  CHECK(e2 == doctest::Approx(0.7180175491).epsilon(1e-9));
  CHECK(ClockSpec::erlang(2, 2.0).abs_centered_cubed() == doctest::Approx(e2).epsilon(1e-8));

  // lognormal(0, 0.5), substituting x = e^{0.5 z}
  auto ln = ClockSpec::lognormal(0.0, 0.5);
  const double m = ln.mean();
  double lno = oracle::simpson(
      [m](double z) {
        double x = std::exp(0.5 * z);
        return std::pow(std::abs(1 - x / m), 3) * std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI);
      },
      -12, 12, 400000);
  CHECK(ln.abs_centered_cubed() == doctest::Approx(lno).epsilon(1e-7));
}

TEST_CASE("scaled clocks scale moments") {
  for (const auto& c : {ClockSpec::erlang(2, 2.0), ClockSpec::balanced_hyperexponential(1.0, 4.0),
                        ClockSpec::uniform(0.2, 1.0), ClockSpec::lognormal(0.0, 0.3),
                        ClockSpec::deterministic(2.0), ClockSpec::exponential(1.0)}) {
    auto s = c.scaled(2.5);
    for (int m = 1; m <= 3; ++m) CHECK(s.moment(m) == doctest::Approx(std::pow(2.5, m) * c.moment(m)));
    CHECK(s.scv() == doctest::Approx(c.scv()));
  }
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(ClockSpec::exponential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ClockSpec::erlang(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ClockSpec::uniform(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ClockSpec::hyperexponential({0.5, 0.6}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(ClockSpec::deterministic(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(ClockSpec::balanced_hyperexponential(1.0, 0.5), std::invalid_argument);
}

TEST_CASE("scv closed forms are exact") {
  CHECK(ClockSpec::exponential(0.8).scv() == 1.0);
  CHECK(ClockSpec::erlang(4, 3.0).scv() == 0.25);
  CHECK(ClockSpec::deterministic(2.0).scv() == 0.0);
  CHECK(ClockSpec::uniform(0.0, 2.0).scv() == doctest::Approx(1.0 / 3.0));
}
