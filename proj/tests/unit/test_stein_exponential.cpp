#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "clockwork/stein_exponential.hpp"
#include "oracles.hpp"

using namespace clockwork;

namespace {

const DiffusionParams1D kParams{0.04, 0.06, 0.2};

std::vector<PiecewiseLinear> family() {
  std::vector<PiecewiseLinear> hs{PiecewiseLinear::identity(), PiecewiseLinear::min_with(2.0),
                                  PiecewiseLinear::min_with(0.3), PiecewiseLinear::constant(1.5)};
  RandomStream rng(2024);
  for (int k = 0; k < 10; ++k) hs.push_back(PiecewiseLinear::random_lip1(rng, 6, 4.0));
  return hs;
}

double sup_abs_h(const PiecewiseLinear& h, const std::vector<double>& grid) {
  double m = 0.0;
  for (double x : grid) m = std::max(m, std::abs(h(x)));
  return m;
}

}  // namespace

TEST_CASE("piecewise linear h") {
  PiecewiseLinear h(1.0, {1.0, 3.0}, {2.0, -1.0, 0.5});
  CHECK(h(0.0) == 1.0);
  CHECK(h(1.0) == doctest::Approx(3.0));
  CHECK(h(3.0) == doctest::Approx(1.0));
  CHECK(h(5.0) == doctest::Approx(2.0));
  CHECK(h(-1.0) == doctest::Approx(-1.0));
  CHECK(h.slope_at(1.0) == -1.0);
  CHECK(h.lipschitz() == 2.0);
  CHECK(h.integral_from_zero(4.0) ==
        doctest::Approx(oracle::simpson([&](double x) { return h(x); }, 0, 1) +
                        oracle::simpson([&](double x) { return h(x); }, 1, 3) +
                        oracle::simpson([&](double x) { return h(x); }, 3, 4)));
  const double beta = 1.7;
  for (double x : {0.0, 0.5, 2.0, 6.0}) {
    auto dens = [&](double y) { return h(x + y) * beta * std::exp(-beta * y); };
    double ref = 0.0;
    double a = 0.0;
    for (double b : {1.0, 3.0}) {
      if (b - x > a) {
        ref += oracle::simpson(dens, a, b - x);
        a = b - x;
      }
    }
    ref += oracle::simpson(dens, a, 60.0);
    CHECK(h.shifted_expectation(x, beta) == doctest::Approx(ref).epsilon(1e-9));
  }
  CHECK_THROWS_AS(PiecewiseLinear(0.0, {2.0, 1.0}, {1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinear(0.0, {1.0}, {1.0}), std::invalid_argument);

  RandomStream rng(1);
  for (int k = 0; k < 20; ++k) CHECK(PiecewiseLinear::random_lip1(rng, 5, 3.0).lipschitz() <= 1.0);
}

TEST_CASE("identity h has a closed-form solution") {
  auto sol = solve_poisson(PiecewiseLinear::identity(), kParams);
  const double theta = kParams.theta;
  CHECK(sol.mean_h() == doctest::Approx(kParams.sigma2 / (2 * theta)));
  for (double x : {0.0, 0.3, 1.0, 7.5}) {
    CHECK(sol.f1(x) == doctest::Approx(x / theta));
    CHECK(sol.f2(x) == doctest::Approx(1.0 / theta));
    CHECK(sol.f3(x) == doctest::Approx(0.0).epsilon(1e-9).scale(1.0 / theta));
    CHECK(sol.f(x) == doctest::Approx(x * x / (2 * theta)).epsilon(1e-9).scale(1.0));
  }
  auto grid = default_grid(sol);
  auto sf = stein_factors(sol, grid);
  CHECK(sf.sup_f2 == doctest::Approx(1.0 / theta));
  CHECK(std::abs(sf.sup_f3) <= 1e-9 / theta);
}

TEST_CASE("constant h gives the zero solution") {
  auto sol = solve_poisson(PiecewiseLinear::constant(2.0), kParams);
  for (double x : {0.0, 1.0, 5.0}) {
    CHECK(sol.f(x) == 0.0);
    CHECK(sol.f1(x) == 0.0);
    CHECK(sol.f2(x) == 0.0);
  }
  auto zero = solve_poisson(PiecewiseLinear::constant(0.0), kParams);
  auto sf = stein_factors(zero, default_grid(zero));
  CHECK(sf.sup_f2 == 0.0);
  CHECK(sf.sup_f3 == 0.0);
}

TEST_CASE("ODE residual, boundary condition, growth and Stein factors over a family of h") {
  for (const auto& h : family()) {
    auto sol = solve_poisson(h, kParams);
    auto grid = default_grid(sol, 10'001);
    REQUIRE(grid.size() >= 10'001);
    INFO(h.name());
    const double tol = 1e-9 * std::max(1.0, sup_abs_h(h, grid) / kParams.theta);
    CHECK(ode_residual(sol, grid) <= tol);
    CHECK(std::abs(sol.f1(0.0)) <= 1e-12);
    CHECK(sol.f(0.0) == 0.0);
    if (h.lipschitz() <= 1.0) {
      auto sf = stein_factors(sol, grid);
      CHECK(sf.sup_f2 <= 1.0 / kParams.theta * (1 + 1e-12));
      CHECK(sf.sup_f3 <= 4.0 / kParams.sigma2 * (1 + 1e-12));
      for (double x : grid) {
        REQUIRE(std::abs(sol.f1(x)) <= x / kParams.theta * (1 + 1e-9) + 1e-12);
        REQUIRE(std::abs(sol.f(x)) <= x * x / (2 * kParams.theta) * (1 + 1e-9) + 1e-12);
      }
    }
    // the generator maps f_h to E h(Y) - h
    auto tf = sol.as_test_function();
    for (double x : {0.0, 0.1, 0.77, 2.5, 9.0})
      CHECK(generator_apply(kParams, tf, x) == doctest::Approx(sol.mean_h() - h(x)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("f'' and f''' against finite differences") {
  auto sol = solve_poisson(PiecewiseLinear::min_with(1.0), kParams);
  const double e = 1e-6;
  for (double x : {0.2, 0.6, 1.4, 3.0}) {
    CHECK(sol.f2(x) == doctest::Approx((sol.f1(x + e) - sol.f1(x - e)) / (2 * e)).epsilon(1e-5));
    CHECK(sol.f3(x) == doctest::Approx((sol.f2(x + e) - sol.f2(x - e)) / (2 * e)).epsilon(1e-4));
    CHECK(sol.f1(x) == doctest::Approx((sol.f(x + e) - sol.f(x - e)) / (2 * e)).epsilon(1e-5));
  }
}

TEST_CASE("E h(Y): closed form against Monte Carlo") {
  const double beta = kParams.beta();
  RandomStream rng(77);
  for (const auto& h : family()) {
    auto sol = solve_poisson(h, kParams);
    std::vector<double> v;
    v.reserve(1'000'000);
    for (int k = 0; k < 1'000'000; ++k) v.push_back(h(-std::log(rng.uniform()) / beta));
    auto m = oracle::mean_se(v);
    INFO(h.name());
    CHECK(std::abs(m.mean - sol.mean_h()) <= 4 * m.se + 1e-12);
  }
  // min(Y, c): (1 - e^{-beta c}) / beta
  auto sol = solve_poisson(PiecewiseLinear::min_with(2.0), kParams);
  CHECK(sol.mean_h() == doctest::Approx((1 - std::exp(-beta * 2.0)) / beta));
}

TEST_CASE("generator examples") {
  CHECK(generator_apply(kParams, test_functions::linear(), 1.3) == doctest::Approx(0.0));
  TandemGeneratorInputs t{0.8, 1.0, 1.0, 0.2, 0.2, 1.0, 1.0, 1.0};
  TestFunction2D sum = test_functions::library_2d()[0];
  REQUIRE(sum.name == "sum");
  const double expect = -t.mu1 * t.delta1 * t.delta1 + t.delta2 * (t.mu1 * t.delta1 - t.mu2 * t.delta2);
  CHECK(generator_apply(t, sum, 0.7, 1.1) == doctest::Approx(expect));
}

TEST_CASE("bad parameters are rejected") {
  CHECK_THROWS_AS(solve_poisson(PiecewiseLinear::identity(), {0.1, 0.0, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(solve_poisson(PiecewiseLinear::identity(), {0.0, 0.1, 0.1}), std::invalid_argument);
}

TEST_CASE("solution grid dump") {
  auto sol = solve_poisson(PiecewiseLinear::min_with(1.0), kParams);
  std::ostringstream out;
  write_solution_grid(out, sol, {0.0, 0.5, 1.0});
  auto s = out.str();
  CHECK(s.rfind("x,f,f1,f2,f3\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}
