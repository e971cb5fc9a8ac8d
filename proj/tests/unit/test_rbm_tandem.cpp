#include <doctest.h>

#include <cmath>
#include <sstream>

#include "clockwork/rbm_tandem.hpp"

using namespace clockwork;

namespace {

TandemRBMParams exponential_tandem() {
  return tandem_params(ModelSpec::tandem(ClockSpec::exponential(0.8), ClockSpec::exponential(1.0),
                                         ClockSpec::exponential(1.0)));
}

}  // namespace

TEST_CASE("Cholesky factor") {
  Matrix2 s{{{1.8, -1.0}, {-1.0, 2.0}}};
  auto l = cholesky_psd(s);
  CHECK(l[0][1] == 0.0);
  CHECK(l[0][0] * l[0][0] == doctest::Approx(1.8));
  CHECK(l[1][0] * l[0][0] == doctest::Approx(-1.0));
  CHECK(l[1][0] * l[1][0] + l[1][1] * l[1][1] == doctest::Approx(2.0));
  // singular but PSD
  auto z = cholesky_psd(Matrix2{{{1.0, 1.0}, {1.0, 1.0}}});
  CHECK(z[1][1] == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(cholesky_psd(Matrix2{{{1.0, 2.0}, {2.0, 1.0}}}), std::invalid_argument);
  CHECK_THROWS_AS(cholesky_psd(Matrix2{{{-1.0, 0.0}, {0.0, 1.0}}}), std::invalid_argument);
}

TEST_CASE("zero drift and noise keep the start") {
  SRBMDynamics dyn;
  SRBMOptions o;
  o.start = {1.0, 1.0};
  o.horizon = 1.0;
  auto p = srbm_simulate(dyn, o);
  for (const auto& y : p.y_tilde) {
    CHECK(y[0] == 1.0);
    CHECK(y[1] == 1.0);
  }
  CHECK(p.final_regulator[0] == 0.0);
  CHECK(p.final_regulator[1] == 0.0);
}

TEST_CASE("deterministic skeleton of the reflection map") {
  SRBMDynamics dyn;
  dyn.drift = {-1.0, 0.0};
  SRBMOptions o;
  o.start = {0.5, 1.0};
  o.horizon = 1.0;
  o.dt = 1e-3;
  auto p = srbm_simulate(dyn, o);
  REQUIRE(p.t.size() == p.y_tilde.size());
  for (std::size_t k = 0; k < p.t.size(); ++k) {
    const double t = p.t[k];
    const auto& y = p.y_tilde[k];
    if (t <= 0.5) {
      CHECK(y[0] == doctest::Approx(0.5 - t).scale(1.0).epsilon(1e-9));
      CHECK(y[1] == doctest::Approx(1.0));
      CHECK(p.regulator[k][0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    } else {
      CHECK(y[0] == 0.0);
      CHECK(y[1] == doctest::Approx(1.0 - (t - 0.5)).epsilon(1e-9));
      CHECK(p.regulator[k][0] == doctest::Approx(t - 0.5).epsilon(1e-9));
    }
  }
  CHECK(p.final_regulator[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(p.final_regulator[1] == 0.0);
}

TEST_CASE("invariants and scaling on a noisy path") {
  auto params = exponential_tandem();
  SRBMOptions o;
  o.horizon = 200.0;
  o.seed = 3;
  o.stride = 7;
  auto p = srbm_simulate(params, o);
  CHECK(p.invariant_violations == 0);
  CHECK(p.steps == 200'000);
  REQUIRE(p.y.size() == p.y_tilde.size());
  for (std::size_t k = 0; k < p.y.size(); ++k) {
    REQUIRE(p.y_tilde[k][0] >= 0.0);
    REQUIRE(p.y_tilde[k][1] >= 0.0);
    REQUIRE(p.y[k][0] == params.delta[0] * p.y_tilde[k][0]);
    REQUIRE(p.y[k][1] == params.delta[1] * p.y_tilde[k][1]);
    if (k > 0) {
      REQUIRE(p.regulator[k][0] >= p.regulator[k - 1][0]);
      REQUIRE(p.regulator[k][1] >= p.regulator[k - 1][1]);
    }
  }
  // same seed, same path
  auto q = srbm_simulate(params, o);
  CHECK(q.y.back()[0] == p.y.back()[0]);
  CHECK(q.final_regulator[1] == p.final_regulator[1]);

  std::ostringstream out;
  write_srbm_path(out, p);
  CHECK(out.str().rfind("t,y1,y2,i1,i2\n", 0) == 0);
}

TEST_CASE("stationary samples") {
  auto params = exponential_tandem();
  CHECK(srbm_stationary_samples(params, 1e-3, 10.0, 0, 1.0, 1).empty());
  auto s = srbm_stationary_samples(params, 1e-3, 50.0, 500, 1.0, 2);
  REQUIRE(s.size() == 500);
  for (const auto& y : s) {
    CHECK(y[0] >= 0.0);
    CHECK(y[1] >= 0.0);
  }
}

TEST_CASE("halving dt on a coupled path moves the mean less than its half-width") {
  auto h = srbm_halving_check(exponential_tandem(), 1e-2, 4000.0, 200.0, 4);
  INFO(h.coarse.point << " " << h.fine.point << " hw " << h.coarse.half_width);
  CHECK(h.pass);
  CHECK(std::abs(h.difference.point) < h.coarse.half_width);
}

TEST_CASE("rejects bad options") {
  SRBMOptions o;
  o.dt = 0.0;
  CHECK_THROWS_AS(srbm_simulate(SRBMDynamics{}, o), std::invalid_argument);
  SRBMOptions n;
  n.start = {-1.0, 0.0};
  CHECK_THROWS_AS(srbm_simulate(SRBMDynamics{}, n), std::invalid_argument);
}
