#include <doctest.h>

#include <cmath>

#include "clockwork/approx_bounds.hpp"
#include "clockwork/des_engine.hpp"

using namespace clockwork;

namespace {

ModelSpec mm1(double lambda) {
  return ModelSpec::gg1(ClockSpec::exponential(lambda), ClockSpec::exponential(1.0));
}

}  // namespace

TEST_CASE("diffusion parameter examples") {
  auto p = diffusion_params_1d(mm1(0.9));
  CHECK(p.theta == doctest::Approx(0.01));
  CHECK(p.sigma2 == doctest::Approx(0.019));
  CHECK(p.beta() == doctest::Approx(2.0 / 1.9));

  auto j = diffusion_params_1d(ModelSpec::jsq(2, ClockSpec::exponential(1.8), ClockSpec::exponential(1.0)));
  CHECK(j.theta == doctest::Approx(0.02));
  CHECK(j.sigma2 == doctest::Approx(0.038));

  auto t = tandem_params(ModelSpec::tandem(ClockSpec::exponential(0.8), ClockSpec::exponential(1.0),
                                           ClockSpec::exponential(1.0)));
  CHECK(t.sigma[0][0] == 1.8);
  CHECK(t.sigma[0][1] == -1.0);
  CHECK(t.sigma[1][0] == -1.0);
  CHECK(t.sigma[1][1] == 2.0);
  CHECK(t.reflection[1][0] == -1.0);
  CHECK(std::holds_alternative<TandemRBMParams>(diffusion_params(
      ModelSpec::tandem(ClockSpec::exponential(0.8), ClockSpec::exponential(1.0), ClockSpec::exponential(1.0)))));
  CHECK_THROWS_AS(diffusion_params_1d(ModelSpec::tandem(ClockSpec::exponential(0.8), ClockSpec::exponential(1.0),
                                                        ClockSpec::exponential(1.0))),
                  std::invalid_argument);
}

TEST_CASE("JSQ with one server matches GG1 exactly") {
  auto u = ClockSpec::erlang(2, 1.4), s = ClockSpec::balanced_hyperexponential(1.0, 3.0);
  auto a = diffusion_params_1d(ModelSpec::gg1(u, s));
  auto b = diffusion_params_1d(ModelSpec::jsq(1, u, s));
  CHECK(a.theta == b.theta);
  CHECK(a.sigma2 == b.sigma2);
  CHECK(a.delta == b.delta);
}

TEST_CASE("degenerate diffusion is flagged") {
  auto p = diffusion_params_1d(ModelSpec::gg1(ClockSpec::deterministic(2.0), ClockSpec::deterministic(1.0)));
  CHECK(degenerate(p));
  CHECK_FALSE(degenerate(diffusion_params_1d(mm1(0.5))));
}

TEST_CASE("tandem drift modes") {
  // lambda 0.6, mu1 1, mu2 0.75: delta = (0.4, 0.2)
  auto model = ModelSpec::tandem(ClockSpec::exponential(0.6), ClockSpec::exponential(1.0),
                                 ClockSpec::exponential(0.75));
  auto g = tandem_params(model, DriftMode::GeneratorConsistent);
  const double d1 = 0.4, d2 = 0.2, m1 = 1.0, m2 = 0.75;
  auto sd = g.scaled_drift();
  CHECK(sd[0] == doctest::Approx(-m1 * d1 * d1));
  CHECK(sd[1] == doctest::Approx(d2 * (m1 * d1 - m2 * d2)));
  auto lit = tandem_params(model, DriftMode::PaperLiteral);
  CHECK(lit.drift()[0] == doctest::Approx(-m1));
  CHECK(lit.drift()[1] == doctest::Approx(m1 - m2));
  CHECK(drift_mode_name(DriftMode::PaperLiteral) == "paper_literal");
  CHECK(drift_mode_name(DriftMode::GeneratorConsistent) == "generator_consistent");
}

TEST_CASE("eps0 hand evaluation for M/M/1 at lambda 0.5") {
  EstimateCI cr;
  cr.point = 2.0;
  cr.half_width = 0.0;
  auto r = theorem1_bounds(mm1(0.5), BoundMode::Simulated, cr);
  CHECK(r.eps0 == doctest::Approx(2.0));
  CHECK(r.inputs.eu2 == doctest::Approx(8.0));
  CHECK(r.inputs.es2 == doctest::Approx(2.0));
  CHECK(r.total == doctest::Approx(r.eps0 + r.epsA + r.epsD));
  CHECK(r.eps0 >= 0);
  CHECK(r.epsA >= 0);
  CHECK(r.epsD >= 0);
  CHECK_THROWS_AS(theorem1_bounds(mm1(0.5), BoundMode::Simulated), std::invalid_argument);
}

TEST_CASE("crude mode substitutes the cruder residual bound") {
  auto model = ModelSpec::gg1(ClockSpec::erlang(2, 1.6), ClockSpec::exponential(1.0));
  auto r = theorem1_bounds(model, BoundMode::Crude);
  const double d = 0.2, lambda = 0.8;
  const double eu3 = 24.0 / std::pow(1.6, 3);
  CHECK(r.inputs.conditional_residual == doctest::Approx(std::pow(d, -0.5) * lambda * eu3 / 3.0));

  EstimateCI cr;
  cr.point = 1.0;
  cr.half_width = 0.1;
  auto s = theorem1_bounds(model, BoundMode::Simulated, cr);
  CHECK(s.inputs.conditional_residual == doctest::Approx(1.1));
  REQUIRE(r.inputs.conditional_residual > s.inputs.conditional_residual);
  CHECK(r.total >= s.total);
  CHECK(s.epsA == r.epsA);
  CHECK(s.epsD == r.epsD);
}

TEST_CASE("deterministic arrivals remove the cubic arrival term") {
  auto in = bound_inputs(ModelSpec::gg1(ClockSpec::deterministic(1.25), ClockSpec::exponential(1.0)));
  CHECK(in.abs_u3 == 0.0);
  CHECK(in.cu2 == 0.0);
}

TEST_CASE("bounds are monotone in the moment inputs") {
  auto base = bound_inputs(ModelSpec::gg1(ClockSpec::erlang(2, 1.8), ClockSpec::uniform(0.2, 1.8)));
  base.conditional_residual = 1.3;
  const auto ref = theorem1_bounds(base, BoundMode::Simulated);
  for (double BoundInputs::*field : {&BoundInputs::eu2, &BoundInputs::eu3, &BoundInputs::es2,
                                     &BoundInputs::abs_u3, &BoundInputs::abs_s3,
                                     &BoundInputs::conditional_residual}) {
    auto in = base;
    in.*field *= 1.1;
    in.*field += 1e-3;
    auto r = theorem1_bounds(in, BoundMode::Simulated);
    CHECK(r.eps0 >= ref.eps0);
    CHECK(r.epsA >= ref.epsA);
    CHECK(r.epsD >= ref.epsD);
    CHECK(r.total >= ref.total);
  }
}

TEST_CASE("state-space collapse quantity") {
  auto run = [](const ModelSpec& m, std::uint64_t events, std::uint64_t seed) {
    ProbeSet p;
    auto h = register_ssc(m, p);
    RunOptions o;
    o.total_events = events;
    o.seed = seed;
    return ssc_estimate(h, simulate(m, o, p));
  };
  auto one = run(ModelSpec::jsq(1, ClockSpec::exponential(0.8), ClockSpec::exponential(1.0)), 200'000, 61);
  CHECK(one.point == 0.0);

  auto lo = run(ModelSpec::jsq(2, ClockSpec::exponential(1.6), ClockSpec::exponential(1.0)), 2'000'000, 62);
  auto hi = run(ModelSpec::jsq(2, ClockSpec::exponential(1.9), ClockSpec::exponential(1.0)), 4'000'000, 63);
  CHECK(lo.point >= 0.0);
  CHECK(hi.point >= 0.0);
  INFO("rho 0.8 " << lo.point << " rho 0.95 " << hi.point);
  CHECK(hi.point < lo.point);

  ProbeSet p;
  CHECK_THROWS_AS(register_ssc(mm1(0.5), p), std::invalid_argument);
}
