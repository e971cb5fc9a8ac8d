#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "clockwork/test_functions.hpp"

using namespace clockwork;

namespace {

// central difference
template <class F>
double fd(F f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

const std::vector<double> kPoints{-2.5, -0.7, 0.0, 0.3, 1.1, 2.9};

}  // namespace

TEST_CASE("1D derivatives agree with finite differences") {
  auto lib = test_functions::library_1d();
  REQUIRE(lib.size() == 6);
  for (const auto& t : lib) {
    INFO(t.name);
    for (double x : kPoints) {
      CHECK(t.f1(x) == doctest::Approx(fd(t.f, x)).epsilon(1e-6));
      CHECK(t.f2(x) == doctest::Approx(fd(t.f1, x)).epsilon(1e-6));
      CHECK(t.f3(x) == doctest::Approx(fd(t.f2, x)).epsilon(1e-6));
    }
  }
}

TEST_CASE("declared sup norms dominate a dense scan and are nearly attained") {
  for (const auto& t : test_functions::library_1d()) {
    INFO(t.name);
    double m2 = 0.0, m3 = 0.0;
    for (double x = -20.0; x <= 20.0; x += 1e-3) {
      m2 = std::max(m2, std::abs(t.f2(x)));
      m3 = std::max(m3, std::abs(t.f3(x)));
    }
    if (t.sup_f2) {
      CHECK(m2 <= *t.sup_f2 * (1 + 1e-9));
      CHECK(m2 >= *t.sup_f2 * 0.999);
    }
    if (t.sup_f3) {
      CHECK(m3 <= *t.sup_f3 * (1 + 1e-9));
      CHECK(m3 >= *t.sup_f3 * 0.999 - 1e-12);
    }
  }
  auto tanh = test_functions::find_1d("tanh");
  REQUIRE(tanh);
  CHECK(*tanh->sup_f2 == doctest::Approx(4.0 / (3.0 * std::sqrt(3.0))));
  CHECK_FALSE(test_functions::find_1d("nope"));
}

TEST_CASE("2D partials agree with finite differences") {
  auto lib = test_functions::library_2d();
  REQUIRE(lib.size() >= 6);
  for (const auto& t : lib) {
    INFO(t.name);
    for (double x : {0.0, 0.4, 1.7})
      for (double y : {0.0, 0.9, 2.2}) {
        CHECK(t.d1(x, y) == doctest::Approx(fd([&](double u) { return t.f(u, y); }, x)).epsilon(1e-6));
        CHECK(t.d2(x, y) == doctest::Approx(fd([&](double u) { return t.f(x, u); }, y)).epsilon(1e-6));
        CHECK(t.d11(x, y) == doctest::Approx(fd([&](double u) { return t.d1(u, y); }, x)).epsilon(1e-6));
        CHECK(t.d12(x, y) == doctest::Approx(fd([&](double u) { return t.d1(x, u); }, y)).epsilon(1e-6));
        CHECK(t.d22(x, y) == doctest::Approx(fd([&](double u) { return t.d2(x, u); }, y)).epsilon(1e-6));
      }
  }
}

TEST_CASE("state functions: clock partials agree with finite differences") {
  const std::vector<ModelSpec> models{
      ModelSpec::gg1(ClockSpec::exponential(0.8), ClockSpec::exponential(1.0)),
      ModelSpec::jsq(3, ClockSpec::exponential(2.4), ClockSpec::exponential(1.0)),
      ModelSpec::tandem(ClockSpec::exponential(0.8), ClockSpec::exponential(1.0), ClockSpec::exponential(1.0))};
  for (const auto& model : models) {
    auto lib = test_functions::library_state(model);
    CHECK(lib.size() >= 6);
    SystemState z = model.empty_state();
    for (std::size_t i = 0; i < model.stations(); ++i) {
      z.queues[i] = static_cast<std::int64_t>(i + 2);
      z.r_s[i] = 0.4 + 0.3 * static_cast<double>(i);
    }
    z.r_a = 0.9;
    for (const auto& t : lib) {
      INFO(model.describe() << " " << t.name);
      const double h = 1e-5;
      SystemState up = z, dn = z;
      up.r_a += h;
      dn.r_a -= h;
      CHECK(t.d_ra(z) == doctest::Approx((t.f(up) - t.f(dn)) / (2 * h)).epsilon(1e-6));
      for (std::size_t i = 0; i < model.stations(); ++i) {
        SystemState a = z, b = z;
        a.r_s[i] += h;
        b.r_s[i] -= h;
        CHECK(t.d_rs(z, i) == doctest::Approx((t.f(a) - t.f(b)) / (2 * h)).epsilon(1e-6));
      }
    }
  }
}
