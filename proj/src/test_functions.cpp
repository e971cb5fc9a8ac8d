#include "clockwork/test_functions.hpp"

#include <cmath>

namespace clockwork::test_functions {

TestFunction1D linear() {
  return {"linear",
          [](double x) { return x; },
          [](double) { return 1.0; },
          [](double) { return 0.0; },
          [](double) { return 0.0; },
          0.0,
          0.0};
}

TestFunction1D quadratic() {
  return {"quadratic",
          [](double x) { return 0.5 * x * x; },
          [](double x) { return x; },
          [](double) { return 1.0; },
          [](double) { return 0.0; },
          1.0,
          0.0};
}

TestFunction1D tanh_fn() {
  // t = tanh x: f' = 1 - t^2, f'' = -2t(1 - t^2), f''' = -2(1 - t^2)(1 - 3t^2)
  return {"tanh",
          [](double x) { return std::tanh(x); },
          [](double x) {
            double t = std::tanh(x);
            return 1.0 - t * t;
          },
          [](double x) {
            double t = std::tanh(x);
            return -2.0 * t * (1.0 - t * t);
          },
          [](double x) {
            double t = std::tanh(x);
            return -2.0 * (1.0 - t * t) * (1.0 - 3.0 * t * t);
          },
          4.0 / (3.0 * std::sqrt(3.0)),
          2.0};
}

TestFunction1D gaussian_bump() {
  return {"gaussian",
          [](double x) { return std::exp(-0.5 * x * x); },
          [](double x) { return -x * std::exp(-0.5 * x * x); },
          [](double x) { return (x * x - 1.0) * std::exp(-0.5 * x * x); },
          [](double x) { return (3.0 * x - x * x * x) * std::exp(-0.5 * x * x); },
          1.0,
          // max of |3x - x^3| e^{-x^2/2} at x^2 = 3 - sqrt(6)
          [] {
            double x = std::sqrt(3.0 - std::sqrt(6.0));
            return (3.0 * x - x * x * x) * std::exp(-0.5 * x * x);
          }()};
}

TestFunction1D softplus() {
  auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  return {"softplus",
          [](double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); },
          sig,
          [sig](double x) {
            double s = sig(x);
            return s * (1.0 - s);
          },
          [sig](double x) {
            double s = sig(x);
            return s * (1.0 - s) * (1.0 - 2.0 * s);
          },
          0.25,
          1.0 / (6.0 * std::sqrt(3.0))};
}

TestFunction1D sine() {
  return {"sine",
          [](double x) { return std::sin(x); },
          [](double x) { return std::cos(x); },
          [](double x) { return -std::sin(x); },
          [](double x) { return -std::cos(x); },
          1.0,
          1.0};
}

std::vector<TestFunction1D> library_1d() {
  return {linear(), quadratic(), tanh_fn(), gaussian_bump(), softplus(), sine()};
}

std::optional<TestFunction1D> find_1d(const std::string& name) {
  for (auto& f : library_1d())
    if (f.name == name) return f;
  return std::nullopt;
}

std::vector<TestFunction2D> library_2d() {
  std::vector<TestFunction2D> out;
  out.push_back({"sum", [](double a, double b) { return a + b; }, [](double, double) { return 1.0; },
                 [](double, double) { return 1.0; }, [](double, double) { return 0.0; },
                 [](double, double) { return 0.0; }, [](double, double) { return 0.0; }});
  out.push_back({"product", [](double a, double b) { return a * b; },
                 [](double, double b) { return b; }, [](double a, double) { return a; },
                 [](double, double) { return 0.0; }, [](double, double) { return 1.0; },
                 [](double, double) { return 0.0; }});
  out.push_back({"quadratic", [](double a, double b) { return 0.5 * (a * a + b * b); },
                 [](double a, double) { return a; }, [](double, double b) { return b; },
                 [](double, double) { return 1.0; }, [](double, double) { return 0.0; },
                 [](double, double) { return 1.0; }});
  out.push_back({"tanh_x1", [](double a, double) { return std::tanh(a); },
                 [](double a, double) {
                   double t = std::tanh(a);
                   return 1.0 - t * t;
                 },
                 [](double, double) { return 0.0; },
                 [](double a, double) {
                   double t = std::tanh(a);
                   return -2.0 * t * (1.0 - t * t);
                 },
                 [](double, double) { return 0.0; }, [](double, double) { return 0.0; }});
  out.push_back({"tanh_x2", [](double, double b) { return std::tanh(b); },
                 [](double, double) { return 0.0; },
                 [](double, double b) {
                   double t = std::tanh(b);
                   return 1.0 - t * t;
                 },
                 [](double, double) { return 0.0; }, [](double, double) { return 0.0; },
                 [](double, double b) {
                   double t = std::tanh(b);
                   return -2.0 * t * (1.0 - t * t);
                 }});
  out.push_back({"sin_diff", [](double a, double b) { return std::sin(a - b); },
                 [](double a, double b) { return std::cos(a - b); },
                 [](double a, double b) { return -std::cos(a - b); },
                 [](double a, double b) { return -std::sin(a - b); },
                 [](double a, double b) { return std::sin(a - b); },
                 [](double a, double b) { return -std::sin(a - b); }});
  return out;
}

namespace {

double sum_rs(const SystemState& z) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.stations; ++i) s += z.r_s[i];
  return s;
}

double sum_rs_sq(const SystemState& z) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.stations; ++i) s += z.r_s[i] * z.r_s[i];
  return s;
}

std::vector<StateTestFunction> single_class(const ModelSpec& model) {
  const double d = model.delta();
  auto x = [d](const SystemState& z) { return d * static_cast<double>(z.total_queue()); };
  auto zero = [](const SystemState&) { return 0.0; };
  auto zero_i = [](const SystemState&, std::size_t) { return 0.0; };

  std::vector<StateTestFunction> out;
  out.push_back({"r_a", [](const SystemState& z) { return z.r_a; },
                 [](const SystemState&) { return 1.0; }, zero_i});
  out.push_back({"x", x, zero, zero_i});
  out.push_back({"r_a*r_s", [](const SystemState& z) { return z.r_a * sum_rs(z); },
                 [](const SystemState& z) { return sum_rs(z); },
                 [](const SystemState& z, std::size_t) { return z.r_a; }});
  out.push_back({"r_a^2", [](const SystemState& z) { return z.r_a * z.r_a; },
                 [](const SystemState& z) { return 2.0 * z.r_a; }, zero_i});
  out.push_back({"r_s^2", [](const SystemState& z) { return sum_rs_sq(z); }, zero,
                 [](const SystemState& z, std::size_t i) { return 2.0 * z.r_s[i]; }});
  out.push_back({"x*r_s", [x](const SystemState& z) { return x(z) * sum_rs(z); }, zero,
                 [x](const SystemState& z, std::size_t) { return x(z); }});
  out.push_back({"tanh(x+r_a)", [x](const SystemState& z) { return std::tanh(x(z) + z.r_a); },
                 [x](const SystemState& z) {
                   double t = std::tanh(x(z) + z.r_a);
                   return 1.0 - t * t;
                 },
                 zero_i});
  return out;
}

std::vector<StateTestFunction> tandem(const ModelSpec& model) {
  const double d1 = model.delta(0);
  const double d2 = model.delta(1);
  auto x1 = [d1](const SystemState& z) { return d1 * static_cast<double>(z.queues[0]); };
  auto x2 = [d2](const SystemState& z) { return d2 * static_cast<double>(z.queues[1]); };
  auto zero = [](const SystemState&) { return 0.0; };
  auto zero_i = [](const SystemState&, std::size_t) { return 0.0; };

  std::vector<StateTestFunction> out;
  out.push_back({"r_a", [](const SystemState& z) { return z.r_a; },
                 [](const SystemState&) { return 1.0; }, zero_i});
  out.push_back({"x1+x2", [x1, x2](const SystemState& z) { return x1(z) + x2(z); }, zero, zero_i});
  out.push_back({"r_s1*r_s2", [](const SystemState& z) { return z.r_s[0] * z.r_s[1]; }, zero,
                 [](const SystemState& z, std::size_t i) { return z.r_s[1 - i]; }});
  out.push_back({"r_a*r_s1", [](const SystemState& z) { return z.r_a * z.r_s[0]; },
                 [](const SystemState& z) { return z.r_s[0]; },
                 [](const SystemState& z, std::size_t i) { return i == 0 ? z.r_a : 0.0; }});
  out.push_back({"x2*r_s2", [x2](const SystemState& z) { return x2(z) * z.r_s[1]; }, zero,
                 [x2](const SystemState& z, std::size_t i) { return i == 1 ? x2(z) : 0.0; }});
  out.push_back({"r_s1^2", [](const SystemState& z) { return z.r_s[0] * z.r_s[0]; }, zero,
                 [](const SystemState& z, std::size_t i) { return i == 0 ? 2.0 * z.r_s[0] : 0.0; }});
  out.push_back({"tanh(x1+r_s2)",
                 [x1](const SystemState& z) { return std::tanh(x1(z) + z.r_s[1]); }, zero,
                 [x1](const SystemState& z, std::size_t i) {
                   if (i != 1) return 0.0;
                   double t = std::tanh(x1(z) + z.r_s[1]);
                   return 1.0 - t * t;
                 }});
  return out;
}

}  // namespace

std::vector<StateTestFunction> library_state(const ModelSpec& model) {
  return model.topology() == Topology::Tandem2 ? tandem(model) : single_class(model);
}

}  // namespace clockwork::test_functions
