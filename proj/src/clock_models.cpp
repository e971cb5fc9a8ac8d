#include "clockwork/clock_models.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace clockwork {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

void validate(const Exponential& e) { require(e.rate > 0 && std::isfinite(e.rate), "exponential: rate must be positive"); }

void validate(const Erlang& e) {
  require(e.shape >= 1, "erlang: shape must be a positive integer");
  require(e.rate > 0 && std::isfinite(e.rate), "erlang: rate must be positive");
}

void validate(const HyperExponential& h) {
  require(!h.probabilities.empty(), "hyperexponential: at least one phase required");
  require(h.probabilities.size() == h.rates.size(),
          "hyperexponential: probabilities and rates differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < h.rates.size(); ++i) {
    require(h.probabilities[i] >= 0.0, "hyperexponential: negative probability");
    require(h.rates[i] > 0 && std::isfinite(h.rates[i]), "hyperexponential: rates must be positive");
    total += h.probabilities[i];
  }
  require(std::abs(total - 1.0) <= 1e-12, "hyperexponential: probabilities must sum to 1");
}

void validate(const Uniform& u) {
  require(u.a >= 0.0 && u.b > u.a && std::isfinite(u.b), "uniform: need 0 <= a < b");
}

void validate(const LogNormal& l) {
  require(std::isfinite(l.location), "lognormal: location must be finite");
  require(l.scale > 0 && std::isfinite(l.scale), "lognormal: scale must be positive");
}

void validate(const Deterministic& d) {
  require(d.value > 0 && std::isfinite(d.value), "deterministic: value must be positive");
}

double factorial(int m) {
  double out = 1.0;
  for (int i = 2; i <= m; ++i) out *= i;
  return out;
}

// Density on (0, inf) for the families integrated numerically.
double density(const ClockSpec::Family& family, double x) {
  return std::visit(
      Overloaded{
          [x](const Exponential& e) { return e.rate * std::exp(-e.rate * x); },
          [x](const Erlang& e) {
            return std::exp(e.shape * std::log(e.rate) + (e.shape - 1) * std::log(x) -
                            e.rate * x - std::lgamma(e.shape));
          },
          [x](const HyperExponential& h) {
            double p = 0.0;
            for (std::size_t i = 0; i < h.rates.size(); ++i)
              p += h.probabilities[i] * h.rates[i] * std::exp(-h.rates[i] * x);
            return p;
          },
          [x](const Uniform& u) { return (x >= u.a && x <= u.b) ? 1.0 / (u.b - u.a) : 0.0; },
          [x](const LogNormal& l) {
            const double z = (std::log(x) - l.location) / l.scale;
            return std::exp(-0.5 * z * z) / (x * l.scale * std::sqrt(2.0 * std::numbers::pi));
          },
          [](const Deterministic&) -> double {
            throw std::logic_error("deterministic clock has no density");
          },
      },
      family);
}

}  // namespace

ClockSpec::ClockSpec(Family family) : family_(std::move(family)) {
  std::visit([](const auto& f) { validate(f); }, family_);
}

ClockSpec ClockSpec::balanced_hyperexponential(double mean, double scv) {
  require(mean > 0, "hyperexponential: mean must be positive");
  require(scv >= 1.0, "balanced hyperexponential requires scv >= 1");
  const double p1 = 0.5 * (1.0 + std::sqrt((scv - 1.0) / (scv + 1.0)));
  const double p2 = 1.0 - p1;
  return hyperexponential({p1, p2}, {2.0 * p1 / mean, 2.0 * p2 / mean});
}

std::string_view ClockSpec::family_name() const {
  return std::visit(Overloaded{
                        [](const Exponential&) { return std::string_view("exponential"); },
                        [](const Erlang&) { return std::string_view("erlang"); },
                        [](const HyperExponential&) { return std::string_view("hyperexponential"); },
                        [](const Uniform&) { return std::string_view("uniform"); },
                        [](const LogNormal&) { return std::string_view("lognormal"); },
                        [](const Deterministic&) { return std::string_view("deterministic"); },
                    },
                    family_);
}

std::string ClockSpec::describe() const {
  return std::visit(
      Overloaded{
          [](const Exponential& e) { return fmt::format("Exp({:g})", e.rate); },
          [](const Erlang& e) { return fmt::format("Erlang({},{:g})", e.shape, e.rate); },
          [](const HyperExponential& h) {
            std::string s = "H" + std::to_string(h.rates.size()) + "(";
            for (std::size_t i = 0; i < h.rates.size(); ++i)
              s += fmt::format("{}{:g}@{:g}", i ? "," : "", h.probabilities[i], h.rates[i]);
            return s + ")";
          },
          [](const Uniform& u) { return fmt::format("U({:g},{:g})", u.a, u.b); },
          [](const LogNormal& l) { return fmt::format("LN({:g},{:g})", l.location, l.scale); },
          [](const Deterministic& d) { return fmt::format("D({:g})", d.value); },
      },
      family_);
}

double ClockSpec::sample(RandomStream& stream) const {
  return std::visit(
      Overloaded{
          [&](const Exponential& e) { return -std::log(stream.uniform()) / e.rate; },
          [&](const Erlang& e) {
            double log_sum = 0.0;
            for (int i = 0; i < e.shape; ++i) log_sum += std::log(stream.uniform());
            return -log_sum / e.rate;
          },
          [&](const HyperExponential& h) {
            const double u = stream.uniform();
            std::size_t phase = h.rates.size() - 1;
            double cumulative = 0.0;
            for (std::size_t i = 0; i + 1 < h.rates.size(); ++i) {
              cumulative += h.probabilities[i];
              if (u < cumulative) {
                phase = i;
                break;
              }
            }
            return -std::log(stream.uniform()) / h.rates[phase];
          },
          [&](const Uniform& u) { return u.a + (u.b - u.a) * stream.uniform(); },
          [&](const LogNormal& l) {
            return std::exp(l.location + l.scale * stream.standard_normal());
          },
          [](const Deterministic& d) { return d.value; },
      },
      family_);
}

double ClockSpec::moment(int m) const {
  if (m < 1 || m > 3) throw std::invalid_argument("ClockSpec::moment: m must be 1, 2 or 3");
  return std::visit(
      Overloaded{
          [m](const Exponential& e) { return factorial(m) / std::pow(e.rate, m); },
          [m](const Erlang& e) {
            double rising = 1.0;
            for (int i = 0; i < m; ++i) rising *= e.shape + i;
            return rising / std::pow(e.rate, m);
          },
          [m](const HyperExponential& h) {
            double out = 0.0;
            for (std::size_t i = 0; i < h.rates.size(); ++i)
              out += h.probabilities[i] * factorial(m) / std::pow(h.rates[i], m);
            return out;
          },
          [m](const Uniform& u) {
            return (std::pow(u.b, m + 1) - std::pow(u.a, m + 1)) / ((m + 1) * (u.b - u.a));
          },
          [m](const LogNormal& l) {
            return std::exp(m * l.location + 0.5 * m * m * l.scale * l.scale);
          },
          [m](const Deterministic& d) { return std::pow(d.value, m); },
      },
      family_);
}

double ClockSpec::scv() const {
  // closed forms where they exist; the moment ratio loses the last bit
  return std::visit(
      Overloaded{
          [](const Exponential&) { return 1.0; },
          [](const Erlang& e) { return 1.0 / e.shape; },
          [this](const HyperExponential&) {
            const double m1 = moment(1);
            return moment(2) / (m1 * m1) - 1.0;
          },
          [](const Uniform& u) {
            const double r = (u.b - u.a) / (u.a + u.b);
            return r * r / 3.0;
          },
          [](const LogNormal& l) { return std::expm1(l.scale * l.scale); },
          [](const Deterministic&) { return 0.0; },
      },
      family_);
}

double ClockSpec::abs_centered_cubed() const {
  if (is_deterministic()) return 0.0;
  if (std::holds_alternative<Exponential>(family_)) return 12.0 / std::numbers::e - 2.0;
  const double m = mean();
  if (const auto* u = std::get_if<Uniform>(&family_)) {
    // X/EX is uniform on [1 - w, 1 + w].
    const double w = (u->b - u->a) / (u->a + u->b);
    return w * w * w / 4.0;
  }
  // E|1-Y|^3 = E(Y-1)^3 + 2 E[(1-Y)^3; Y < 1] with Y = X/EX; the second term
  // lives on the compact interval [0, EX].
  const double skew_part = moment(3) / (m * m * m) - 3.0 * moment(2) / (m * m) + 2.0;
  auto left_tail = [&](double x) {
    const double d = 1.0 - x / m;
    return d * d * d * density(family_, x);
  };
  const double lower = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      left_tail, 0.0, m, 20, 1e-10);
  return skew_part + 2.0 * lower;
}

ClockSpec ClockSpec::scaled(double factor) const {
  require(factor > 0 && std::isfinite(factor), "ClockSpec::scaled: factor must be positive");
  return std::visit(
      Overloaded{
          [factor](const Exponential& e) { return ClockSpec(Exponential{e.rate / factor}); },
          [factor](const Erlang& e) { return ClockSpec(Erlang{e.shape, e.rate / factor}); },
          [factor](const HyperExponential& h) {
            HyperExponential out = h;
            for (double& r : out.rates) r /= factor;
            return ClockSpec(out);
          },
          [factor](const Uniform& u) { return ClockSpec(Uniform{u.a * factor, u.b * factor}); },
          [factor](const LogNormal& l) {
            return ClockSpec(LogNormal{l.location + std::log(factor), l.scale});
          },
          [factor](const Deterministic& d) { return ClockSpec(Deterministic{d.value * factor}); },
      },
      family_);
}

}  // namespace clockwork
