#include "clockwork/stein_exponential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace clockwork {

PiecewiseLinear::PiecewiseLinear(double value_at_zero, std::vector<double> breakpoints,
                                 std::vector<double> slopes, std::string name)
    : value_at_zero_(value_at_zero),
      breaks_(std::move(breakpoints)),
      slopes_(std::move(slopes)),
      name_(std::move(name)) {
  if (slopes_.size() != breaks_.size() + 1)
    throw std::invalid_argument("piecewise linear: need one more slope than breakpoints");
  for (std::size_t k = 0; k < breaks_.size(); ++k) {
    if (!(breaks_[k] > 0.0)) throw std::invalid_argument("piecewise linear: breakpoints must be > 0");
    if (k > 0 && !(breaks_[k] > breaks_[k - 1]))
      throw std::invalid_argument("piecewise linear: breakpoints must increase");
  }
  double v = value_at_zero_, prev = 0.0;
  for (std::size_t k = 0; k < breaks_.size(); ++k) {
    v += slopes_[k] * (breaks_[k] - prev);
    values_.push_back(v);
    prev = breaks_[k];
  }
}

PiecewiseLinear PiecewiseLinear::identity() { return PiecewiseLinear(0.0, {}, {1.0}, "identity"); }

PiecewiseLinear PiecewiseLinear::constant(double c) {
  return PiecewiseLinear(c, {}, {0.0}, fmt::format("constant({})", c));
}

PiecewiseLinear PiecewiseLinear::min_with(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("min_with: c must be positive");
  return PiecewiseLinear(0.0, {c}, {1.0, 0.0}, fmt::format("min(x,{})", c));
}

PiecewiseLinear PiecewiseLinear::random_lip1(RandomStream& rng, std::size_t pieces, double span) {
  std::vector<double> b;
  for (std::size_t k = 0; k < pieces; ++k) b.push_back(span * rng.uniform());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  std::vector<double> s;
  for (std::size_t k = 0; k <= b.size(); ++k) s.push_back(2.0 * rng.uniform() - 1.0);
  return PiecewiseLinear(2.0 * rng.uniform() - 1.0, std::move(b), std::move(s), "random_lip1");
}

double PiecewiseLinear::operator()(double x) const {
  if (breaks_.empty() || x <= breaks_.front()) return value_at_zero_ + slopes_[0] * x;
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  std::size_t k = static_cast<std::size_t>(it - breaks_.begin());  // x in [b_{k-1}, b_k)
  return values_[k - 1] + slopes_[k] * (x - breaks_[k - 1]);
}

double PiecewiseLinear::slope_at(double x) const {
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  return slopes_[static_cast<std::size_t>(it - breaks_.begin())];
}

double PiecewiseLinear::lipschitz() const {
  double m = 0.0;
  for (double s : slopes_) m = std::max(m, std::abs(s));
  return m;
}

double PiecewiseLinear::integral_from_zero(double x) const {
  if (x <= 0.0 || breaks_.empty() || x <= breaks_.front())
    return value_at_zero_ * x + 0.5 * slopes_[0] * x * x;
  double total = 0.0, lo = 0.0, v = value_at_zero_;
  for (std::size_t k = 0; k <= breaks_.size(); ++k) {
    double hi = k < breaks_.size() ? std::min(breaks_[k], x) : x;
    double w = hi - lo;
    total += v * w + 0.5 * slopes_[k] * w * w;
    if (k == breaks_.size() || x <= breaks_[k]) break;
    v = values_[k];
    lo = breaks_[k];
  }
  return total;
}

// Pieces of h on [x, inf): each as (u, v, a, b) with h(t) = a + b t on [u, v).
namespace {

struct Piece {
  double u, v, a, b;
};

template <class Fn>
void for_each_piece_from(const std::vector<double>& breaks, const std::vector<double>& slopes,
                         const std::vector<double>& values, double h0, double x, Fn&& fn) {
  const double inf = std::numeric_limits<double>::infinity();
  // piece 0: (-inf, b_1) with h = h0 + s0 t
  double lo = -inf;
  for (std::size_t k = 0; k <= breaks.size(); ++k) {
    double hi = k < breaks.size() ? breaks[k] : inf;
    if (hi > x) {
      double a = k == 0 ? h0 : values[k - 1] - slopes[k] * breaks[k - 1];
      fn(Piece{std::max(lo, x), hi, a, slopes[k]});
    }
    lo = hi;
  }
}

}  // namespace

double PiecewiseLinear::shifted_expectation(double x, double beta) const {
  // int_u^v (a + b t) beta e^{-beta (t - x)} dt = P(v) - P(u),
  // P(t) = -e^{-beta (t - x)} (a + b t + b / beta)
  double total = 0.0;
  for_each_piece_from(breaks_, slopes_, values_, value_at_zero_, x, [&](const Piece& p) {
    auto prim = [&](double t) {
      if (std::isinf(t)) return 0.0;
      return -std::exp(-beta * (t - x)) * (p.a + p.b * t + p.b / beta);
    };
    total += prim(p.v) - prim(p.u);
  });
  return total;
}

double PiecewiseLinear::shifted_slope_expectation(double x, double beta) const {
  double total = 0.0;
  for_each_piece_from(breaks_, slopes_, values_, value_at_zero_, x, [&](const Piece& p) {
    double eu = std::exp(-beta * (p.u - x));
    double ev = std::isinf(p.v) ? 0.0 : std::exp(-beta * (p.v - x));
    total += p.b * (eu - ev);
  });
  return total;
}

SteinSolution::SteinSolution(PiecewiseLinear h, DiffusionParams1D params)
    : h_(std::move(h)), params_(params), beta_(params.beta()), mean_h_(h_.shifted_expectation(0.0, beta_)) {}

double SteinSolution::f1(double x) const {
  return (h_.shifted_expectation(x, beta_) - mean_h_) / params_.theta;
}

double SteinSolution::f2(double x) const { return h_.shifted_slope_expectation(x, beta_) / params_.theta; }

double SteinSolution::f3(double x) const {
  return (2.0 / params_.sigma2) * (-h_.slope_at(x) + params_.theta * f2(x));
}

double SteinSolution::f(double x) const {
  const double hx = h_.shifted_expectation(x, beta_);
  return (h_.integral_from_zero(x) + (hx - mean_h_) / beta_ - x * mean_h_) / params_.theta;
}

TestFunction1D SteinSolution::as_test_function() const {
  auto self = std::make_shared<SteinSolution>(*this);
  return {"stein[" + h_.name() + "]",
          [self](double x) { return self->f(x); },
          [self](double x) { return self->f1(x); },
          [self](double x) { return self->f2(x); },
          [self](double x) { return self->f3(x); },
          1.0 / params_.theta,
          4.0 / params_.sigma2};
}

SteinSolution solve_poisson(const PiecewiseLinear& h, const DiffusionParams1D& params) {
  if (!(params.sigma2 > 0.0))
    throw std::invalid_argument("solve_poisson: sigma2 = 0, the diffusion approximation degenerates");
  if (!(params.theta > 0.0)) throw std::invalid_argument("solve_poisson: theta must be positive");
  return SteinSolution(h, params);
}

std::vector<double> default_grid(const SteinSolution& sol, std::size_t points) {
  const double top = 40.0 / sol.params().beta();
  std::vector<double> g;
  g.reserve(points + 2 * sol.h().breakpoints().size());
  for (std::size_t k = 0; k < points; ++k)
    g.push_back(top * static_cast<double>(k) / static_cast<double>(points - 1));
  for (double b : sol.h().breakpoints()) {
    g.push_back(b);
    g.push_back(std::nextafter(b, 0.0));
  }
  std::sort(g.begin(), g.end());
  return g;
}

SteinFactors stein_factors(const SteinSolution& sol, const std::vector<double>& grid) {
  SteinFactors s;
  for (double x : grid) {
    s.sup_f2 = std::max(s.sup_f2, std::abs(sol.f2(x)));
    s.sup_f3 = std::max(s.sup_f3, std::abs(sol.f3(x)));
  }
  return s;
}

double ode_residual(const SteinSolution& sol, const std::vector<double>& grid) {
  const auto& p = sol.params();
  double worst = 0.0;
  for (double x : grid) {
    double r = -p.theta * sol.f1(x) + 0.5 * p.sigma2 * sol.f2(x) - (sol.mean_h() - sol.h()(x));
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

double generator_apply(const DiffusionParams1D& p, const TestFunction1D& f, double x) {
  return -p.theta * f.f1(x) + 0.5 * p.sigma2 * f.f2(x) + p.theta * f.f1(0.0);
}

double generator_apply(const TandemGeneratorInputs& p, const TestFunction2D& f, double x1, double x2) {
  const double d1 = p.delta1, d2 = p.delta2;
  double g = -p.mu1 * d1 * d1 * f.d1(x1, x2) + d2 * (p.mu1 * d1 - p.mu2 * d2) * f.d2(x1, x2) +
             0.5 * d1 * d1 * (p.lambda * p.cu2 + p.mu1 * p.cs1) * f.d11(x1, x2) -
             d1 * d2 * p.mu1 * p.cs1 * f.d12(x1, x2) +
             0.5 * d2 * d2 * (p.mu1 * p.cs1 + p.mu2 * p.cs2) * f.d22(x1, x2);
  if (x1 == 0.0) g += p.mu1 * (d1 * f.d1(x1, x2) - d2 * f.d2(x1, x2));
  if (x2 == 0.0) g += p.mu2 * d2 * f.d2(x1, x2);
  return g;
}

void write_solution_grid(std::ostream& out, const SteinSolution& sol, const std::vector<double>& grid) {
  out << "x,f,f1,f2,f3\n";
  for (double x : grid)
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", x, sol.f(x), sol.f1(x), sol.f2(x),
                       sol.f3(x));
}

}  // namespace clockwork
