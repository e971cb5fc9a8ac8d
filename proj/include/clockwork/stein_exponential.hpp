#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "clockwork/random_stream.hpp"
#include "clockwork/test_functions.hpp"

namespace clockwork {

struct DiffusionParams1D {
  double theta = 0.0;
  double sigma2 = 0.0;
  double delta = 0.0;

  double beta() const { return 2.0 * theta / sigma2; }
  double stationary_mean() const { return 1.0 / beta(); }
};

/// Continuous piecewise-linear h: value h(0), breakpoints b_1 < ... < b_m
/// and slopes s_0 (left of b_1, also used for x < 0) through s_m.
class PiecewiseLinear {
 public:
  PiecewiseLinear(double value_at_zero, std::vector<double> breakpoints, std::vector<double> slopes,
                  std::string name = "h");

  static PiecewiseLinear identity();
  static PiecewiseLinear constant(double c);
  static PiecewiseLinear min_with(double c);
  /// Random Lipschitz-1 h with `pieces` breakpoints in (0, span).
  static PiecewiseLinear random_lip1(RandomStream& rng, std::size_t pieces, double span);

  double operator()(double x) const;
  /// Right derivative.
  double slope_at(double x) const;
  double lipschitz() const;
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& slopes() const { return slopes_; }
  const std::string& name() const { return name_; }

  /// Integral over [0, x] (signed for x < 0).
  double integral_from_zero(double x) const;
  /// E h(x + Y) with Y ~ Exp(beta).
  double shifted_expectation(double x, double beta) const;
  /// E h'(x + Y) with Y ~ Exp(beta).
  double shifted_slope_expectation(double x, double beta) const;

 private:
  double value_at_zero_;
  std::vector<double> breaks_;
  std::vector<double> slopes_;
  std::vector<double> values_;  // h at each breakpoint
  std::string name_;
};

/// Solution of -theta f' + sigma2/2 f'' = E h(Y) - h, f'(0) = 0, f(0) = 0.
class SteinSolution {
 public:
  SteinSolution(PiecewiseLinear h, DiffusionParams1D params);

  const PiecewiseLinear& h() const { return h_; }
  const DiffusionParams1D& params() const { return params_; }
  double mean_h() const { return mean_h_; }

  double f(double x) const;
  double f1(double x) const;
  double f2(double x) const;
  double f3(double x) const;

  /// Wraps the solution with the Stein-factor sup bounds 1/theta and 4/sigma2.
  TestFunction1D as_test_function() const;

 private:
  PiecewiseLinear h_;
  DiffusionParams1D params_;
  double beta_;
  double mean_h_;
};

/// Rejects sigma2 <= 0 or theta <= 0.
SteinSolution solve_poisson(const PiecewiseLinear& h, const DiffusionParams1D& params);

/// [0, 40/beta] with `points` equispaced nodes plus h's breakpoints (and
/// points just left of them).
std::vector<double> default_grid(const SteinSolution& sol, std::size_t points = 10'001);

struct SteinFactors {
  double sup_f2 = 0.0;
  double sup_f3 = 0.0;
};
SteinFactors stein_factors(const SteinSolution& sol, const std::vector<double>& grid);

/// max over grid of |-theta f' + sigma2/2 f'' - (E h(Y) - h)|.
double ode_residual(const SteinSolution& sol, const std::vector<double>& grid);

/// -theta f'(x) + sigma2/2 f''(x) + theta f'(0).
double generator_apply(const DiffusionParams1D& p, const TestFunction1D& f, double x);

/// Tandem diffusion generator in scaled coordinates, boundary terms included.
struct TandemGeneratorInputs {
  double lambda, mu1, mu2, delta1, delta2, cu2, cs1, cs2;
};
double generator_apply(const TandemGeneratorInputs& p, const TestFunction2D& f, double x1, double x2);

/// CSV dump x,f,f1,f2,f3.
void write_solution_grid(std::ostream& out, const SteinSolution& sol, const std::vector<double>& grid);

}  // namespace clockwork
