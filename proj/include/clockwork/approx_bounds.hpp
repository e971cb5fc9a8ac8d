#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>

#include "clockwork/model.hpp"
#include "clockwork/palm_estimators.hpp"
#include "clockwork/stein_exponential.hpp"

namespace clockwork {

enum class DriftMode { PaperLiteral, GeneratorConsistent };
std::string_view drift_mode_name(DriftMode m);

using Matrix2 = std::array<std::array<double, 2>, 2>;
using Vector2 = std::array<double, 2>;

/// Two-dimensional SRBM for the tandem: drift, covariance Sigma, reflection R,
/// and Y = diag(delta) Y~.
struct TandemRBMParams {
  Vector2 delta{};
  Vector2 mu{};
  Matrix2 sigma{};
  Matrix2 reflection{{{1.0, 0.0}, {-1.0, 1.0}}};
  DriftMode drift_mode = DriftMode::GeneratorConsistent;

  /// PaperLiteral: -R mu. GeneratorConsistent: -R (delta1 mu1, delta2 mu2).
  Vector2 drift() const;
  /// diag(delta) times drift().
  Vector2 scaled_drift() const;
};

using DiffusionParams = std::variant<DiffusionParams1D, TandemRBMParams>;

/// GG1: theta = mu d^2, sigma2 = d^2 (lambda cU2 + mu cS2); JSQ: n mu d^2 and
/// d^2 (lambda cU2 + n mu cS2); tandem: TandemRBMParams.
DiffusionParams diffusion_params(const ModelSpec& model,
                                 DriftMode mode = DriftMode::GeneratorConsistent);
/// Throws for the tandem.
DiffusionParams1D diffusion_params_1d(const ModelSpec& model);
TandemRBMParams tandem_params(const ModelSpec& model, DriftMode mode = DriftMode::GeneratorConsistent);
/// True when sigma2 = 0 and the Stein pipeline is unavailable.
bool degenerate(const DiffusionParams1D& p);

enum class BoundMode { Crude, Simulated };
std::string_view bound_mode_name(BoundMode m);

struct BoundInputs {
  double delta = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  double cu2 = 0.0;
  double cs2 = 0.0;
  double eu2 = 0.0;
  double eu3 = 0.0;
  double es2 = 0.0;
  double abs_u3 = 0.0;  // E|1 - lambda U|^3
  double abs_s3 = 0.0;  // E|1 - mu S|^3
  /// E(R_a | X = 0) as substituted into the eps0 bound.
  double conditional_residual = 0.0;
};

struct BoundReport {
  double eps0 = 0.0;
  double epsA = 0.0;
  double epsD = 0.0;
  double total = 0.0;
  BoundMode mode = BoundMode::Crude;
  BoundInputs inputs;
  double theta = 0.0;
  double sigma2 = 0.0;
};

/// Moment inputs of a GG1 model; conditional_residual left at 0.
BoundInputs bound_inputs(const ModelSpec& model);

/// Crude: E(R_a|X=0) replaced by delta^{-1/2} lambda EU^3 / 3. Simulated: the
/// upper CI edge of `conditional_residual` (required).
BoundReport theorem1_bounds(const ModelSpec& model, BoundMode mode,
                            const std::optional<EstimateCI>& conditional_residual = std::nullopt);
/// Evaluates the three majorants with inputs as given.
BoundReport theorem1_bounds(const BoundInputs& inputs, BoundMode mode);

struct SscProbes {
  ProbeId value;
};
/// Registers (1/n) sum_i 1(Q_i = 0) sum_j Q_j.
SscProbes register_ssc(const ModelSpec& model, ProbeSet& probes);
EstimateCI ssc_estimate(const SscProbes& h, const PalmAccumulators& acc);

}  // namespace clockwork
