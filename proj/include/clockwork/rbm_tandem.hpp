#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "clockwork/approx_bounds.hpp"
#include "clockwork/palm_estimators.hpp"

namespace clockwork {

/// Drift and covariance of the free process xi, plus the output scaling.
/// Reflection matrix is fixed at R = ((1, 0), (-1, 1)).
struct SRBMDynamics {
  Vector2 drift{};
  Matrix2 sigma{};
  Vector2 delta{1.0, 1.0};

  static SRBMDynamics from(const TandemRBMParams& p) { return {p.drift(), p.sigma, p.delta}; }
};

struct SRBMOptions {
  double dt = 1e-3;
  double horizon = 1.0;
  /// Time discarded before the running means start.
  double burn_in = 0.0;
  std::uint64_t seed = 1;
  Vector2 start{0.0, 0.0};
  /// Keep every stride-th state in the path arrays; 0 keeps none.
  std::size_t stride = 1;
  std::size_t batches = 32;
};

struct SRBMPath {
  double dt = 0.0;
  double horizon = 0.0;
  std::uint64_t steps = 0;
  std::vector<double> t;
  std::vector<Vector2> y_tilde;
  std::vector<Vector2> y;          // diag(delta) y_tilde
  std::vector<Vector2> regulator;  // cumulative I
  Vector2 final_regulator{};
  /// Batch-means estimates of E Y over [burn_in, horizon].
  EstimateCI mean_y1;
  EstimateCI mean_y2;
  /// Steps where nonnegativity or complementarity failed (expected 0).
  std::uint64_t invariant_violations = 0;
  /// Regulator growth per unit time after burn-in.
  Vector2 regulator_rate{};
};

/// Lower Cholesky factor of a PSD 2x2 matrix; throws if not PSD.
Matrix2 cholesky_psd(const Matrix2& s);

SRBMPath srbm_simulate(const SRBMDynamics& dyn, const SRBMOptions& options);
inline SRBMPath srbm_simulate(const TandemRBMParams& p, const SRBMOptions& options) {
  return srbm_simulate(SRBMDynamics::from(p), options);
}

/// Scaled Y at `spacing` time units apart after `burn_in`.
std::vector<Vector2> srbm_stationary_samples(const TandemRBMParams& p, double dt, double burn_in,
                                             std::size_t count, double spacing, std::uint64_t seed);

struct HalvingCheck {
  EstimateCI coarse;      // E Y1 at dt
  EstimateCI fine;        // E Y1 at dt / 2
  EstimateCI difference;  // paired per batch, fine - coarse
  bool pass = false;      // |difference| < coarse half-width
};

/// Runs dt and dt/2 on one Brownian path (coarse increment = sum of two fine ones).
HalvingCheck srbm_halving_check(const TandemRBMParams& p, double dt, double horizon, double burn_in,
                                std::uint64_t seed, std::size_t batches = 32);

/// t,y1,y2,i1,i2 for the kept states.
void write_srbm_path(std::ostream& out, const SRBMPath& path);

}  // namespace clockwork
