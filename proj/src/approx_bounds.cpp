#include "clockwork/approx_bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace clockwork {

std::string_view drift_mode_name(DriftMode m) {
  return m == DriftMode::PaperLiteral ? "paper_literal" : "generator_consistent";
}

std::string_view bound_mode_name(BoundMode m) { return m == BoundMode::Crude ? "crude" : "simulated"; }

Vector2 TandemRBMParams::drift() const {
  Vector2 v = drift_mode == DriftMode::PaperLiteral ? mu : Vector2{delta[0] * mu[0], delta[1] * mu[1]};
  return {-(reflection[0][0] * v[0] + reflection[0][1] * v[1]),
          -(reflection[1][0] * v[0] + reflection[1][1] * v[1])};
}

Vector2 TandemRBMParams::scaled_drift() const {
  Vector2 b = drift();
  return {delta[0] * b[0], delta[1] * b[1]};
}

DiffusionParams1D diffusion_params_1d(const ModelSpec& model) {
  if (model.topology() == Topology::Tandem2)
    throw std::invalid_argument("diffusion_params_1d: tandem has a two-dimensional approximation");
  model.require_stable();
  const double n = static_cast<double>(model.stations());
  const double d = model.delta();
  const double lambda = model.lambda(), mu = model.mu();
  DiffusionParams1D p;
  p.delta = d;
  p.theta = n * mu * d * d;
  p.sigma2 = d * d * (lambda * model.arrival().scv() + n * mu * model.service(0).scv());
  return p;
}

TandemRBMParams tandem_params(const ModelSpec& model, DriftMode mode) {
  if (model.topology() != Topology::Tandem2) throw std::invalid_argument("tandem_params: not a tandem");
  model.require_stable();
  const double lambda = model.lambda(), mu1 = model.mu(0), mu2 = model.mu(1);
  const double cu = model.arrival().scv(), c1 = model.service(0).scv(), c2 = model.service(1).scv();
  TandemRBMParams p;
  p.delta = {model.delta(0), model.delta(1)};
  p.mu = {mu1, mu2};
  p.sigma = {{{lambda * cu + mu1 * c1, -mu1 * c1}, {-mu1 * c1, mu1 * c1 + mu2 * c2}}};
  p.drift_mode = mode;
  return p;
}

DiffusionParams diffusion_params(const ModelSpec& model, DriftMode mode) {
  if (model.topology() == Topology::Tandem2) return tandem_params(model, mode);
  return diffusion_params_1d(model);
}

bool degenerate(const DiffusionParams1D& p) { return !(p.sigma2 > 0.0); }

BoundInputs bound_inputs(const ModelSpec& model) {
  if (model.topology() != Topology::GG1) throw std::invalid_argument("theorem 1 bounds need a GG1 model");
  model.require_stable();
  const ClockSpec& u = model.arrival();
  const ClockSpec& s = model.service(0);
  BoundInputs in;
  in.delta = model.delta();
  in.lambda = model.lambda();
  in.mu = model.mu();
  in.cu2 = u.scv();
  in.cs2 = s.scv();
  in.eu2 = u.moment(2);
  in.eu3 = u.moment(3);
  in.es2 = s.moment(2);
  in.abs_u3 = u.abs_centered_cubed();
  in.abs_s3 = s.abs_centered_cubed();
  return in;
}

BoundReport theorem1_bounds(const BoundInputs& in, BoundMode mode) {
  const double d = in.delta, l = in.lambda, m = in.mu;
  const double sigma2 = d * d * (l * in.cu2 + m * in.cs2);
  if (!(sigma2 > 0.0)) throw std::invalid_argument("theorem1_bounds: sigma2 = 0");
  BoundReport r;
  r.mode = mode;
  r.inputs = in;
  r.theta = m * d * d;
  r.sigma2 = sigma2;

  const double shared = m * l * in.eu2 / 2.0 + d + m * l * in.es2 / 2.0;
  r.eps0 = d * (l * l * in.eu2 / 2.0 + (d + m * l * in.es2 / 2.0) + l * in.conditional_residual + 1.0);
  const double pre = 2.0 * d * d * d / sigma2;
  r.epsA = pre * l *
           (in.abs_u3 / 3.0 + in.cu2 * shared + in.cu2 * (2.0 + m * l * in.eu2 / 2.0 + m * m * in.es2));
  r.epsD = pre * (in.abs_s3 * l + in.cs2 * l * shared +
                  in.cs2 * m * (d * d + d * (2.0 + l * l * in.es2 / 2.0 + l * l * in.eu2))) +
           0.5 * d * in.cs2;
  r.total = r.eps0 + r.epsA + r.epsD;
  return r;
}

BoundReport theorem1_bounds(const ModelSpec& model, BoundMode mode,
                            const std::optional<EstimateCI>& conditional_residual) {
  BoundInputs in = bound_inputs(model);
  if (mode == BoundMode::Crude) {
    in.conditional_residual = std::pow(in.delta, -0.5) * in.lambda * in.eu3 / 3.0;
  } else {
    if (!conditional_residual)
      throw std::invalid_argument("theorem1_bounds: simulated mode needs a conditional residual estimate");
    in.conditional_residual = conditional_residual->upper();
  }
  return theorem1_bounds(in, mode);
}

SscProbes register_ssc(const ModelSpec& model, ProbeSet& probes) {
  if (model.topology() != Topology::JSQ) throw std::invalid_argument("ssc_estimate needs a JSQ model");
  const double n = static_cast<double>(model.stations());
  return {probes.time_average("ssc", [n](const SystemState& z) {
    double total = static_cast<double>(z.total_queue());
    double idle = static_cast<double>(z.stations - z.busy_count());
    return idle * total / n;
  })};
}

EstimateCI ssc_estimate(const SscProbes& h, const PalmAccumulators& acc) { return acc.estimate(h.value); }

}  // namespace clockwork
