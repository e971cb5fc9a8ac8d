#include "clockwork/experiments.hpp"

#include <algorithm>
#include <stdexcept>

#include "clockwork/des_engine.hpp"

namespace clockwork {

ModelSpec with_load(const ModelSpec& model, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("with_load: rho must lie in (0, 1)");
  const double lambda = model.lambda();
  auto rescale = [&](const ClockSpec& s, double servers) {
    return s.scaled(servers * rho / lambda / s.mean());
  };
  switch (model.topology()) {
    case Topology::GG1: return ModelSpec::gg1(model.arrival(), rescale(model.service(0), 1.0));
    case Topology::JSQ:
      return ModelSpec::jsq(model.stations(), model.arrival(),
                            rescale(model.service(0), static_cast<double>(model.stations())));
    case Topology::Tandem2:
      return ModelSpec::tandem(model.arrival(), rescale(model.service(0), 1.0), rescale(model.service(1), 1.0));
  }
  throw std::logic_error("unknown topology");
}

ConditionalResidual estimate_conditional_residual(const ModelSpec& gg1, std::uint64_t events,
                                                  std::uint64_t seed) {
  ProbeSet probes;
  IdentitySuite suite(gg1, {2}, probes);
  RunOptions opt;
  opt.total_events = events;
  opt.seed = seed;
  auto acc = simulate(gg1, opt, probes);
  return suite.conditional_residual_estimate(acc);
}

W1Cell w1_cell(const ModelSpec& gg1, const W1CellOptions& o) {
  if (gg1.topology() != Topology::GG1) throw std::invalid_argument("w1_cell: GG1 only");
  gg1.require_stable();
  W1Cell cell;
  cell.config_id = gg1.describe();
  cell.rho = gg1.rho();
  cell.delta = gg1.delta();
  auto params = diffusion_params_1d(gg1);
  cell.beta = params.beta();

  const std::uint64_t burn = std::max<std::uint64_t>(100'000, o.samples * o.spacing / 10);
  auto states = stationary_samples(gg1, o.samples, o.spacing, burn, o.seed);
  std::vector<double> xs;
  xs.reserve(states.size());
  for (const auto& z : states) xs.push_back(gg1.scaled_total(z));
  cell.w1 = w1_empirical_vs_exponential(xs, cell.beta, o.bootstrap);

  if (o.mode == BoundMode::Crude) {
    cell.bound = theorem1_bounds(gg1, BoundMode::Crude);
  } else if (o.supplied_residual) {
    cell.conditional_residual = EstimateCI{*o.supplied_residual, 0.0, 0.0, 0, 0.99};
    cell.bound = theorem1_bounds(gg1, BoundMode::Simulated, cell.conditional_residual);
  } else {
    cell.conditional_residual =
        estimate_conditional_residual(gg1, o.residual_events, o.seed + 1).time_ratio;
    cell.bound = theorem1_bounds(gg1, BoundMode::Simulated, cell.conditional_residual);
  }
  cell.pass = cell.w1.point <= cell.bound.total + o.se_multiple * cell.w1.std_error;
  return cell;
}

}  // namespace clockwork
