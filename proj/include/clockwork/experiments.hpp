#pragma once

#include <optional>
#include <string>

#include "clockwork/approx_bounds.hpp"
#include "clockwork/identity_suite.hpp"
#include "clockwork/model.hpp"
#include "clockwork/wasserstein.hpp"

namespace clockwork {

/// Same arrival clock; service clocks rescaled so every station has load rho.
ModelSpec with_load(const ModelSpec& model, double rho);

struct W1CellOptions {
  std::size_t samples = 100'000;
  std::uint64_t spacing = 100;
  /// Events for the conditional-residual run (Simulated mode).
  std::uint64_t residual_events = 10'000'000;
  std::uint64_t seed = 1;
  BoundMode mode = BoundMode::Simulated;
  /// Replaces the simulated E(R_a | X = 0).
  std::optional<double> supplied_residual;
  BootstrapOptions bootstrap;
  double se_multiple = 3.0;
};

/// W1 between the stationary law of delta * Q and Exponential(2 theta / sigma2),
/// next to Theorem 1's bound.
struct W1Cell {
  std::string config_id;
  double rho = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  EstimateCI w1;
  std::optional<EstimateCI> conditional_residual;
  BoundReport bound;
  bool pass = false;
};

W1Cell w1_cell(const ModelSpec& gg1, const W1CellOptions& options);

/// E(R_a | X = 0) from one GG1 run.
ConditionalResidual estimate_conditional_residual(const ModelSpec& gg1, std::uint64_t events,
                                                  std::uint64_t seed);

}  // namespace clockwork
