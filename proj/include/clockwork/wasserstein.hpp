#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "clockwork/palm_estimators.hpp"

namespace clockwork {

struct BootstrapOptions {
  std::size_t resamples = 200;
  double confidence = 0.99;
  /// 1 = iid resampling; larger values resample contiguous blocks.
  std::size_t block_size = 1;
  std::uint64_t seed = 7;
};

/// Exact integral of |F - G| for the empirical CDF F of `sorted` (ascending)
/// and G the Exponential(beta) CDF.
double w1_sorted_vs_exponential(std::span<const double> sorted, double beta);

/// W1 point estimate with a bootstrap interval (SE = bootstrap sd).
EstimateCI w1_empirical_vs_exponential(std::span<const double> samples, double beta,
                                       const BootstrapOptions& options = {});

/// Exact W1 between delta * Geometric_0(1 - rho) and Exponential(beta).
double w1_geometric_vs_exponential(double rho, double delta, double beta);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
};

/// OLS of log w1 on log delta; needs >= 3 pairs with distinct deltas.
DecayFit decay_fit(std::span<const std::pair<double, double>> pairs);

}  // namespace clockwork
