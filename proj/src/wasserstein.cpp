#include "clockwork/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "clockwork/random_stream.hpp"

namespace clockwork {
namespace {

// int_a^b e^{-beta x} dx, b may be infinite
double exp_mass(double a, double b, double beta) {
  if (std::isinf(b)) return std::exp(-beta * a) / beta;
  return std::exp(-beta * a) * -std::expm1(-beta * (b - a)) / beta;
}

// int_a^b |c - G(x)| dx with G(x) = 1 - e^{-beta x}, 0 <= a < b, c in [0, 1]
double abs_gap(double a, double b, double c, double beta) {
  // c - G = e^{-beta x} - (1 - c), positive left of the crossing
  auto signed_part = [&](double u, double v) {
    double lin = std::isinf(v) ? 0.0 : (1.0 - c) * (v - u);
    return exp_mass(u, v, beta) - lin;
  };
  if (c >= 1.0) return exp_mass(a, b, beta);
  double cross = c > 0.0 ? -std::log1p(-c) / beta : 0.0;
  if (cross <= a) return -signed_part(a, b);
  if (cross >= b) return signed_part(a, b);
  return signed_part(a, cross) - signed_part(cross, b);
}

// W1 where sorted[k] carries weight[k] (summing to 1).
double w1_weighted(std::span<const double> sorted, std::span<const double> weight, double beta) {
  // long double keeps the running CDF exact enough for 1e7 tied lattice points
  long double total = 0.0L, cdf = 0.0L;
  // below zero the exponential CDF vanishes
  std::size_t k = 0;
  const std::size_t n = sorted.size();
  while (k < n && sorted[k] < 0.0) {
    cdf += weight[k];
    double right = k + 1 < n ? std::min(sorted[k + 1], 0.0) : 0.0;
    total += cdf * static_cast<long double>(right - sorted[k]);
    ++k;
  }
  double left = 0.0;
  for (; k < n; ++k) {
    if (sorted[k] > left) total += abs_gap(left, sorted[k], std::min(static_cast<double>(cdf), 1.0), beta);
    left = std::max(left, sorted[k]);
    cdf += weight[k];
  }
  total += abs_gap(left, std::numeric_limits<double>::infinity(), std::min(static_cast<double>(cdf), 1.0), beta);
  return static_cast<double>(total);
}

}  // namespace

double w1_sorted_vs_exponential(std::span<const double> sorted, double beta) {
  if (sorted.empty()) throw std::invalid_argument("w1: no samples");
  if (!(beta > 0.0)) throw std::invalid_argument("w1: beta must be positive");
  std::vector<double> w(sorted.size(), 1.0 / static_cast<double>(sorted.size()));
  return w1_weighted(sorted, w, beta);
}

EstimateCI w1_empirical_vs_exponential(std::span<const double> samples, double beta,
                                       const BootstrapOptions& opt) {
  if (samples.empty()) throw std::invalid_argument("w1: no samples");
  if (!(beta > 0.0)) throw std::invalid_argument("w1: beta must be positive");
  const std::size_t n = samples.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return samples[a] < samples[b]; });
  std::vector<double> sorted(n);
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) {
    sorted[r] = samples[order[r]];
    rank[order[r]] = r;
  }

  EstimateCI out;
  out.confidence = opt.confidence;
  out.point = w1_sorted_vs_exponential(sorted, beta);

  const double mean = static_cast<double>(std::accumulate(samples.begin(), samples.end(), 0.0L) /
                                          static_cast<long double>(n));
  if (out.point < std::abs(mean - 1.0 / beta) * (1.0 - 1e-9) - 1e-12)
    throw std::logic_error("w1: dual lower bound violated");

  if (opt.resamples >= 2 && n >= 2) {
    RandomStream rng(derive_seed(opt.seed, 0, 0));
    const std::size_t block = std::clamp<std::size_t>(opt.block_size, 1, n);
    const std::size_t blocks = (n + block - 1) / block;
    std::vector<double> weight(n);
    std::vector<double> reps;
    reps.reserve(opt.resamples);
    const double unit = 1.0 / static_cast<double>(blocks * block);
    for (std::size_t b = 0; b < opt.resamples; ++b) {
      std::fill(weight.begin(), weight.end(), 0.0);
      for (std::size_t j = 0; j < blocks; ++j) {
        std::size_t start = rng.index(n - block + 1);
        for (std::size_t t = 0; t < block; ++t) weight[rank[start + t]] += unit;
      }
      reps.push_back(w1_weighted(sorted, weight, beta));
    }
    double m = std::accumulate(reps.begin(), reps.end(), 0.0) / static_cast<double>(reps.size());
    double ss = 0.0;
    for (double r : reps) ss += (r - m) * (r - m);
    out.std_error = std::sqrt(ss / static_cast<double>(reps.size() - 1));
    boost::math::normal_distribution<double> z;
    out.half_width = boost::math::quantile(z, 0.5 + opt.confidence / 2.0) * out.std_error;
    out.batches = reps.size();
  }
  return out;
}

double w1_geometric_vs_exponential(double rho, double delta, double beta) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("w1_geometric: rho must lie in (0, 1)");
  if (!(delta > 0.0) || !(beta > 0.0)) throw std::invalid_argument("w1_geometric: delta and beta must be positive");
  double total = 0.0;
  double tail = rho;  // rho^{k+1}
  for (std::uint64_t k = 0;; ++k) {
    const double a = static_cast<double>(k) * delta;
    total += abs_gap(a, a + delta, 1.0 - tail, beta);
    tail *= rho;
    const double rest = tail * delta / (1.0 - rho) + std::exp(-beta * (a + delta)) / beta;
    if (rest < 1e-12 || k > 100'000'000) break;
  }
  return total;
}

DecayFit decay_fit(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 3) throw std::invalid_argument("decay_fit: needs at least 3 (delta, w1) pairs");
  std::vector<double> x, y;
  for (auto [d, w] : pairs) {
    if (!(d > 0.0) || !(w > 0.0)) throw std::invalid_argument("decay_fit: delta and w1 must be positive");
    x.push_back(std::log(d));
    y.push_back(std::log(w));
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("decay_fit: deltas must be distinct");
  DecayFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - f.intercept - f.slope * x[i];
    rss += e * e;
  }
  f.std_error = std::sqrt(rss / (n - 2.0) / sxx);
  return f;
}

}  // namespace clockwork
