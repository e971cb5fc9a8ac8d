#include "clockwork/rbm_tandem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "clockwork/random_stream.hpp"

namespace clockwork {

Matrix2 cholesky_psd(const Matrix2& s) {
  const double tol = 1e-12 * std::max({1.0, std::abs(s[0][0]), std::abs(s[1][1])});
  if (std::abs(s[0][1] - s[1][0]) > tol) throw std::invalid_argument("covariance must be symmetric");
  const double det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
  if (s[0][0] < -tol || s[1][1] < -tol || det < -tol)
    throw std::invalid_argument("covariance is not positive semidefinite");
  Matrix2 l{};
  l[0][0] = std::sqrt(std::max(0.0, s[0][0]));
  if (l[0][0] > 0.0) {
    l[1][0] = s[1][0] / l[0][0];
    l[1][1] = std::sqrt(std::max(0.0, s[1][1] - l[1][0] * l[1][0]));
  } else {
    if (std::abs(s[1][0]) > tol) throw std::invalid_argument("covariance is not positive semidefinite");
    l[1][1] = std::sqrt(std::max(0.0, s[1][1]));
  }
  return l;
}

namespace {

// One Euler step with the sequential Skorokhod push for R = ((1,0),(-1,1)).
struct Stepper {
  Vector2 drift;
  Matrix2 chol;

  Vector2 step(Vector2& y, double dt, double g1, double g2) const {
    const double sq = std::sqrt(dt);
    double p1 = y[0] + drift[0] * dt + sq * chol[0][0] * g1;
    double p2 = y[1] + drift[1] * dt + sq * (chol[1][0] * g1 + chol[1][1] * g2);
    double di1 = std::max(0.0, -p1);
    p1 += di1;
    p2 -= di1;
    double di2 = std::max(0.0, -p2);
    p2 += di2;
    y = {p1, p2};
    return {di1, di2};
  }
};

bool violates(const Vector2& y, const Vector2& di) {
  return y[0] < 0.0 || y[1] < 0.0 || di[0] < 0.0 || di[1] < 0.0 || (di[0] > 0.0 && y[0] != 0.0) ||
         (di[1] > 0.0 && y[1] != 0.0);
}

// Time average over [burn_in, horizon] in equal batches.
class BatchMean {
 public:
  BatchMean(std::uint64_t steps, std::size_t batches)
      : per_batch_(std::max<std::uint64_t>(1, steps / std::max<std::size_t>(batches, 1))),
        sums_(batches, 0.0),
        counts_(batches, 0) {}

  void add(double v) {
    std::size_t b = std::min<std::size_t>(seen_ / per_batch_, sums_.size() - 1);
    sums_[b] += v;
    ++counts_[b];
    ++seen_;
  }

  EstimateCI estimate() const {
    std::vector<double> means;
    double total = 0.0;
    std::uint64_t n = 0;
    for (std::size_t b = 0; b < sums_.size(); ++b) {
      if (counts_[b] == 0) continue;
      means.push_back(sums_[b] / static_cast<double>(counts_[b]));
      total += sums_[b];
      n += counts_[b];
    }
    if (n == 0) return {};
    return batch_means_ci(means, total / static_cast<double>(n));
  }

  std::vector<double> batch_values() const {
    std::vector<double> out;
    for (std::size_t b = 0; b < sums_.size(); ++b)
      out.push_back(counts_[b] ? sums_[b] / static_cast<double>(counts_[b]) : 0.0);
    return out;
  }

 private:
  std::uint64_t per_batch_;
  std::uint64_t seen_ = 0;
  std::vector<double> sums_;
  std::vector<std::uint64_t> counts_;
};

}  // namespace

SRBMPath srbm_simulate(const SRBMDynamics& dyn, const SRBMOptions& opt) {
  if (!(opt.dt > 0.0)) throw std::invalid_argument("srbm: dt must be positive");
  if (opt.start[0] < 0.0 || opt.start[1] < 0.0) throw std::invalid_argument("srbm: start must be in the quadrant");
  Stepper st{dyn.drift, cholesky_psd(dyn.sigma)};
  RandomStream rng(derive_seed(opt.seed, 0, 0));

  const auto steps = static_cast<std::uint64_t>(std::llround(opt.horizon / opt.dt));
  const auto burn = std::min(steps, static_cast<std::uint64_t>(std::llround(opt.burn_in / opt.dt)));
  SRBMPath path;
  path.dt = opt.dt;
  path.horizon = static_cast<double>(steps) * opt.dt;
  path.steps = steps;
  BatchMean m1(steps - burn, opt.batches), m2(steps - burn, opt.batches);

  Vector2 y = opt.start, reg{0.0, 0.0}, reg_at_burn{0.0, 0.0};
  auto keep = [&](std::uint64_t k) {
    path.t.push_back(static_cast<double>(k) * opt.dt);
    path.y_tilde.push_back(y);
    path.y.push_back({dyn.delta[0] * y[0], dyn.delta[1] * y[1]});
    path.regulator.push_back(reg);
  };
  if (opt.stride > 0) keep(0);
  for (std::uint64_t k = 1; k <= steps; ++k) {
    double g1 = rng.standard_normal();
    double g2 = rng.standard_normal();
    Vector2 di = st.step(y, opt.dt, g1, g2);
    reg[0] += di[0];
    reg[1] += di[1];
    if (violates(y, di)) ++path.invariant_violations;
    if (k == burn) reg_at_burn = reg;
    if (k > burn) {
      m1.add(dyn.delta[0] * y[0]);
      m2.add(dyn.delta[1] * y[1]);
    }
    if (opt.stride > 0 && k % opt.stride == 0) keep(k);
  }
  path.final_regulator = reg;
  path.mean_y1 = m1.estimate();
  path.mean_y2 = m2.estimate();
  const double span = static_cast<double>(steps - burn) * opt.dt;
  if (span > 0.0) path.regulator_rate = {(reg[0] - reg_at_burn[0]) / span, (reg[1] - reg_at_burn[1]) / span};
  return path;
}

std::vector<Vector2> srbm_stationary_samples(const TandemRBMParams& p, double dt, double burn_in,
                                             std::size_t count, double spacing, std::uint64_t seed) {
  if (count == 0) return {};
  if (!(spacing > 0.0)) throw std::invalid_argument("srbm samples: spacing must be positive");
  const auto stride = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(spacing / dt)));
  const auto burn = static_cast<std::uint64_t>(std::llround(burn_in / dt));
  Stepper st{p.drift(), cholesky_psd(p.sigma)};
  RandomStream rng(derive_seed(seed, 0, 0));
  Vector2 y{0.0, 0.0};
  std::vector<Vector2> out;
  out.reserve(count);
  for (std::uint64_t k = 1; out.size() < count; ++k) {
    double g1 = rng.standard_normal();
    double g2 = rng.standard_normal();
    st.step(y, dt, g1, g2);
    if (k > burn && (k - burn) % stride == 0) out.push_back({p.delta[0] * y[0], p.delta[1] * y[1]});
  }
  return out;
}

HalvingCheck srbm_halving_check(const TandemRBMParams& p, double dt, double horizon, double burn_in,
                                std::uint64_t seed, std::size_t batches) {
  if (!(dt > 0.0)) throw std::invalid_argument("srbm: dt must be positive");
  Stepper st{p.drift(), cholesky_psd(p.sigma)};
  RandomStream rng(derive_seed(seed, 0, 0));
  const auto steps = static_cast<std::uint64_t>(std::llround(horizon / dt));
  const auto burn = std::min(steps, static_cast<std::uint64_t>(std::llround(burn_in / dt)));
  BatchMean coarse(steps - burn, batches), fine(steps - burn, batches);
  Vector2 yc{0.0, 0.0}, yf{0.0, 0.0};
  const double r2 = std::sqrt(0.5);
  for (std::uint64_t k = 1; k <= steps; ++k) {
    double a1 = rng.standard_normal(), a2 = rng.standard_normal();
    double b1 = rng.standard_normal(), b2 = rng.standard_normal();
    st.step(yf, 0.5 * dt, a1, a2);
    double f_first = yf[0];
    st.step(yf, 0.5 * dt, b1, b2);
    st.step(yc, dt, (a1 + b1) * r2, (a2 + b2) * r2);
    if (k > burn) {
      coarse.add(p.delta[0] * yc[0]);
      fine.add(p.delta[0] * 0.5 * (f_first + yf[0]));
    }
  }
  HalvingCheck h;
  h.coarse = coarse.estimate();
  h.fine = fine.estimate();
  auto cb = coarse.batch_values(), fb = fine.batch_values();
  std::vector<double> diff(cb.size());
  for (std::size_t b = 0; b < cb.size(); ++b) diff[b] = fb[b] - cb[b];
  h.difference = batch_means_ci(diff, h.fine.point - h.coarse.point);
  h.pass = std::abs(h.difference.point) < h.coarse.half_width;
  return h;
}

void write_srbm_path(std::ostream& out, const SRBMPath& path) {
  out << "t,y1,y2,i1,i2\n";
  for (std::size_t k = 0; k < path.t.size(); ++k)
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", path.t[k], path.y[k][0], path.y[k][1],
                       path.regulator[k][0], path.regulator[k][1]);
}

}  // namespace clockwork
