#include "clockwork/identity_suite.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace clockwork {
namespace {

IdentityRow equality(std::string id, EstimateCI est, double target, double k) {
  IdentityRow r{std::move(id), est, target, Relation::Equal, false, false};
  r.pass = std::abs(est.point - target) <= k * est.std_error;
  return r;
}

void finalize(IdentityReport& report) {
  const auto checked = std::count_if(report.rows.begin(), report.rows.end(),
                                     [](const IdentityRow& r) { return !r.exploratory; });
  if (checked > 10)
    report.multiplicity_note = fmt::format(
        "{} identities checked at once; a Bonferroni-adjusted family-wise level would need "
        "roughly {:.2f} SE per identity",
        checked, 3.0 + 0.5 * std::log(static_cast<double>(checked) / 10.0));
}

}  // namespace

bool IdentityReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const IdentityRow& r) { return r.exploratory || r.pass; });
}

const IdentityRow& IdentityReport::row(const std::string& id) const {
  auto it = std::find_if(rows.begin(), rows.end(), [&](const IdentityRow& r) { return r.id == id; });
  if (it == rows.end()) throw std::out_of_range("no identity row " + id);
  return *it;
}

IdentitySuite::IdentitySuite(const ModelSpec& model, std::vector<int> m_values, ProbeSet& probes)
    : model_(model), m_values_(std::move(m_values)) {
  for (int m : m_values_)
    if (m != 2 && m != 3) throw std::invalid_argument("identity suite: m must be 2 or 3");

  arrivals_ = probes.event_average("arrivals", CountingProcess::arrivals(),
                                   [](const EventRecord&) { return 1.0; });
  for (int m : m_values_)
    arrival_residual_.push_back(probes.time_average(fmt::format("R_a^{}", m - 1),
                                                    integrands::arrival_residual_power(m - 1)));
  for (std::size_t i = 0; i < model.stations(); ++i) {
    StationProbes sp;
    sp.departures = probes.event_average(fmt::format("departures_{}", i + 1),
                                         CountingProcess::departures_at(i),
                                         [](const EventRecord&) { return 1.0; });
    sp.busy = probes.time_average(fmt::format("busy_{}", i + 1),
                                  [i](const SystemState& z) { return z.busy(i) ? 1.0 : 0.0; });
    sp.idle = probes.time_average(fmt::format("idle_{}", i + 1),
                                  [i](const SystemState& z) { return z.busy(i) ? 0.0 : 1.0; });
    for (int m : m_values_) {
      sp.busy_residual.push_back(probes.time_average(
          fmt::format("R_s{}^{}*busy", i + 1, m - 1),
          integrands::service_residual_power(
              i, m - 1, [i](const SystemState& z) { return z.busy(i) ? 1.0 : 0.0; })));
      sp.idle_residual.push_back(probes.time_average(
          fmt::format("R_s{}^{}*idle", i + 1, m),
          integrands::service_residual_power(
              i, m, [i](const SystemState& z) { return z.busy(i) ? 0.0 : 1.0; })));
    }
    stations_.push_back(std::move(sp));
  }
  if (model.topology() == Topology::GG1) {
    auto empty_after = [](const EventRecord& e) { return e.after.total_queue() == 0; };
    idle_period_sum_ = probes.event_average(
        "1(X=0)R_a dD", CountingProcess::departures(),
        [empty_after](const EventRecord& e) { return empty_after(e) ? e.after.r_a : 0.0; });
    idle_period_sq_sum_ = probes.event_average(
        "1(X=0)R_a^2 dD", CountingProcess::departures(), [empty_after](const EventRecord& e) {
          return empty_after(e) ? e.after.r_a * e.after.r_a : 0.0;
        });
    residual_when_empty_ = probes.time_average(
        "R_a*1(X=0)", integrands::arrival_residual_power(1, [](const SystemState& z) {
          return z.total_queue() == 0 ? 1.0 : 0.0;
        }));
    residual_arrival_at_departures_ = probes.event_average(
        "R_a dD", CountingProcess::departures(), [](const EventRecord& e) { return e.after.r_a; });
    residual_service_at_arrivals_ = probes.event_average(
        "R_s dA", CountingProcess::arrivals(), [](const EventRecord& e) { return e.after.r_s[0]; });
  }
}

IdentityReport IdentitySuite::check_gg1(const PalmAccumulators& acc, double k) const {
  if (model_.topology() != Topology::GG1)
    throw std::invalid_argument("check_gg1: model is not GG1");
  const double lambda = model_.lambda();
  const double rho = model_.rho();
  const ClockSpec& u = model_.arrival();
  const ClockSpec& s = model_.service(0);
  const StationProbes& st = stations_[0];

  IdentityReport report;
  report.rows.push_back(equality("arrival_rate", acc.estimate(arrivals_), lambda, k));
  report.rows.push_back(equality("departure_rate", acc.estimate(st.departures), lambda, k));
  report.rows.push_back(equality("p_busy", acc.estimate(st.busy), rho, k));
  for (std::size_t j = 0; j < m_values_.size(); ++j) {
    const int m = m_values_[j];
    report.rows.push_back(equality(fmt::format("residual_arrival_m{}", m),
                                   acc.estimate(arrival_residual_[j]), lambda * u.moment(m) / m, k));
    report.rows.push_back(equality(fmt::format("residual_service_busy_m{}", m),
                                   acc.estimate(st.busy_residual[j]), lambda * s.moment(m) / m, k));
    report.rows.push_back(equality(
        fmt::format("residual_service_given_empty_m{}", m),
        acc.combine({st.idle_residual[j], st.idle}, [](auto r) { return r[0] / r[1]; }),
        s.moment(m), k));
  }
  report.rows.push_back(equality("idle_period_residual", acc.estimate(idle_period_sum_), 1.0 - rho, k));

  // E S E int R_a dD + E U E int R_s dA <= E R_s + E R_a
  const double mean_ra = lambda * u.moment(2) / 2.0;
  const double mean_rs = (1.0 - rho) * s.mean() + lambda * s.moment(2) / 2.0;
  const double es = s.mean();
  const double eu = u.mean();
  IdentityRow mixed{"mixed_moment_inequality",
                    acc.combine({residual_arrival_at_departures_, residual_service_at_arrivals_},
                                [es, eu](auto r) { return es * r[0] + eu * r[1]; }),
                    mean_rs + mean_ra, Relation::AtMost, false, false};
  mixed.pass = mixed.estimate.point <= mixed.target + k * mixed.estimate.std_error;
  report.rows.push_back(mixed);
  finalize(report);
  return report;
}

IdentityReport IdentitySuite::check_jsq(const PalmAccumulators& acc, double k) const {
  if (model_.topology() != Topology::JSQ)
    throw std::invalid_argument("check_jsq: model is not JSQ");
  const double lambda = model_.lambda();
  const double n = static_cast<double>(model_.stations());
  const double rho = model_.rho();
  const ClockSpec& u = model_.arrival();
  const ClockSpec& s = model_.service(0);

  IdentityReport report;
  report.rows.push_back(equality("arrival_rate", acc.estimate(arrivals_), lambda, k));
  for (std::size_t j = 0; j < m_values_.size(); ++j) {
    const int m = m_values_[j];
    report.rows.push_back(equality(fmt::format("residual_arrival_m{}", m),
                                   acc.estimate(arrival_residual_[j]), lambda * u.moment(m) / m, k));
  }
  for (std::size_t i = 0; i < stations_.size(); ++i) {
    const StationProbes& st = stations_[i];
    report.rows.push_back(
        equality(fmt::format("departure_rate_{}", i + 1), acc.estimate(st.departures), lambda / n, k));
    report.rows.push_back(equality(fmt::format("p_busy_{}", i + 1), acc.estimate(st.busy), rho, k));
    for (std::size_t j = 0; j < m_values_.size(); ++j) {
      const int m = m_values_[j];
      report.rows.push_back(equality(fmt::format("residual_service_busy_{}_m{}", i + 1, m),
                                     acc.estimate(st.busy_residual[j]),
                                     (lambda / n) * s.moment(m) / m, k));
      report.rows.push_back(equality(
          fmt::format("residual_service_given_empty_{}_m{}", i + 1, m),
          acc.combine({st.idle_residual[j], st.idle}, [](auto r) { return r[0] / r[1]; }),
          s.moment(m), k));
    }
  }
  finalize(report);
  return report;
}

IdentityReport IdentitySuite::check_tandem(const PalmAccumulators& acc, double k) const {
  if (model_.topology() != Topology::Tandem2)
    throw std::invalid_argument("check_tandem: model is not a tandem");
  const double lambda = model_.lambda();
  IdentityReport report;
  report.rows.push_back(equality("arrival_rate", acc.estimate(arrivals_), lambda, k));
  for (std::size_t i = 0; i < stations_.size(); ++i) {
    const StationProbes& st = stations_[i];
    const ClockSpec& s = model_.service(i);
    report.rows.push_back(
        equality(fmt::format("departure_rate_{}", i + 1), acc.estimate(st.departures), lambda, k));
    report.rows.push_back(equality(fmt::format("p_busy_{}", i + 1), acc.estimate(st.busy), model_.rho(i), k));
    for (std::size_t j = 0; j < m_values_.size(); ++j) {
      const int m = m_values_[j];
      report.rows.push_back(equality(fmt::format("residual_service_busy_{}_m{}", i + 1, m),
                                     acc.estimate(st.busy_residual[j]), lambda * s.moment(m) / m, k));
      report.rows.push_back(equality(
          fmt::format("residual_service_given_empty_{}_m{}", i + 1, m),
          acc.combine({st.idle_residual[j], st.idle}, [](auto r) { return r[0] / r[1]; }),
          s.moment(m), k));
    }
  }
  for (auto& r : report.rows) r.exploratory = true;
  return report;
}

IdentityReport IdentitySuite::check(const PalmAccumulators& acc, double k) const {
  switch (model_.topology()) {
    case Topology::GG1: return check_gg1(acc, k);
    case Topology::JSQ: return check_jsq(acc, k);
    case Topology::Tandem2: return check_tandem(acc, k);
  }
  throw std::logic_error("unknown topology");
}

ConditionalResidual IdentitySuite::conditional_residual_estimate(const PalmAccumulators& acc) const {
  if (model_.topology() != Topology::GG1)
    throw std::invalid_argument("conditional_residual_estimate: model is not GG1");
  ConditionalResidual out;
  out.time_ratio = acc.combine({residual_when_empty_, stations_[0].idle},
                               [](auto r) { return r[0] / r[1]; });
  for (std::size_t b = 0; b < acc.batches(); ++b)
    if (!(acc.batch_sum(idle_period_sum_, b) > 0.0)) return out;
  out.idle_period_ratio = acc.combine({idle_period_sq_sum_, idle_period_sum_},
                                      [](auto r) { return r[0] / (2.0 * r[1]); });
  out.difference = acc.combine(
      {residual_when_empty_, stations_[0].idle, idle_period_sq_sum_, idle_period_sum_},
      [](auto r) { return r[0] / r[1] - r[2] / (2.0 * r[3]); });
  return out;
}

}  // namespace clockwork
