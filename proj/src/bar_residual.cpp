#include "clockwork/bar_residual.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace clockwork {

CompensatedState compensate(const ModelSpec& model, const SystemState& z) {
  const double lambda = model.lambda();
  if (model.topology() == Topology::Tandem2) {
    const double d1 = model.delta(0), d2 = model.delta(1);
    const double mu1 = model.mu(0), mu2 = model.mu(1);
    return {d1 * (static_cast<double>(z.queues[0]) - lambda * z.r_a + mu1 * z.r_s[0]),
            d2 * (static_cast<double>(z.queues[1]) - mu1 * z.r_s[0] + mu2 * z.r_s[1])};
  }
  const double d = model.delta();
  const double mu = model.mu();
  double x = static_cast<double>(z.total_queue()) - lambda * z.r_a;
  for (std::size_t i = 0; i < z.stations; ++i) x += mu * z.r_s[i];
  return {d * x, 0.0};
}

namespace {

std::string model_id(const ModelSpec& m) { return m.describe(); }

std::string departure_term(const ModelSpec& m, std::size_t i) {
  return m.topology() == Topology::GG1 ? "jump_D" : fmt::format("jump_D{}", i + 1);
}

}  // namespace

BarProbes register_full_bar(const ModelSpec& model, const StateTestFunction& f, ProbeSet& probes) {
  BarProbes h{model_id(model), f.name, {}};
  auto tag = [&](const std::string& t) { return f.name + ":" + t; };
  auto fa = f.d_ra;
  h.terms.emplace_back("drift_a", probes.time_average(tag("drift_a"), integrands::gauss_legendre(
                                                                          [fa](const SystemState& z) {
                                                                            return -fa(z);
                                                                          })));
  for (std::size_t i = 0; i < model.stations(); ++i) {
    auto fs = f.d_rs;
    h.terms.emplace_back(
        model.stations() == 1 ? "drift_s" : fmt::format("drift_s{}", i + 1),
        probes.time_average(tag(fmt::format("drift_s{}", i + 1)),
                            integrands::gauss_legendre([fs, i](const SystemState& z) {
                              return z.busy(i) ? -fs(z, i) : 0.0;
                            })));
  }
  auto ff = f.f;
  auto jump = [ff](const EventRecord& e) { return ff(e.after) - ff(e.before); };
  h.terms.emplace_back("jump_A", probes.event_average(tag("jump_A"), CountingProcess::arrivals(), jump));
  for (std::size_t i = 0; i < model.stations(); ++i)
    h.terms.emplace_back(departure_term(model, i),
                         probes.event_average(tag(departure_term(model, i)),
                                              CountingProcess::departures_at(i), jump));
  return h;
}

BarProbes register_compensated_bar(const ModelSpec& model, const TestFunction1D& f,
                                   ProbeSet& probes) {
  if (model.topology() == Topology::Tandem2)
    throw std::invalid_argument("compensated BAR on the tandem needs a two-dimensional f");
  BarProbes h{model_id(model), f.name, {}};
  auto tag = [&](const std::string& t) { return "~" + f.name + ":" + t; };
  const double d = model.delta();
  const double lambda = model.lambda();
  const double mu = model.mu();
  auto f1 = f.f1;
  h.terms.emplace_back(
      "drift", probes.time_average(tag("drift"), integrands::gauss_legendre(
                                                     [=](const SystemState& z) {
                                                       double rate = lambda - mu * static_cast<double>(z.busy_count());
                                                       return d * rate * f1(compensate(model, z).x1);
                                                     })));
  auto ff = f.f;
  auto jump = [ff, model](const EventRecord& e) {
    return ff(compensate(model, e.after).x1) - ff(compensate(model, e.before).x1);
  };
  h.terms.emplace_back("jump_A", probes.event_average(tag("jump_A"), CountingProcess::arrivals(), jump));
  for (std::size_t i = 0; i < model.stations(); ++i)
    h.terms.emplace_back(departure_term(model, i),
                         probes.event_average(tag(departure_term(model, i)),
                                              CountingProcess::departures_at(i), jump));
  return h;
}

BarProbes register_compensated_bar(const ModelSpec& model, const TestFunction2D& f,
                                   ProbeSet& probes) {
  if (model.topology() != Topology::Tandem2)
    throw std::invalid_argument("two-dimensional compensated BAR needs the tandem");
  BarProbes h{model_id(model), f.name, {}};
  auto tag = [&](const std::string& t) { return "~" + f.name + ":" + t; };
  const double d1 = model.delta(0), d2 = model.delta(1);
  const double lambda = model.lambda(), mu1 = model.mu(0), mu2 = model.mu(1);
  auto g1 = f.d1, g2 = f.d2;
  h.terms.emplace_back(
      "drift", probes.time_average(tag("drift"), integrands::gauss_legendre([=](
                                                                                const SystemState& z) {
        const double b1 = z.busy(0) ? 1.0 : 0.0, b2 = z.busy(1) ? 1.0 : 0.0;
        auto x = compensate(model, z);
        return d1 * (lambda - mu1 * b1) * g1(x.x1, x.x2) + d2 * (mu1 * b1 - mu2 * b2) * g2(x.x1, x.x2);
      })));
  auto ff = f.f;
  auto jump = [ff, model](const EventRecord& e) {
    auto a = compensate(model, e.after), b = compensate(model, e.before);
    return ff(a.x1, a.x2) - ff(b.x1, b.x2);
  };
  h.terms.emplace_back("jump_A", probes.event_average(tag("jump_A"), CountingProcess::arrivals(), jump));
  for (std::size_t i = 0; i < 2; ++i)
    h.terms.emplace_back(departure_term(model, i),
                         probes.event_average(tag(departure_term(model, i)),
                                              CountingProcess::departures_at(i), jump));
  return h;
}

TermReport bar_terms(const BarProbes& h, const PalmAccumulators& acc) {
  TermReport r{h.model_id, h.f_id, {}, {}};
  std::vector<ProbeId> ids;
  for (const auto& [name, id] : h.terms) {
    r.terms.push_back({name, acc.estimate(id)});
    ids.push_back(id);
  }
  r.residual = acc.combine(ids, [](std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  });
  return r;
}

JumpProbes register_zero_mean_jump(const ModelSpec& model, ProbeSet& probes) {
  JumpProbes h;
  h.jump = probes.event_average("dX~1 at A", CountingProcess::arrivals(), [model](const EventRecord& e) {
    return compensate(model, e.after).x1 - compensate(model, e.before).x1;
  });
  h.count = probes.event_average("A count", CountingProcess::arrivals(),
                                 [](const EventRecord&) { return 1.0; });
  return h;
}

EstimateCI zero_mean_jump(const JumpProbes& h, const PalmAccumulators& acc) {
  return acc.combine({h.jump, h.count}, [](std::span<const double> v) { return v[0] / v[1]; });
}

bool ExtractionReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ExtractionRow& r) { return r.pass; });
}

ExtractionProbes register_extraction(const ModelSpec& model, const TestFunction1D& f,
                                     ProbeSet& probes) {
  if (model.topology() == Topology::Tandem2)
    throw std::invalid_argument("extraction check covers GG1 and JSQ only");
  if (!f.sup_f2 || !f.sup_f3)
    throw std::invalid_argument("extraction check needs finite sup norms of f'' and f'''");
  const std::size_t n = model.stations();
  const double d = model.delta(), lambda = model.lambda(), mu = model.mu();
  const bool jsq = model.topology() == Topology::JSQ;

  ExtractionProbes h{model, f, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  auto tag = [&](const std::string& t) { return "ext:" + f.name + ":" + t; };
  auto f0 = f.f, f1 = f.f1, f2 = f.f2;
  ModelSpec mc = model;

  h.lhs0 = probes.time_average(tag("lhs0"), integrands::gauss_legendre([=](const SystemState& z) {
    return d * (lambda - mu * static_cast<double>(z.busy_count())) * f1(compensate(mc, z).x1);
  }));
  auto jump = [f0, mc](const EventRecord& e) {
    return f0(compensate(mc, e.after).x1) - f0(compensate(mc, e.before).x1);
  };
  h.lhsA = probes.event_average(tag("lhsA"), CountingProcess::arrivals(), jump);
  for (std::size_t i = 0; i < n; ++i)
    h.lhsD.push_back(probes.event_average(tag(fmt::format("lhsD{}", i + 1)),
                                          CountingProcess::departures_at(i), jump));
  h.mean_f1 = probes.time_average(tag("Ef'(X)"), [f1, mc](const SystemState& z) {
    return f1(mc.scaled_total(z));
  });
  h.mean_f2 = probes.time_average(tag("Ef''(X)"), [f2, mc](const SystemState& z) {
    return f2(mc.scaled_total(z));
  });

  // |-lambda R_a + mu sum R_s| along a segment: c0 + c1 s
  auto drift_coeffs = [lambda, mu](const SystemState& z) {
    double c0 = -lambda * z.r_a;
    for (std::size_t j = 0; j < z.stations; ++j) c0 += mu * z.r_s[j];
    double c1 = lambda - mu * static_cast<double>(z.busy_count());
    return std::pair{c0, c1};
  };
  h.m0_all = probes.time_average(tag("|-lR_a+mR_s|"), integrands::abs_linear(drift_coeffs));
  for (std::size_t i = 0; i < n; ++i)
    h.m0_idle.push_back(probes.time_average(
        tag(fmt::format("1(Q{}=0)|Q-lR_a+mR_s|", i + 1)),
        integrands::abs_linear([drift_coeffs, i](const SystemState& z) {
          if (z.busy(i)) return std::pair{0.0, 0.0};
          auto [c0, c1] = drift_coeffs(z);
          return std::pair{c0 + static_cast<double>(z.total_queue()), c1};
        })));

  h.mA_cubic = probes.event_average(tag("|1-lU|^3"), CountingProcess::arrivals(),
                                    [lambda](const EventRecord& e) {
                                      return std::pow(std::abs(1.0 - lambda * e.payload), 3);
                                    });
  h.mA_service = probes.event_average(tag("mu sum R_s dA"), CountingProcess::arrivals(),
                                      [mu](const EventRecord& e) {
                                        double s = 0.0;
                                        for (std::size_t j = 0; j < e.before.stations; ++j)
                                          s += e.before.r_s[j];
                                        return mu * s;
                                      });
  auto dx = [mc](const SystemState& before, const SystemState& cur) {
    return std::abs(mc.scaled_total(cur) - mc.scaled_total(before));
  };
  h.mA_window = probes.palm_window_integral(tag("window_A|dX|"), CountingProcess::arrivals(),
                                            WindowKind::NextInterarrival, dx);
  for (std::size_t i = 0; i < n; ++i) {
    const auto proc = CountingProcess::departures_at(i);
    h.mD_cubic.push_back(probes.event_average(tag(fmt::format("|1-mS|^3 dD{}", i + 1)), proc,
                                              [mu](const EventRecord& e) {
                                                return std::pow(std::abs(1.0 - mu * e.payload), 3);
                                              }));
    h.mD_cross.push_back(probes.event_average(
        tag(fmt::format("|-lR_a+sum_j!=i mR_s| dD{}", i + 1)), proc,
        [lambda, mu, i](const EventRecord& e) {
          double c = -lambda * e.before.r_a;
          for (std::size_t j = 0; j < e.before.stations; ++j)
            if (j != i) c += mu * e.before.r_s[j];
          return std::abs(c);
        }));
    h.mD_window.push_back(probes.palm_window_integral(
        tag(fmt::format("window_D{}|dX|", i + 1)), proc,
        jsq ? WindowKind::JSQDepartureWindow : WindowKind::UntilNextDeparture, dx));
    if (jsq)
      h.mD_routing.push_back(probes.palm_window_integral(
          tag(fmt::format("1(Q{}=0)Lambda f''(X-) dD", i + 1)), proc, WindowKind::UntilNextRouting,
          [f2, mc](const SystemState& before, const SystemState&) {
            return f2(mc.scaled_total(before));
          }));
  }
  return h;
}

namespace {

double sum_span(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

ExtractionReport extraction_check(const ExtractionProbes& h, const PalmAccumulators& acc,
                                  double k) {
  const ModelSpec& model = h.model;
  const std::size_t n = model.stations();
  const double nn = static_cast<double>(n);
  const double d = model.delta(), lambda = model.lambda(), mu = model.mu();
  const double cu2 = model.arrival().scv(), cs2 = model.service(0).scv();
  const double sf2 = *h.f.sup_f2, sf3 = *h.f.sup_f3;
  const double f1_at_0 = h.f.f1(0.0);
  const bool jsq = model.topology() == Topology::JSQ;

  ExtractionReport report{model.describe(), h.f.name, {}};
  auto finish = [&](ExtractionRow row) {
    row.pass = std::abs(row.difference.point) <=
               row.majorant.point + k * (row.difference.std_error + row.majorant.std_error);
    report.rows.push_back(std::move(row));
  };

  {
    ExtractionRow row;
    row.term_id = "e0";
    row.lhs = acc.estimate(h.lhs0);
    auto main = [=](double ef1) { return -nn * mu * d * d * ef1 + nn * mu * d * d * f1_at_0; };
    row.main = acc.combine({h.mean_f1}, [main](std::span<const double> v) { return main(v[0]); });
    row.difference = acc.combine({h.lhs0, h.mean_f1},
                                 [main](std::span<const double> v) { return v[0] - main(v[1]); });
    std::vector<ProbeId> ids{h.m0_all};
    ids.insert(ids.end(), h.m0_idle.begin(), h.m0_idle.end());
    row.majorant = acc.combine(ids, [=](std::span<const double> v) {
      return sf2 * (nn * mu * d * d * d * v[0] + mu * d * d * sum_span(v.subspan(1)));
    });
    finish(std::move(row));
  }
  {
    ExtractionRow row;
    row.term_id = "eA";
    row.lhs = acc.estimate(h.lhsA);
    const double c = 0.5 * d * d * lambda * cu2;
    row.main = acc.combine({h.mean_f2}, [c](std::span<const double> v) { return c * v[0]; });
    row.difference =
        acc.combine({h.lhsA, h.mean_f2}, [c](std::span<const double> v) { return v[0] - c * v[1]; });
    row.majorant = acc.combine({h.mA_cubic, h.mA_service, h.mA_window}, [=](std::span<const double> v) {
      return sf3 * (d * d * d * v[0] / 6.0 + 0.5 * d * d * d * cu2 * v[1] +
                    0.5 * d * d * lambda * cu2 * v[2]);
    });
    finish(std::move(row));
  }
  for (std::size_t i = 0; i < n; ++i) {
    ExtractionRow row;
    row.term_id = jsq ? fmt::format("eD{}", i + 1) : "eD";
    row.lhs = acc.estimate(h.lhsD[i]);
    const double c = 0.5 * d * d * mu * cs2;
    row.main = acc.combine({h.mean_f2}, [c](std::span<const double> v) { return c * v[0]; });
    row.difference = acc.combine({h.lhsD[i], h.mean_f2},
                                 [c](std::span<const double> v) { return v[0] - c * v[1]; });
    std::vector<ProbeId> ids{h.mD_cubic[i], h.mD_cross[i], h.mD_window[i]};
    if (jsq) ids.push_back(h.mD_routing[i]);
    const double exact_gg1 = jsq ? 0.0 : std::abs(0.5 * d * d * d * mu * cs2 * h.f.f2(d));
    row.majorant = acc.combine(ids, [=](std::span<const double> v) {
      double m = sf3 * (d * d * d * v[0] / 6.0 + 0.5 * d * d * d * cs2 * v[1] +
                        0.5 * d * d * mu * cs2 * v[2]);
      if (jsq) m += 0.5 * d * d * mu * cs2 * std::abs(v[3]);
      return m + exact_gg1;
    });
    finish(std::move(row));
  }
  return report;
}

}  // namespace clockwork
