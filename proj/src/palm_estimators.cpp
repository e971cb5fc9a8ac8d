#include "clockwork/palm_estimators.hpp"

#include <array>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace clockwork {

EstimateCI batch_means_ci(std::span<const double> batch_values, double point, double confidence) {
  EstimateCI out;
  out.point = point;
  out.batches = batch_values.size();
  out.confidence = confidence;
  if (batch_values.size() < 2) return out;
  const double n = static_cast<double>(batch_values.size());
  const double mean = std::accumulate(batch_values.begin(), batch_values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : batch_values) ss += (v - mean) * (v - mean);
  out.std_error = std::sqrt(ss / (n - 1.0) / n);
  const boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - confidence) / 2.0));
  out.half_width = t * out.std_error;
  return out;
}

std::string CountingProcess::name() const {
  if (kind == EventKind::Arrival) return "A";
  return station ? fmt::format("D{}", *station + 1) : std::string("D");
}

std::string_view window_kind_name(WindowKind k) {
  switch (k) {
    case WindowKind::NextInterarrival: return "next_interarrival";
    case WindowKind::UntilNextDeparture: return "until_next_departure";
    case WindowKind::JSQDepartureWindow: return "jsq_departure_window";
    case WindowKind::UntilNextRouting: return "until_next_routing";
  }
  return "unknown";
}

namespace integrands {

TimeIntegrand piecewise_constant(StateFn f) {
  return [f = std::move(f)](const SystemState& start, double duration) {
    return f(start) * duration;
  };
}

TimeIntegrand gauss_legendre(StateFn f) {
  return [f = std::move(f)](const SystemState& start, double duration) {
    static constexpr std::array<double, 5> kNodes = {
        0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
        0.9061798459386640};
    static constexpr std::array<double, 5> kWeights = {
        0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
        0.2369268850561891};
    // panels of length <= 0.5 keep non-polynomial integrands accurate on long segments
    const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil(duration / 0.5)));
    const double width = duration / static_cast<double>(panels);
    const double half = 0.5 * width;
    double total = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
      const double offset = static_cast<double>(p) * width;
      for (std::size_t k = 0; k < kNodes.size(); ++k)
        total += kWeights[k] * f(start.advanced(offset + half * (1.0 + kNodes[k])));
    }
    return total * half;
  };
}

namespace {

// Integral of r(s)^k over [0, duration] for r(s) = r0 - s.
double decaying_power_integral(double r0, int k, double duration) {
  const double r1 = r0 - duration;
  return (std::pow(r0, k + 1) - std::pow(r1, k + 1)) / (k + 1);
}

}  // namespace

TimeIntegrand arrival_residual_power(int k, StateFn queue_weight) {
  return [k, w = std::move(queue_weight)](const SystemState& start, double duration) {
    const double weight = w ? w(start) : 1.0;
    if (weight == 0.0) return 0.0;
    return weight * decaying_power_integral(start.r_a, k, duration);
  };
}

TimeIntegrand service_residual_power(std::size_t station, int k, StateFn queue_weight) {
  return [station, k, w = std::move(queue_weight)](const SystemState& start, double duration) {
    const double weight = w ? w(start) : 1.0;
    if (weight == 0.0) return 0.0;
    const double r = start.r_s[station];
    if (!start.busy(station)) return weight * std::pow(r, k) * duration;
    return weight * decaying_power_integral(r, k, duration);
  };
}

TimeIntegrand abs_linear(std::function<std::pair<double, double>(const SystemState&)> coeffs) {
  return [c = std::move(coeffs)](const SystemState& start, double duration) {
    const auto [c0, c1] = c(start);
    const double c_end = c0 + c1 * duration;
    if ((c0 >= 0.0) == (c_end >= 0.0)) return 0.5 * std::abs(c0 + c_end) * duration;
    // sign change at s* = -c0 / c1
    const double root = -c0 / c1;
    return 0.5 * (std::abs(c0) * root + std::abs(c_end) * (duration - root));
  };
}

}  // namespace integrands

ProbeId ProbeSet::time_average(std::string name, TimeIntegrand integrand) {
  Probe p{std::move(name), ProbeKind::TimeAverage, CountingProcess::arrivals(),
          WindowKind::NextInterarrival, std::move(integrand), {}, {}};
  probes_.push_back(std::move(p));
  return {probes_.size() - 1};
}

ProbeId ProbeSet::event_average(std::string name, CountingProcess process, EventProbe g) {
  Probe p{std::move(name), ProbeKind::EventAverage, process, WindowKind::NextInterarrival,
          {}, std::move(g), {}};
  probes_.push_back(std::move(p));
  return {probes_.size() - 1};
}

ProbeId ProbeSet::palm_window_integral(std::string name, CountingProcess process,
                                       WindowKind kind, WindowProbe f) {
  const bool arrival_window = kind == WindowKind::NextInterarrival;
  if (arrival_window != (process.kind == EventKind::Arrival))
    throw std::invalid_argument(fmt::format("window {} does not attach to process {}",
                                            window_kind_name(kind), process.name()));
  Probe p{std::move(name), ProbeKind::WindowIntegral, process, kind, {}, {}, std::move(f)};
  probes_.push_back(std::move(p));
  return {probes_.size() - 1};
}

PalmAccumulators::PalmAccumulators(std::vector<ProbeInfo> info, std::size_t batches)
    : dropped_mass(info.size(), 0.0),
      info_(std::move(info)),
      batch_time_(batches, 0.0),
      sums_(info_.size(), std::vector<double>(batches, 0.0)) {
  if (batches < 2) throw std::invalid_argument("PalmAccumulators: need at least 2 batches");
}

double PalmAccumulators::horizon() const {
  return std::accumulate(batch_time_.begin(), batch_time_.end(), 0.0);
}

double PalmAccumulators::total_sum(ProbeId id) const {
  const auto& s = sums_.at(id.index);
  return std::accumulate(s.begin(), s.end(), 0.0);
}

EstimateCI PalmAccumulators::estimate(ProbeId id, double confidence) const {
  return combine({id}, [](std::span<const double> r) { return r[0]; }, confidence);
}

EstimateCI PalmAccumulators::combine(const std::vector<ProbeId>& ids,
                                     const std::function<double(std::span<const double>)>& fn,
                                     double confidence) const {
  const std::size_t nb = batches();
  std::vector<double> rates(ids.size());
  std::vector<double> batch_values(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    if (!(batch_time_[b] > 0.0)) throw std::runtime_error("PalmAccumulators: empty batch");
    for (std::size_t k = 0; k < ids.size(); ++k) rates[k] = sums_.at(ids[k].index)[b] / batch_time_[b];
    batch_values[b] = fn(rates);
  }
  const double total_time = horizon();
  for (std::size_t k = 0; k < ids.size(); ++k) rates[k] = total_sum(ids[k]) / total_time;
  const double point = fn(rates);
  if (!std::isfinite(point)) throw std::runtime_error("PalmAccumulators: non-finite estimate");
  return batch_means_ci(batch_values, point, confidence);
}

void PalmAccumulators::merge(const PalmAccumulators& other) {
  if (other.batches() != batches() || other.probes() != probes())
    throw std::invalid_argument("PalmAccumulators::merge: incompatible layouts");
  for (std::size_t b = 0; b < batches(); ++b) batch_time_[b] += other.batch_time_[b];
  for (std::size_t p = 0; p < probes(); ++p) {
    for (std::size_t b = 0; b < batches(); ++b) sums_[p][b] += other.sums_[p][b];
    dropped_mass[p] += other.dropped_mass[p];
  }
  events += other.events;
  ties += other.ties;
  regenerations += other.regenerations;
  dropped_windows += other.dropped_windows;
}

namespace {

std::vector<PalmAccumulators::ProbeInfo> probe_info(const ProbeSet& probes) {
  std::vector<PalmAccumulators::ProbeInfo> out;
  for (const auto& p : probes.probes()) {
    std::string process = "time";
    if (p.kind != ProbeKind::TimeAverage) process = p.process.name();
    out.push_back({p.name, process});
  }
  return out;
}

constexpr double kUnresolved = std::numeric_limits<double>::quiet_NaN();

}  // namespace

PalmRecorder::PalmRecorder(const ModelSpec& model, const ProbeSet& probes, std::size_t batches,
                           std::uint64_t measured_events)
    : model_(model),
      probes_(probes),
      acc_(probe_info(probes), batches),
      batch_size_(measured_events / batches) {
  if (batch_size_ == 0)
    throw std::invalid_argument(
        fmt::format("run too short: {} measured events for {} batches", measured_events, batches));
  const auto& all = probes.probes();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& p = all[i];
    switch (p.kind) {
      case ProbeKind::TimeAverage: time_probes_.push_back(i); break;
      case ProbeKind::EventAverage: event_probes_.push_back(i); break;
      case ProbeKind::WindowIntegral: {
        std::size_t station = 0;
        if (p.process.kind == EventKind::Departure) {
          if (p.process.station) {
            station = *p.process.station;
          } else if (model.stations() != 1) {
            throw std::invalid_argument("departure windows need a station in multi-station models");
          }
          if (station >= model.stations())
            throw std::invalid_argument("departure window station out of range");
          if (p.window == WindowKind::UntilNextDeparture && model.topology() == Topology::JSQ &&
              model.stations() > 1)
            throw std::invalid_argument(
                "until_next_departure needs a state-readable routing time; use "
                "jsq_departure_window for JSQ");
        }
        auto it = std::find_if(channels_.begin(), channels_.end(), [&](const Channel& c) {
          return c.kind == p.window && c.process.kind == p.process.kind && c.station == station;
        });
        if (it == channels_.end()) {
          channels_.push_back(Channel{p.process, p.window, station, {}, {}});
          it = std::prev(channels_.end());
        }
        it->probe_indices.push_back(i);
        break;
      }
    }
  }
}

std::size_t PalmRecorder::current_batch() const {
  const std::uint64_t b = seen_events_ / batch_size_;
  return static_cast<std::size_t>(std::min<std::uint64_t>(b, acc_.batches() - 1));
}

void PalmRecorder::on_segment(const SystemState& start, double duration) {
  const std::size_t batch = current_batch();
  acc_.add_time(batch, duration);
  const auto& all = probes_.probes();
  for (std::size_t i : time_probes_) {
    const double v = all[i].time(start, duration);
    if (!std::isfinite(v)) throw std::runtime_error("probe '" + all[i].name + "' returned a non-finite value");
    acc_.add({i}, batch, v);
  }
  const double seg_start = start.clock_time;
  const double seg_end = seg_start + duration;
  for (auto& channel : channels_) {
    for (auto& w : channel.open) {
      const double covered =
          std::isnan(w.end) ? duration : std::clamp(w.end - seg_start, 0.0, duration);
      if (covered <= 0.0) continue;
      for (std::size_t k = 0; k < channel.probe_indices.size(); ++k)
        w.mass[k] += all[channel.probe_indices[k]].window_fn(w.before, start) * covered;
    }
    while (!channel.open.empty()) {
      // Windows close in start order for every window kind.
      auto it = std::find_if(channel.open.begin(), channel.open.end(), [&](const OpenWindow& w) {
        return !std::isnan(w.end) && w.end <= seg_end;
      });
      if (it == channel.open.end()) break;
      for (std::size_t k = 0; k < channel.probe_indices.size(); ++k)
        acc_.add({channel.probe_indices[k]}, it->batch, it->mass[k]);
      channel.open.erase(it);
    }
  }
}

void PalmRecorder::resolve_routing(std::size_t station, double time) {
  for (auto& channel : channels_) {
    if (channel.station != station || channel.process.kind != EventKind::Departure) continue;
    if (channel.kind != WindowKind::JSQDepartureWindow && channel.kind != WindowKind::UntilNextRouting)
      continue;
    for (auto& w : channel.open)
      if (std::isnan(w.end)) w.end = time + w.pending_service;
  }
}

void PalmRecorder::on_event(const EventRecord& event) {
  const std::size_t batch = current_batch();
  ++seen_events_;
  ++acc_.events;
  if (event.tie) ++acc_.ties;
  const auto& all = probes_.probes();
  for (std::size_t i : event_probes_) {
    if (!all[i].process.matches(event)) continue;
    const double v = all[i].event(event);
    if (!std::isfinite(v)) throw std::runtime_error("probe '" + all[i].name + "' returned a non-finite value");
    acc_.add({i}, batch, v);
  }
  if (channels_.empty()) return;

  // Pending Lambda_i windows resolve when a customer is next routed to i.
  if (event.kind == EventKind::Arrival) {
    resolve_routing(event.station, event.time);
  } else if (model_.topology() == Topology::Tandem2 && event.station == 0) {
    resolve_routing(1, event.time);
  }

  const double t = event.time;
  for (auto& channel : channels_) {
    if (channel.process.kind != event.kind) continue;
    if (channel.process.kind == EventKind::Departure && event.station != channel.station) continue;
    OpenWindow w{batch, event.before, kUnresolved, 0.0,
                 std::vector<double>(channel.probe_indices.size(), 0.0)};
    const std::size_t i = channel.station;
    switch (channel.kind) {
      case WindowKind::NextInterarrival:
        w.end = t + event.payload;
        break;
      case WindowKind::UntilNextDeparture: {
        double wait = 0.0;
        if (!event.after.busy(i)) {
          wait = model_.fed_by_arrivals(i)
                     ? event.after.r_a
                     : (event.after.busy(0) ? 0.0 : event.after.r_a) + event.after.r_s[0];
        }
        w.end = t + wait + event.payload;
        break;
      }
      case WindowKind::JSQDepartureWindow:
        if (event.after.busy(i)) {
          w.end = t + event.payload;
        } else {
          w.pending_service = event.payload;
        }
        break;
      case WindowKind::UntilNextRouting:
        if (event.after.busy(i)) continue;  // zero-length window
        break;
    }
    channel.open.push_back(std::move(w));
  }
}

PalmAccumulators PalmRecorder::finish() {
  for (auto& channel : channels_) {
    for (auto& w : channel.open) {
      ++acc_.dropped_windows;
      for (std::size_t k = 0; k < channel.probe_indices.size(); ++k)
        acc_.dropped_mass[channel.probe_indices[k]] += w.mass[k];
    }
    channel.open.clear();
  }
  return std::move(acc_);
}

}  // namespace clockwork
