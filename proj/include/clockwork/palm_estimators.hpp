#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clockwork/model.hpp"

namespace clockwork {

/// Batch-means point estimate with a Student-t interval.
struct EstimateCI {
  double point = 0.0;
  double half_width = 0.0;
  double std_error = 0.0;
  std::size_t batches = 0;
  double confidence = 0.99;

  double lower() const { return point - half_width; }
  double upper() const { return point + half_width; }
};

/// CI from per-batch values around a given point estimate.
EstimateCI batch_means_ci(std::span<const double> batch_values, double point,
                          double confidence = 0.99);

/// A, D (all departures) or D_i.
struct CountingProcess {
  EventKind kind = EventKind::Arrival;
  std::optional<std::size_t> station;

  static CountingProcess arrivals() { return {EventKind::Arrival, std::nullopt}; }
  static CountingProcess departures() { return {EventKind::Departure, std::nullopt}; }
  static CountingProcess departures_at(std::size_t i) { return {EventKind::Departure, i}; }

  bool matches(const EventRecord& e) const {
    return e.kind == kind && (!station || *station == e.station);
  }
  std::string name() const;
};

/// Window attached to each jump of a counting process.
///
/// NextInterarrival: W = U(t), on A.
/// UntilNextDeparture: W = 1(Q_i(t)=0) * (time until the next customer
///   reaches station i, read off the state) + S_i(t), on D_i.
/// JSQDepartureWindow: W = 1(Q_i(t)=0) * Lambda_i(t) + S_i(t) on D_i, with
///   Lambda_i (time until the next routing to i) resolved from the path.
/// UntilNextRouting: W = 1(Q_i(t)=0) * Lambda_i(t) on D_i.
enum class WindowKind { NextInterarrival, UntilNextDeparture, JSQDepartureWindow, UntilNextRouting };

std::string_view window_kind_name(WindowKind k);

using StateFn = std::function<double(const SystemState&)>;
/// Exact integral over a segment whose clocks start at `start` and run for `duration`.
using TimeIntegrand = std::function<double(const SystemState& start, double duration)>;
using EventProbe = std::function<double(const EventRecord&)>;
/// Integrand of a window integral. `current` must enter only through its
/// queue lengths, which are constant on a segment.
using WindowProbe = std::function<double(const SystemState& event_before, const SystemState& current)>;

namespace integrands {

/// For f depending on queue lengths only.
TimeIntegrand piecewise_constant(StateFn f);
/// Five-point Gauss-Legendre rule on panels of length <= 0.5 along the
/// segment (exact for polynomials of degree <= 9 in the clocks).
TimeIntegrand gauss_legendre(StateFn f);
/// weight(Q) * R_a^k, integrated in closed form.
TimeIntegrand arrival_residual_power(int k, StateFn queue_weight = {});
/// weight(Q) * R_{s,i}^k, integrated in closed form.
TimeIntegrand service_residual_power(std::size_t station, int k, StateFn queue_weight = {});
/// |c0 + c1 s| for coefficients (c0, c1) returned by `coeffs(start)`.
TimeIntegrand abs_linear(std::function<std::pair<double, double>(const SystemState&)> coeffs);

}  // namespace integrands

struct ProbeId {
  std::size_t index = 0;
};

enum class ProbeKind { TimeAverage, EventAverage, WindowIntegral };

/// Registry of the path functionals estimated by one run.
class ProbeSet {
 public:
  struct Probe {
    std::string name;
    ProbeKind kind;
    CountingProcess process;
    WindowKind window = WindowKind::NextInterarrival;
    TimeIntegrand time;
    EventProbe event;
    WindowProbe window_fn;
  };

  /// E f(Z), estimated by (integral of f over the path) / T.
  ProbeId time_average(std::string name, TimeIntegrand integrand);
  ProbeId time_average(std::string name, StateFn queue_only_f) {
    return time_average(std::move(name), integrands::piecewise_constant(std::move(queue_only_f)));
  }
  /// E int_0^1 g dN, estimated by (sum of g over jumps of N) / T.
  ProbeId event_average(std::string name, CountingProcess process, EventProbe g);
  /// E int_0^1 int_0^W f du dN, estimated by (sum of window integrals) / T.
  ProbeId palm_window_integral(std::string name, CountingProcess process, WindowKind kind,
                               WindowProbe f);

  std::size_t size() const { return probes_.size(); }
  const std::vector<Probe>& probes() const { return probes_; }
  const Probe& probe(ProbeId id) const { return probes_.at(id.index); }

 private:
  std::vector<Probe> probes_;
};

/// Per-batch sums of every probe plus per-batch simulated time.
///
/// Estimates are rates: (sum over batches of probe mass) / (total time).
/// Merging adds batch partials elementwise.
class PalmAccumulators {
 public:
  struct ProbeInfo {
    std::string name;
    std::string process;
  };

  PalmAccumulators(std::vector<ProbeInfo> info, std::size_t batches);

  std::size_t batches() const { return batch_time_.size(); }
  std::size_t probes() const { return info_.size(); }
  const ProbeInfo& info(ProbeId id) const { return info_.at(id.index); }

  double horizon() const;
  double batch_time(std::size_t b) const { return batch_time_.at(b); }
  double batch_sum(ProbeId id, std::size_t b) const { return sums_.at(id.index).at(b); }
  double total_sum(ProbeId id) const;

  EstimateCI estimate(ProbeId id, double confidence = 0.99) const;

  /// Estimate of fn(rates...), with the batch-means CI of fn applied per batch.
  EstimateCI combine(const std::vector<ProbeId>& ids,
                     const std::function<double(std::span<const double>)>& fn,
                     double confidence = 0.99) const;

  void merge(const PalmAccumulators& other);

  std::uint64_t events = 0;
  std::uint64_t ties = 0;
  std::uint64_t regenerations = 0;
  std::uint64_t dropped_windows = 0;
  /// Partial window mass discarded at the horizon, per probe.
  std::vector<double> dropped_mass;

  // Recording interface.
  void add_time(std::size_t batch, double dt) { batch_time_[batch] += dt; }
  void add(ProbeId id, std::size_t batch, double value) { sums_[id.index][batch] += value; }

 private:
  std::vector<ProbeInfo> info_;
  std::vector<double> batch_time_;
  std::vector<std::vector<double>> sums_;
};

/// Path observer that fills a PalmAccumulators over `measured_events` events.
class PalmRecorder final : public PathObserver {
 public:
  PalmRecorder(const ModelSpec& model, const ProbeSet& probes, std::size_t batches,
               std::uint64_t measured_events);

  void on_segment(const SystemState& start, double duration) override;
  void on_event(const EventRecord& event) override;

  /// Drops windows still open at the horizon and returns the accumulators.
  PalmAccumulators finish();

 private:
  struct OpenWindow {
    std::size_t batch;
    SystemState before;
    double end;  // NaN until resolved
    double pending_service;
    std::vector<double> mass;
  };
  struct Channel {
    CountingProcess process;
    WindowKind kind;
    std::size_t station;
    std::vector<std::size_t> probe_indices;
    std::deque<OpenWindow> open;
  };

  std::size_t current_batch() const;
  void resolve_routing(std::size_t station, double time);

  const ModelSpec& model_;
  const ProbeSet& probes_;
  PalmAccumulators acc_;
  std::uint64_t batch_size_;
  std::uint64_t seen_events_ = 0;
  std::vector<std::size_t> time_probes_;
  std::vector<std::size_t> event_probes_;
  std::vector<Channel> channels_;
};

}  // namespace clockwork
