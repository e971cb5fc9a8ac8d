#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "clockwork/model.hpp"
#include "clockwork/palm_estimators.hpp"
#include "clockwork/random_stream.hpp"

namespace clockwork {

/// Independent substreams for one replication: arrivals, JSQ routing
/// tie-breaks, and one service stream per station.
class ClockStreams {
 public:
  ClockStreams(std::uint64_t seed, std::uint64_t replication, std::size_t stations);

  RandomStream& arrivals() { return arrivals_; }
  RandomStream& routing() { return routing_; }
  RandomStream& service(std::size_t i) { return services_.at(i); }

 private:
  RandomStream arrivals_;
  RandomStream routing_;
  std::vector<RandomStream> services_;
};

/// Advance `state` to the next event and apply the jump.
///
/// Ties between clocks (only possible with deterministic clocks) go to
/// departures before arrivals and to the lower station index; the record's
/// `tie` flag is set.
EventRecord step(SystemState& state, const ModelSpec& model, ClockStreams& streams);

/// Sequential event-driven simulator for a single replication.
class Simulator {
 public:
  /// Starts from the empty system with fresh interarrival and service samples.
  Simulator(ModelSpec model, std::uint64_t seed, std::uint64_t replication = 0);
  Simulator(ModelSpec model, SystemState initial, std::uint64_t seed,
            std::uint64_t replication = 0);

  const ModelSpec& model() const { return model_; }
  const SystemState& state() const { return state_; }

  const EventRecord& step();

  std::uint64_t events() const { return events_; }
  std::uint64_t ties() const { return ties_; }
  /// Arrivals that found the whole system empty.
  std::uint64_t regenerations() const { return regenerations_; }

 private:
  ModelSpec model_;
  ClockStreams streams_;
  SystemState state_;
  EventRecord last_;
  std::uint64_t events_ = 0;
  std::uint64_t ties_ = 0;
  std::uint64_t regenerations_ = 0;
};

struct RunOptions {
  std::uint64_t total_events = 1'000'000;
  /// Unset: the later of 10% of total_events and the 10th regeneration.
  std::optional<std::uint64_t> burn_in_events;
  std::uint64_t seed = 1;
  std::uint64_t replication = 0;
  std::size_t batches = 32;
};

struct PathSummary {
  std::uint64_t burn_in_events = 0;
  std::uint64_t measured_events = 0;
  std::uint64_t ties = 0;
  std::uint64_t regenerations = 0;
};

/// Run burn-in, then feed `measured` events (total minus burn-in) to the
/// observer. Rejects unstable models before running.
PathSummary run_path(const ModelSpec& model, const RunOptions& options, PathObserver& observer);

/// Simulate one replication and estimate every probe in `probes`.
PalmAccumulators simulate(const ModelSpec& model, const RunOptions& options,
                          const ProbeSet& probes);

/// Replications 0..count-1 of `options`, merged in replication order.
PalmAccumulators simulate_replications(const ModelSpec& model, const RunOptions& options,
                                       const ProbeSet& probes, std::size_t count,
                                       std::size_t jobs);

/// Time-stationary snapshots after burn-in, at fixed epochs spaced by the
/// mean duration of `spacing_events` events (measured during burn-in).
std::vector<SystemState> stationary_samples(const ModelSpec& model, std::size_t count,
                                            std::uint64_t spacing_events,
                                            std::uint64_t burn_in_events, std::uint64_t seed);

/// CSV dump of the first `max_events` events:
/// time,kind,station,q<i>_before...,r_a_before,payload.
void write_event_log(std::ostream& out, const ModelSpec& model, std::uint64_t seed,
                     std::uint64_t max_events);

}  // namespace clockwork
