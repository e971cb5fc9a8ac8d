#include "clockwork/des_engine.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <thread>

#include <fmt/format.h>

namespace clockwork {
namespace {

constexpr std::uint64_t kArrivalStream = 0;
constexpr std::uint64_t kRoutingStream = 1;
constexpr std::uint64_t kFirstServiceStream = 2;

std::size_t route_arrival(const SystemState& state, const ModelSpec& model,
                          ClockStreams& streams) {
  if (model.topology() != Topology::JSQ || model.stations() == 1) return 0;
  std::array<std::size_t, kMaxStations> shortest{};
  std::size_t count = 0;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 0; i < state.stations; ++i) {
    if (state.queues[i] < best) {
      best = state.queues[i];
      count = 0;
    }
    if (state.queues[i] == best) shortest[count++] = i;
  }
  return count == 1 ? shortest[0] : shortest[streams.routing().index(count)];
}

}  // namespace

ClockStreams::ClockStreams(std::uint64_t seed, std::uint64_t replication, std::size_t stations)
    : arrivals_(seed, replication, kArrivalStream), routing_(seed, replication, kRoutingStream) {
  services_.reserve(stations);
  for (std::size_t i = 0; i < stations; ++i)
    services_.emplace_back(seed, replication, kFirstServiceStream + i);
}

EventRecord step(SystemState& state, const ModelSpec& model, ClockStreams& streams) {
  // Departures first, lower station first: strict '<' keeps the earliest candidate.
  constexpr std::size_t kArrival = kMaxStations;
  std::size_t firing = kArrival;
  double next = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.stations; ++i) {
    if (state.busy(i) && state.r_s[i] < next) {
      next = state.r_s[i];
      firing = i;
    }
  }
  if (state.r_a < next) {
    next = state.r_a;
    firing = kArrival;
  }
  bool tie = false;
  if (firing != kArrival && state.r_a == next) tie = true;
  for (std::size_t i = 0; i < state.stations; ++i)
    if (i != firing && state.busy(i) && state.r_s[i] == next) tie = true;

  const double dt = std::max(next, 0.0);
  state.r_a -= dt;
  for (std::size_t i = 0; i < state.stations; ++i)
    if (state.busy(i)) state.r_s[i] -= dt;
  state.clock_time += dt;

  EventRecord rec;
  rec.time = state.clock_time;
  rec.tie = tie;
  if (firing == kArrival) {
    state.r_a = 0.0;
    rec.kind = EventKind::Arrival;
    rec.before = state;
    const std::size_t target = route_arrival(state, model, streams);
    rec.station = target;
    ++state.queues[target];
    rec.payload = model.arrival().sample(streams.arrivals());
    state.r_a = rec.payload;
  } else {
    state.r_s[firing] = 0.0;
    rec.kind = EventKind::Departure;
    rec.station = firing;
    rec.before = state;
    --state.queues[firing];
    rec.payload = model.service(firing).sample(streams.service(firing));
    state.r_s[firing] = rec.payload;
    if (model.topology() == Topology::Tandem2 && firing == 0) ++state.queues[1];
  }
  rec.after = state;
  return rec;
}

Simulator::Simulator(ModelSpec model, std::uint64_t seed, std::uint64_t replication)
    : model_(std::move(model)),
      streams_(seed, replication, model_.stations()),
      state_(model_.empty_state()) {
  state_.r_a = model_.arrival().sample(streams_.arrivals());
  for (std::size_t i = 0; i < model_.stations(); ++i)
    state_.r_s[i] = model_.service(i).sample(streams_.service(i));
}

Simulator::Simulator(ModelSpec model, SystemState initial, std::uint64_t seed,
                     std::uint64_t replication)
    : model_(std::move(model)),
      streams_(seed, replication, model_.stations()),
      state_(initial) {
  if (state_.stations != model_.stations())
    throw std::invalid_argument("Simulator: initial state has the wrong number of stations");
}

const EventRecord& Simulator::step() {
  last_ = clockwork::step(state_, model_, streams_);
  ++events_;
  if (last_.tie) ++ties_;
  if (last_.kind == EventKind::Arrival && last_.before.total_queue() == 0) ++regenerations_;
  return last_;
}

PathSummary run_path(const ModelSpec& model, const RunOptions& options, PathObserver& observer) {
  model.require_stable();
  Simulator sim(model, options.seed, options.replication);
  const std::uint64_t min_burn = options.burn_in_events.value_or(options.total_events / 10);
  if (min_burn >= options.total_events)
    throw std::invalid_argument(fmt::format("total_events ({}) must exceed burn-in ({})",
                                            options.total_events, min_burn));
  while (sim.events() < min_burn || (!options.burn_in_events && sim.regenerations() < 10)) {
    if (sim.events() >= options.total_events)
      throw std::runtime_error("burn-in did not reach 10 regenerations within total_events");
    sim.step();
  }
  PathSummary summary;
  summary.burn_in_events = sim.events();
  summary.measured_events = options.total_events - summary.burn_in_events;
  const std::uint64_t regen_before = sim.regenerations();
  const std::uint64_t ties_before = sim.ties();
  SystemState segment_start = sim.state();
  for (std::uint64_t k = 0; k < summary.measured_events; ++k) {
    const EventRecord& rec = sim.step();
    observer.on_segment(segment_start, rec.time - segment_start.clock_time);
    observer.on_event(rec);
    segment_start = rec.after;
  }
  summary.ties = sim.ties() - ties_before;
  summary.regenerations = sim.regenerations() - regen_before;
  return summary;
}

PalmAccumulators simulate(const ModelSpec& model, const RunOptions& options,
                          const ProbeSet& probes) {
  model.require_stable();
  // Resolve the burn-in first so the batch size is known before recording.
  RunOptions resolved = options;
  if (!resolved.burn_in_events) {
    Simulator scout(model, options.seed, options.replication);
    const std::uint64_t min_burn = options.total_events / 10;
    while (scout.events() < min_burn || scout.regenerations() < 10) {
      if (scout.events() >= options.total_events)
        throw std::runtime_error("burn-in did not reach 10 regenerations within total_events");
      scout.step();
    }
    resolved.burn_in_events = scout.events();
  }
  const std::uint64_t burn = *resolved.burn_in_events;
  if (burn >= resolved.total_events)
    throw std::invalid_argument(fmt::format("total_events ({}) must exceed burn-in ({})",
                                            resolved.total_events, burn));
  PalmRecorder recorder(model, probes, resolved.batches, resolved.total_events - burn);
  const PathSummary summary = run_path(model, resolved, recorder);
  PalmAccumulators acc = recorder.finish();
  acc.regenerations = summary.regenerations;
  return acc;
}

PalmAccumulators simulate_replications(const ModelSpec& model, const RunOptions& options,
                                       const ProbeSet& probes, std::size_t count,
                                       std::size_t jobs) {
  if (count == 0) throw std::invalid_argument("simulate_replications: need at least one replication");
  std::vector<std::optional<PalmAccumulators>> results(count);
  std::vector<std::exception_ptr> errors(count);
  auto run_one = [&](std::size_t r) {
    try {
      RunOptions o = options;
      o.replication = options.replication + r;
      results[r].emplace(simulate(model, o, probes));
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t r = 0; r < count; ++r) run_one(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < count; r = next++) run_one(r);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  PalmAccumulators merged = std::move(*results[0]);
  for (std::size_t r = 1; r < count; ++r) merged.merge(*results[r]);
  return merged;
}

std::vector<SystemState> stationary_samples(const ModelSpec& model, std::size_t count,
                                            std::uint64_t spacing_events,
                                            std::uint64_t burn_in_events, std::uint64_t seed) {
  if (spacing_events < 1) throw std::invalid_argument("stationary_samples: spacing must be >= 1");
  model.require_stable();
  std::vector<SystemState> out;
  if (count == 0) return out;
  out.reserve(count);
  Simulator sim(model, seed);
  const double t0 = sim.state().clock_time;
  for (std::uint64_t k = 0; k < burn_in_events; ++k) sim.step();
  // Post-event snapshots follow the event-stationary law, so sample at fixed
  // times instead, spaced by the mean length of `spacing_events` events.
  const double per_event =
      burn_in_events > 0 ? (sim.state().clock_time - t0) / static_cast<double>(burn_in_events)
                         : 1.0 / model.lambda();
  const double gap = per_event * static_cast<double>(spacing_events);
  double next = sim.state().clock_time + gap;
  while (out.size() < count) {
    SystemState prev = sim.state();
    sim.step();
    while (out.size() < count && sim.state().clock_time > next) {
      out.push_back(prev.advanced(next - prev.clock_time));
      next += gap;
    }
  }
  return out;
}

void write_event_log(std::ostream& out, const ModelSpec& model, std::uint64_t seed,
                     std::uint64_t max_events) {
  out << "time,kind,station";
  for (std::size_t i = 0; i < model.stations(); ++i) out << ",q" << i + 1 << "_before";
  out << ",r_a_before,payload\n";
  Simulator sim(model, seed);
  for (std::uint64_t k = 0; k < max_events; ++k) {
    const EventRecord& e = sim.step();
    out << fmt::format("{:.17g},{},{}", e.time,
                       e.kind == EventKind::Arrival ? "arrival" : "departure", e.station + 1);
    for (std::size_t i = 0; i < model.stations(); ++i) out << ',' << e.before.queues[i];
    out << fmt::format(",{:.17g},{:.17g}\n", e.before.r_a, e.payload);
  }
}

}  // namespace clockwork
