#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "clockwork/clock_models.hpp"

namespace clockwork {

inline constexpr std::size_t kMaxStations = 16;

enum class Topology { GG1, JSQ, Tandem2 };

std::string_view topology_name(Topology t);

/// Thrown when a model has rho >= 1 at some station.
class UnstableModel : public std::invalid_argument {
 public:
  UnstableModel(const std::string& what, double rho)
      : std::invalid_argument(what), rho_(rho) {}
  double rho() const { return rho_; }

 private:
  double rho_;
};

/// Markov state Z(t): queue lengths plus residual clocks.
///
/// An idle server carries the presampled service time of the next customer
/// it will serve; that clock does not run while the server is idle.
struct SystemState {
  std::size_t stations = 1;
  std::array<std::int64_t, kMaxStations> queues{};
  std::array<double, kMaxStations> r_s{};
  double r_a = 0.0;
  double clock_time = 0.0;

  bool busy(std::size_t i) const { return queues[i] > 0; }
  std::int64_t total_queue() const;
  std::size_t busy_count() const;

  /// State after `s` time units with no event: r_a and busy r_s decrease.
  SystemState advanced(double s) const;
};

enum class EventKind { Arrival, Departure };

/// One jump of the process. For arrivals `station` is where the customer
/// was routed; for departures it is the station that completed service.
/// `before` is Z(t-) (the firing clock reads 0), `after` is Z(t), and
/// `payload` is the freshly sampled U(t) or S_i(t).
struct EventRecord {
  double time = 0.0;
  EventKind kind = EventKind::Arrival;
  std::size_t station = 0;
  SystemState before;
  SystemState after;
  double payload = 0.0;
  bool tie = false;
};

/// Receives every inter-event segment and event of a path.
class PathObserver {
 public:
  virtual ~PathObserver() = default;
  /// Clocks evolve linearly from `start` for `duration` time units.
  virtual void on_segment(const SystemState& start, double duration) = 0;
  virtual void on_event(const EventRecord& event) = 0;
};

/// One of the three supported networks plus its derived rates.
class ModelSpec {
 public:
  static ModelSpec gg1(ClockSpec arrival, ClockSpec service);
  static ModelSpec jsq(std::size_t servers, ClockSpec arrival, ClockSpec service);
  static ModelSpec tandem(ClockSpec arrival, ClockSpec service1, ClockSpec service2);

  Topology topology() const { return topology_; }
  std::size_t stations() const { return services_.size(); }
  const ClockSpec& arrival() const { return arrival_; }
  const ClockSpec& service(std::size_t i) const { return services_.at(i); }

  double lambda() const { return 1.0 / arrival_.mean(); }
  double mu(std::size_t i = 0) const { return 1.0 / services_.at(i).mean(); }

  /// GG1: lambda/mu; JSQ: lambda/(n mu); tandem: rho_i = lambda/mu_i.
  double rho(std::size_t i = 0) const;
  double delta(std::size_t i = 0) const { return 1.0 - rho(i); }
  double max_rho() const;
  bool stable() const { return max_rho() < 1.0; }
  void require_stable() const;

  /// Scale factor applied to queue i in the scaled state X.
  double queue_scale(std::size_t i) const { return delta(i); }

  /// Scaled total: delta * sum Q_i (GG1/JSQ) or delta1 Q1 + delta2 Q2 (tandem).
  double scaled_total(const SystemState& z) const;

  /// Stations fed directly by the external arrival stream.
  bool fed_by_arrivals(std::size_t i) const {
    return topology_ != Topology::Tandem2 || i == 0;
  }

  /// True when any clock is deterministic, so event ties can occur.
  bool tie_risk() const;

  std::string describe() const;

  SystemState empty_state() const;

 private:
  ModelSpec(Topology t, ClockSpec arrival, std::vector<ClockSpec> services);

  Topology topology_;
  ClockSpec arrival_;
  std::vector<ClockSpec> services_;
};

}  // namespace clockwork
