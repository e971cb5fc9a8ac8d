#include "clockwork/model.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace clockwork {

std::string_view topology_name(Topology t) {
  switch (t) {
    case Topology::GG1: return "gg1";
    case Topology::JSQ: return "jsq";
    case Topology::Tandem2: return "tandem";
  }
  return "unknown";
}

std::int64_t SystemState::total_queue() const {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < stations; ++i) total += queues[i];
  return total;
}

std::size_t SystemState::busy_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < stations; ++i) n += busy(i) ? 1 : 0;
  return n;
}

SystemState SystemState::advanced(double s) const {
  SystemState out = *this;
  out.r_a -= s;
  for (std::size_t i = 0; i < stations; ++i)
    if (busy(i)) out.r_s[i] -= s;
  out.clock_time += s;
  return out;
}

ModelSpec::ModelSpec(Topology t, ClockSpec arrival, std::vector<ClockSpec> services)
    : topology_(t), arrival_(std::move(arrival)), services_(std::move(services)) {}

ModelSpec ModelSpec::gg1(ClockSpec arrival, ClockSpec service) {
  return ModelSpec(Topology::GG1, std::move(arrival), {std::move(service)});
}

ModelSpec ModelSpec::jsq(std::size_t servers, ClockSpec arrival, ClockSpec service) {
  if (servers < 1 || servers > kMaxStations)
    throw std::invalid_argument(
        fmt::format("jsq: server count must be in [1, {}], got {}", kMaxStations, servers));
  return ModelSpec(Topology::JSQ, std::move(arrival),
                   std::vector<ClockSpec>(servers, std::move(service)));
}

ModelSpec ModelSpec::tandem(ClockSpec arrival, ClockSpec service1, ClockSpec service2) {
  return ModelSpec(Topology::Tandem2, std::move(arrival),
                   {std::move(service1), std::move(service2)});
}

double ModelSpec::rho(std::size_t i) const {
  switch (topology_) {
    case Topology::GG1: return lambda() / mu(0);
    case Topology::JSQ: return lambda() / (static_cast<double>(stations()) * mu(0));
    case Topology::Tandem2: return lambda() / mu(i);
  }
  return 0.0;
}

double ModelSpec::max_rho() const {
  double r = 0.0;
  for (std::size_t i = 0; i < stations(); ++i) r = std::max(r, rho(i));
  return r;
}

void ModelSpec::require_stable() const {
  const double r = max_rho();
  if (!(r < 1.0))
    throw UnstableModel(fmt::format("unstable model {}: rho = {:.6g} >= 1", describe(), r), r);
}

double ModelSpec::scaled_total(const SystemState& z) const {
  if (topology_ == Topology::Tandem2)
    return delta(0) * static_cast<double>(z.queues[0]) +
           delta(1) * static_cast<double>(z.queues[1]);
  return delta(0) * static_cast<double>(z.total_queue());
}

bool ModelSpec::tie_risk() const {
  if (arrival_.is_deterministic()) return true;
  return std::any_of(services_.begin(), services_.end(),
                     [](const ClockSpec& s) { return s.is_deterministic(); });
}

std::string ModelSpec::describe() const {
  switch (topology_) {
    case Topology::GG1:
      return fmt::format("GG1[U={}, S={}]", arrival_.describe(), services_[0].describe());
    case Topology::JSQ:
      return fmt::format("JSQ{}[U={}, S={}]", stations(), arrival_.describe(),
                         services_[0].describe());
    case Topology::Tandem2:
      return fmt::format("Tandem[U={}, S1={}, S2={}]", arrival_.describe(),
                         services_[0].describe(), services_[1].describe());
  }
  return {};
}

SystemState ModelSpec::empty_state() const {
  SystemState z;
  z.stations = stations();
  return z;
}

}  // namespace clockwork
