#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clockwork/model.hpp"
#include "clockwork/palm_estimators.hpp"

namespace clockwork {

enum class Relation { Equal, AtMost };

struct IdentityRow {
  std::string id;
  EstimateCI estimate;
  double target = 0.0;
  Relation relation = Relation::Equal;
  bool pass = false;
  /// Informational only; excluded from all_pass().
  bool exploratory = false;
};

struct IdentityReport {
  std::vector<IdentityRow> rows;
  /// Set when more than ten identities are checked at once.
  std::optional<std::string> multiplicity_note;

  bool all_pass() const;
  const IdentityRow& row(const std::string& id) const;
};

/// E(R_a | X = 0) estimated from the time average and from idle periods.
struct ConditionalResidual {
  EstimateCI time_ratio;
  /// E I^2 / (2 E I); empty when some batch saw no idle period.
  std::optional<EstimateCI> idle_period_ratio;
  /// Batchwise difference of the two routes.
  std::optional<EstimateCI> difference;
};

/// Stationary identities that follow from the BAR, with targets taken from
/// the clock moments only.
///
/// Construct before simulating: the constructor registers every probe the
/// checks need on `probes`.
class IdentitySuite {
 public:
  IdentitySuite(const ModelSpec& model, std::vector<int> m_values, ProbeSet& probes);

  IdentityReport check_gg1(const PalmAccumulators& acc, double se_multiple = 3.0) const;
  IdentityReport check_jsq(const PalmAccumulators& acc, double se_multiple = 3.0) const;
  /// Per-station residual-moment forms for the tandem; every row exploratory.
  IdentityReport check_tandem(const PalmAccumulators& acc, double se_multiple = 3.0) const;
  IdentityReport check(const PalmAccumulators& acc, double se_multiple = 3.0) const;

  ConditionalResidual conditional_residual_estimate(const PalmAccumulators& acc) const;

 private:
  struct StationProbes {
    ProbeId departures;
    ProbeId busy;
    ProbeId idle;
    std::vector<ProbeId> busy_residual;  // per m: R_s^{m-1} 1(Q>0)
    std::vector<ProbeId> idle_residual;  // per m: R_s^m 1(Q=0)
  };

  ModelSpec model_;
  std::vector<int> m_values_;
  ProbeId arrivals_;
  std::vector<ProbeId> arrival_residual_;  // per m: R_a^{m-1}
  std::vector<StationProbes> stations_;
  // single-server extras
  ProbeId idle_period_sum_{};
  ProbeId idle_period_sq_sum_{};
  ProbeId residual_when_empty_{};
  ProbeId residual_arrival_at_departures_{};
  ProbeId residual_service_at_arrivals_{};
};

}  // namespace clockwork
