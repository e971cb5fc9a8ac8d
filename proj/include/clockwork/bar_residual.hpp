#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "clockwork/model.hpp"
#include "clockwork/palm_estimators.hpp"
#include "clockwork/test_functions.hpp"

namespace clockwork {

/// X~ for GG1/JSQ (x2 unused) or the tandem pair.
struct CompensatedState {
  double x1 = 0.0;
  double x2 = 0.0;
};

CompensatedState compensate(const ModelSpec& model, const SystemState& z);

struct TermEstimate {
  std::string term_id;
  EstimateCI estimate;
};

struct TermReport {
  std::string model_id;
  std::string f_id;
  std::vector<TermEstimate> terms;
  /// Signed sum of the terms, with paired batch-means CI.
  EstimateCI residual;

  bool pass(double se_multiple = 3.0) const {
    return std::abs(residual.point) <= se_multiple * residual.std_error;
  }
};

/// Probes registered for one BAR; hand back to bar_terms after simulating.
struct BarProbes {
  std::string model_id;
  std::string f_id;
  std::vector<std::pair<std::string, ProbeId>> terms;
};

BarProbes register_full_bar(const ModelSpec& model, const StateTestFunction& f, ProbeSet& probes);
/// GG1 and JSQ: f applied to the scalar X~.
BarProbes register_compensated_bar(const ModelSpec& model, const TestFunction1D& f,
                                   ProbeSet& probes);
/// Tandem: f applied to (X~1, X~2).
BarProbes register_compensated_bar(const ModelSpec& model, const TestFunction2D& f,
                                   ProbeSet& probes);

TermReport bar_terms(const BarProbes& handle, const PalmAccumulators& acc);
inline TermReport full_bar_terms(const BarProbes& h, const PalmAccumulators& acc) {
  return bar_terms(h, acc);
}
inline TermReport compensated_bar_terms(const BarProbes& h, const PalmAccumulators& acc) {
  return bar_terms(h, acc);
}

/// Mean of the first compensated coordinate's jump per arrival.
struct JumpProbes {
  ProbeId jump;
  ProbeId count;
};
JumpProbes register_zero_mean_jump(const ModelSpec& model, ProbeSet& probes);
EstimateCI zero_mean_jump(const JumpProbes& h, const PalmAccumulators& acc);

struct ExtractionRow {
  std::string term_id;  // e0, eA, eD (GG1) or eD<i> (JSQ)
  EstimateCI lhs;
  EstimateCI main;
  EstimateCI difference;
  EstimateCI majorant;
  bool pass = false;
};

struct ExtractionReport {
  std::string model_id;
  std::string f_id;
  std::vector<ExtractionRow> rows;
  bool all_pass() const;
};

struct ExtractionProbes {
  ModelSpec model;
  TestFunction1D f;
  ProbeId lhs0, lhsA;
  std::vector<ProbeId> lhsD;
  ProbeId mean_f1, mean_f2;
  ProbeId m0_all;
  std::vector<ProbeId> m0_idle;
  ProbeId mA_cubic, mA_service, mA_window;
  std::vector<ProbeId> mD_cubic, mD_cross, mD_window, mD_routing;
};

/// GG1 or JSQ; f must have finite sup norms of f'' and f'''.
ExtractionProbes register_extraction(const ModelSpec& model, const TestFunction1D& f,
                                     ProbeSet& probes);
ExtractionReport extraction_check(const ExtractionProbes& h, const PalmAccumulators& acc,
                                  double se_multiple = 3.0);

}  // namespace clockwork
