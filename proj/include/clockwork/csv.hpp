#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "clockwork/approx_bounds.hpp"
#include "clockwork/bar_residual.hpp"
#include "clockwork/identity_suite.hpp"
#include "clockwork/palm_estimators.hpp"

namespace clockwork::csv {

/// Quotes a field when it contains a comma, quote or newline.
std::string field(const std::string& s);
/// 17 significant digits.
std::string number(double v);

void write_accumulators(std::ostream& out, const PalmAccumulators& acc);
void write_identities(std::ostream& out, const IdentityReport& report);
void write_terms(std::ostream& out, const std::vector<TermReport>& reports);
void write_extraction(std::ostream& out, const std::vector<ExtractionReport>& reports);
void write_bounds(std::ostream& out, const std::vector<std::pair<std::string, BoundReport>>& rows);

struct W1Row {
  std::string config_id;
  double delta = 0.0;
  double w1 = 0.0;
  double w1_ci = 0.0;
  double bound_total = 0.0;
  bool pass = false;
};
void write_w1(std::ostream& out, const std::vector<W1Row>& rows);

struct SteinRow {
  std::string h_id;
  double theta, sigma2, sup_f2, sup_f3, ode_residual, f1_at_zero;
  bool pass;
};
void write_stein(std::ostream& out, const std::vector<SteinRow>& rows);

struct SscRow {
  std::string config_id;
  double rho, delta;
  EstimateCI estimate;
};
void write_ssc(std::ostream& out, const std::vector<SscRow>& rows);

/// Parsed CSV with a header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number_at(std::size_t row, const std::string& name) const;
  const std::string& text_at(std::size_t row, const std::string& name) const;
};

Table read(std::istream& in);
Table read_file(const std::string& path);

}  // namespace clockwork::csv
