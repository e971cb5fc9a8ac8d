#include "clockwork/csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace clockwork::csv {

std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string number(double v) { return fmt::format("{:.17g}", v); }

namespace {
const char* flag(bool b) { return b ? "true" : "false"; }
}  // namespace

void write_accumulators(std::ostream& out, const PalmAccumulators& acc) {
  out << "probe_id,process,point,half_width,batches\n";
  for (std::size_t i = 0; i < acc.probes(); ++i) {
    ProbeId id{i};
    auto e = acc.estimate(id);
    out << field(acc.info(id).name) << ',' << field(acc.info(id).process) << ',' << number(e.point) << ','
        << number(e.half_width) << ',' << e.batches << '\n';
  }
}

void write_identities(std::ostream& out, const IdentityReport& report) {
  out << "identity_id,estimate,half_width,target,pass\n";
  for (const auto& r : report.rows)
    out << field(r.id) << ',' << number(r.estimate.point) << ',' << number(r.estimate.half_width) << ','
        << number(r.target) << ',' << flag(r.pass) << '\n';
}

void write_terms(std::ostream& out, const std::vector<TermReport>& reports) {
  out << "model,f_id,term_id,estimate,half_width\n";
  for (const auto& r : reports) {
    for (const auto& t : r.terms)
      out << field(r.model_id) << ',' << field(r.f_id) << ',' << field(t.term_id) << ','
          << number(t.estimate.point) << ',' << number(t.estimate.half_width) << '\n';
    out << field(r.model_id) << ',' << field(r.f_id) << ",residual," << number(r.residual.point) << ','
        << number(r.residual.half_width) << '\n';
  }
}

void write_extraction(std::ostream& out, const std::vector<ExtractionReport>& reports) {
  out << "model,f_id,term_id,estimate,half_width,main_term,majorant,pass\n";
  for (const auto& r : reports)
    for (const auto& row : r.rows)
      out << field(r.model_id) << ',' << field(r.f_id) << ',' << row.term_id << ',' << number(row.lhs.point)
          << ',' << number(row.lhs.half_width) << ',' << number(row.main.point) << ','
          << number(row.majorant.point) << ',' << flag(row.pass) << '\n';
}

void write_bounds(std::ostream& out, const std::vector<std::pair<std::string, BoundReport>>& rows) {
  out << "model_id,mode,eps0,epsA,epsD,total,theta,sigma2,delta\n";
  for (const auto& [id, b] : rows)
    out << field(id) << ',' << bound_mode_name(b.mode) << ',' << number(b.eps0) << ',' << number(b.epsA) << ','
        << number(b.epsD) << ',' << number(b.total) << ',' << number(b.theta) << ',' << number(b.sigma2) << ','
        << number(b.inputs.delta) << '\n';
}

void write_w1(std::ostream& out, const std::vector<W1Row>& rows) {
  out << "config_id,delta,w1,w1_ci,bound_total,pass\n";
  for (const auto& r : rows)
    out << field(r.config_id) << ',' << number(r.delta) << ',' << number(r.w1) << ',' << number(r.w1_ci) << ','
        << number(r.bound_total) << ',' << flag(r.pass) << '\n';
}

void write_stein(std::ostream& out, const std::vector<SteinRow>& rows) {
  out << "h_id,theta,sigma2,sup_f2,sup_f3,ode_residual,f1_at_zero,pass\n";
  for (const auto& r : rows)
    out << field(r.h_id) << ',' << number(r.theta) << ',' << number(r.sigma2) << ',' << number(r.sup_f2) << ','
        << number(r.sup_f3) << ',' << number(r.ode_residual) << ',' << number(r.f1_at_zero) << ','
        << flag(r.pass) << '\n';
}

void write_ssc(std::ostream& out, const std::vector<SscRow>& rows) {
  out << "config_id,rho,delta,estimate,half_width\n";
  for (const auto& r : rows)
    out << field(r.config_id) << ',' << number(r.rho) << ',' << number(r.delta) << ','
        << number(r.estimate.point) << ',' << number(r.estimate.half_width) << '\n';
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("csv: no column " + name);
}

double Table::number_at(std::size_t row, const std::string& name) const {
  return std::stod(rows.at(row).at(column(name)));
}

const std::string& Table::text_at(std::size_t row, const std::string& name) const {
  return rows.at(row).at(column(name));
}

Table read(std::istream& in) {
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
  t.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split_line(line));
    if (t.rows.back().size() != t.header.size()) throw std::runtime_error("csv: ragged row");
  }
  return t;
}

Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path);
  return read(in);
}

}  // namespace clockwork::csv
