#include "clockwork/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "clockwork/csv.hpp"

namespace clockwork::svg {
namespace {

constexpr double kWidth = 640, kHeight = 420, kMargin = 60;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

std::ofstream open(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("svg: cannot write " + path);
  return out;
}

}  // namespace

void plot_w1_vs_delta(const std::string& csv_path, const std::string& svg_path) {
  auto t = csv::read_file(csv_path);
  struct P {
    double d, w, ci, b;
  };
  std::vector<P> pts;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    pts.push_back({t.number_at(r, "delta"), t.number_at(r, "w1"), t.number_at(r, "w1_ci"),
                   t.number_at(r, "bound_total")});
  double xlo = std::numeric_limits<double>::max(), xhi = 0, ylo = xlo, yhi = 0;
  for (auto& p : pts) {
    xlo = std::min(xlo, p.d);
    xhi = std::max(xhi, p.d);
    ylo = std::min(ylo, std::max(p.w - p.ci, p.w * 0.5));
    yhi = std::max({yhi, p.w + p.ci, p.b});
  }
  if (pts.empty()) xlo = ylo = 0.1, xhi = yhi = 1;
  const double lx0 = std::log10(xlo) - 0.1, lx1 = std::log10(xhi) + 0.1;
  const double ly0 = std::log10(std::max(ylo, 1e-12)) - 0.2, ly1 = std::log10(yhi) + 0.2;
  auto sx = [&](double x) { return kMargin + (std::log10(x) - lx0) / (lx1 - lx0) * (kWidth - 2 * kMargin); };
  auto sy = [&](double y) {
    return kHeight - kMargin - (std::log10(std::max(y, 1e-12)) - ly0) / (ly1 - ly0) * (kHeight - 2 * kMargin);
  };

  auto out = open(svg_path);
  out << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n", kWidth, kHeight);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", kMargin,
                     kHeight - kMargin, kWidth - kMargin);
  out << fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", kMargin, kMargin,
                     kHeight - kMargin);
  out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">delta (log)</text>\n", kWidth / 2,
                     kHeight - 15);
  out << fmt::format("<text x=\"15\" y=\"{}\" transform=\"rotate(-90 15 {})\" text-anchor=\"middle\">W1 (log)</text>\n",
                     kHeight / 2, kHeight / 2);
  for (auto& p : pts) {
    double x = sx(p.d);
    out << fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"steelblue\"/>\n", x,
                       sy(std::max(p.w - p.ci, 1e-12)), sy(p.w + p.ci));
    out << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"steelblue\"/>\n", x, sy(p.w));
    out << fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"7\" height=\"7\" fill=\"firebrick\"/>\n", x - 3.5,
                       sy(p.b) - 3.5);
    out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"middle\">{:.3g}</text>\n", x,
                       kHeight - kMargin + 14, p.d);
  }
  out << fmt::format("<text x=\"{}\" y=\"20\" font-size=\"12\">circles: W1 with CI; squares: bound</text>\n", kMargin);
  out << "</svg>\n";
}

void plot_identity_forest(const std::string& csv_path, const std::string& svg_path) {
  auto t = csv::read_file(csv_path);
  struct Row {
    std::string id;
    double rel, hw;
    bool pass;
  };
  std::vector<Row> rows;
  double span = 1e-6;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    double target = t.number_at(r, "target");
    double scale = std::max(std::abs(target), 1e-12);
    Row row{t.text_at(r, "identity_id"), (t.number_at(r, "estimate") - target) / scale,
            t.number_at(r, "half_width") / scale, t.text_at(r, "pass") == "true"};
    span = std::max(span, std::abs(row.rel) + row.hw);
    rows.push_back(row);
  }
  const double left = 220, right = kWidth - 30, row_h = 18;
  const double height = 60 + row_h * static_cast<double>(rows.size());
  auto sx = [&](double v) { return left + (v + span) / (2 * span) * (right - left); };

  auto out = open(svg_path);
  out << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n", kWidth, height);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << fmt::format("<line x1=\"{0:.2f}\" y1=\"20\" x2=\"{0:.2f}\" y2=\"{1:.2f}\" stroke=\"gray\" stroke-dasharray=\"4\"/>\n",
                     sx(0), height - 30);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    double y = 35 + row_h * static_cast<double>(i);
    const char* color = r.pass ? "steelblue" : "firebrick";
    out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n", left - 8,
                       y + 4, escape(r.id));
    out << fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\"/>\n",
                       sx(r.rel - r.hw), y, sx(r.rel + r.hw), y, color);
    out << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\" fill=\"{}\"/>\n", sx(r.rel), y, color);
  }
  out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"middle\">relative residual "
                     "(estimate - target) / |target|, range +/-{:.3g}</text>\n",
                     (left + right) / 2, height - 10, span);
  out << "</svg>\n";
}

}  // namespace clockwork::svg
