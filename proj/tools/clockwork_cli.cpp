#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "clockwork/approx_bounds.hpp"
#include "clockwork/bar_residual.hpp"
#include "clockwork/config.hpp"
#include "clockwork/csv.hpp"
#include "clockwork/des_engine.hpp"
#include "clockwork/experiments.hpp"
#include "clockwork/identity_suite.hpp"
#include "clockwork/rbm_tandem.hpp"
#include "clockwork/stein_exponential.hpp"
#include "clockwork/svg_plot.hpp"
#include "clockwork/test_functions.hpp"
#include "clockwork/wasserstein.hpp"

namespace fs = std::filesystem;
using namespace clockwork;

namespace {

struct Context {
  ExperimentConfig cfg;
  fs::path out_dir;

  std::ofstream open(const std::string& name) const {
    std::ofstream f(out_dir / name);
    if (!f) throw std::runtime_error("cannot write " + (out_dir / name).string());
    return f;
  }
  std::string path(const std::string& name) const { return (out_dir / name).string(); }

  RunOptions run_options() const {
    RunOptions o;
    o.total_events = cfg.run.events;
    o.burn_in_events = cfg.run.burn_in;
    o.seed = cfg.run.seed;
    o.batches = cfg.run.batches;
    return o;
  }

  PalmAccumulators run(const ModelSpec& model, const ProbeSet& probes) const {
    return simulate_replications(model, run_options(), probes, cfg.run.replications, cfg.run.jobs);
  }
};

bool selected(const Context& c, const std::string& name) {
  const auto& f = c.cfg.checks.functions;
  return f.empty() || std::find(f.begin(), f.end(), name) != f.end();
}

int cmd_simulate(const Context& c) {
  ModelSpec model = c.cfg.model.build();
  ProbeSet probes;
  probes.event_average("arrival_rate", CountingProcess::arrivals(), [](const EventRecord&) { return 1.0; });
  for (std::size_t i = 0; i < model.stations(); ++i) {
    probes.event_average(fmt::format("departure_rate_{}", i + 1), CountingProcess::departures_at(i),
                         [](const EventRecord&) { return 1.0; });
    probes.time_average(fmt::format("p_busy_{}", i + 1),
                        [i](const SystemState& z) { return z.busy(i) ? 1.0 : 0.0; });
    probes.time_average(fmt::format("mean_queue_{}", i + 1),
                        [i](const SystemState& z) { return static_cast<double>(z.queues[i]); });
  }
  probes.time_average("mean_scaled_total", [model](const SystemState& z) { return model.scaled_total(z); });
  auto acc = c.run(model, probes);
  auto out = c.open("accumulators.csv");
  csv::write_accumulators(out, acc);
  std::cout << fmt::format("{}: {} events, {} ties, {} regenerations\n", model.describe(), acc.events, acc.ties,
                           acc.regenerations);
  return 0;
}

int cmd_identities(const Context& c) {
  ModelSpec model = c.cfg.model.build();
  ProbeSet probes;
  IdentitySuite suite(model, c.cfg.checks.m_values, probes);
  auto acc = c.run(model, probes);
  auto report = suite.check(acc, c.cfg.checks.se_multiple);
  {
    auto out = c.open("identities.csv");
    csv::write_identities(out, report);
  }
  if (model.topology() == Topology::GG1) {
    auto cr = suite.conditional_residual_estimate(acc);
    auto out = c.open("conditional_residual.csv");
    out << "method,estimate,half_width\n";
    out << "time_ratio," << csv::number(cr.time_ratio.point) << ',' << csv::number(cr.time_ratio.half_width) << '\n';
    if (cr.idle_period_ratio)
      out << "idle_period_ratio," << csv::number(cr.idle_period_ratio->point) << ','
          << csv::number(cr.idle_period_ratio->half_width) << '\n';
    else
      std::cout << "idle-period estimator: insufficient data (no idle period in some batch)\n";
  }
  if (c.cfg.output.plots) svg::plot_identity_forest(c.path("identities.csv"), c.path("identities.svg"));
  for (const auto& r : report.rows)
    std::cout << fmt::format("{:<40} {:>14.6g} +/- {:<12.3g} target {:<12.6g} {}\n", r.id, r.estimate.point,
                             r.estimate.half_width, r.target,
                             r.exploratory ? "exploratory" : (r.pass ? "pass" : "FAIL"));
  if (report.multiplicity_note) std::cout << "note: " << *report.multiplicity_note << '\n';
  return report.all_pass() ? 0 : 1;
}

int cmd_bar(const Context& c) {
  ModelSpec model = c.cfg.model.build();
  ProbeSet probes;
  std::vector<BarProbes> full, comp;
  std::vector<ExtractionProbes> ext;
  for (const auto& f : test_functions::library_state(model))
    if (selected(c, f.name)) full.push_back(register_full_bar(model, f, probes));
  if (model.topology() == Topology::Tandem2) {
    for (const auto& f : test_functions::library_2d())
      if (selected(c, f.name)) comp.push_back(register_compensated_bar(model, f, probes));
  } else {
    for (const auto& f : test_functions::library_1d()) {
      if (!selected(c, f.name)) continue;
      comp.push_back(register_compensated_bar(model, f, probes));
      ext.push_back(register_extraction(model, f, probes));
    }
  }
  auto jumps = register_zero_mean_jump(model, probes);
  auto acc = c.run(model, probes);
  const double k = c.cfg.checks.se_multiple;

  bool ok = true;
  std::vector<TermReport> full_r, comp_r;
  for (auto& h : full) full_r.push_back(full_bar_terms(h, acc));
  for (auto& h : comp) comp_r.push_back(compensated_bar_terms(h, acc));
  for (auto* set : {&full_r, &comp_r})
    for (auto& r : *set) {
      bool p = r.pass(k);
      ok = ok && p;
      std::cout << fmt::format("{:<14} residual {:>12.4g} +/- {:<10.3g} {}\n", r.f_id, r.residual.point,
                               r.residual.half_width, p ? "pass" : "FAIL");
    }
  {
    auto out = c.open("bar_full.csv");
    csv::write_terms(out, full_r);
  }
  {
    auto out = c.open("bar_compensated.csv");
    csv::write_terms(out, comp_r);
  }
  std::vector<ExtractionReport> ext_r;
  for (auto& h : ext) {
    ext_r.push_back(extraction_check(h, acc, k));
    ok = ok && ext_r.back().all_pass();
  }
  if (!ext_r.empty()) {
    auto out = c.open("extraction.csv");
    csv::write_extraction(out, ext_r);
  }
  auto j = zero_mean_jump(jumps, acc);
  bool jp = std::abs(j.point) <= k * j.std_error;
  ok = ok && jp;
  {
    auto out = c.open("jump_check.csv");
    out << "model,estimate,half_width,pass\n"
        << csv::field(model.describe()) << ',' << csv::number(j.point) << ',' << csv::number(j.half_width) << ','
        << (jp ? "true" : "false") << '\n';
  }
  std::cout << fmt::format("zero-mean jump {:.4g} +/- {:.3g} {}\n", j.point, j.half_width, jp ? "pass" : "FAIL");
  return ok ? 0 : 1;
}

int cmd_stein(const Context& c) {
  ModelSpec model = c.cfg.model.build();
  auto params = diffusion_params_1d(model);
  if (degenerate(params)) {
    std::cerr << "sigma2 = 0: the Stein pipeline is unavailable for this model\n";
    return 1;
  }
  std::vector<PiecewiseLinear> hs{PiecewiseLinear::identity(), PiecewiseLinear::constant(1.0),
                                  PiecewiseLinear::min_with(2.0)};
  RandomStream rng(derive_seed(c.cfg.run.seed, 0, 99));
  for (std::size_t i = 0; i < c.cfg.checks.stein.h_count; ++i)
    hs.push_back(PiecewiseLinear::random_lip1(rng, 6, 20.0 / params.beta()));
  std::vector<csv::SteinRow> rows;
  bool ok = true;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    auto sol = solve_poisson(hs[i], params);
    auto grid = default_grid(sol, c.cfg.checks.stein.grid_points);
    auto sf = stein_factors(sol, grid);
    double res = ode_residual(sol, grid);
    double hmax = 0.0;
    for (double x : grid) hmax = std::max(hmax, std::abs(sol.h()(x)));
    bool pass = res <= 1e-9 * std::max(1.0, hmax / params.theta) && std::abs(sol.f1(0.0)) <= 1e-12 &&
                sf.sup_f2 <= (1.0 + 1e-9) / params.theta && sf.sup_f3 <= (1.0 + 1e-9) * 4.0 / params.sigma2;
    ok = ok && pass;
    rows.push_back({fmt::format("{}#{}", hs[i].name(), i), params.theta, params.sigma2, sf.sup_f2, sf.sup_f3, res,
                    sol.f1(0.0), pass});
  }
  auto out = c.open("stein.csv");
  csv::write_stein(out, rows);
  std::cout << fmt::format("{} test functions, {}\n", rows.size(), ok ? "all pass" : "FAILURES");
  return ok ? 0 : 1;
}

int cmd_bound(const Context& c) {
  ModelSpec model = c.cfg.model.build();
  std::optional<EstimateCI> cr;
  if (c.cfg.checks.bound_mode == BoundMode::Simulated) {
    if (c.cfg.checks.conditional_residual)
      cr = EstimateCI{*c.cfg.checks.conditional_residual, 0.0, 0.0, 0, 0.99};
    else
      cr = estimate_conditional_residual(model, c.cfg.run.events, c.cfg.run.seed).time_ratio;
  }
  auto b = theorem1_bounds(model, c.cfg.checks.bound_mode, cr);
  auto out = c.open("bounds.csv");
  csv::write_bounds(out, {{model.describe(), b}});
  std::cout << fmt::format("eps0 {:.6g}  epsA {:.6g}  epsD {:.6g}  total {:.6g}\n", b.eps0, b.epsA, b.epsD, b.total);
  return (b.eps0 >= 0 && b.epsA >= 0 && b.epsD >= 0) ? 0 : 1;
}

W1CellOptions cell_options(const Context& c) {
  W1CellOptions o;
  o.samples = c.cfg.checks.w1.samples;
  o.spacing = c.cfg.checks.w1.spacing;
  o.residual_events = c.cfg.run.events;
  o.seed = c.cfg.run.seed;
  o.mode = c.cfg.checks.bound_mode;
  o.supplied_residual = c.cfg.checks.conditional_residual;
  o.bootstrap.resamples = c.cfg.checks.w1.resamples;
  o.bootstrap.block_size = c.cfg.checks.w1.block_size;
  o.bootstrap.seed = c.cfg.run.seed;
  o.se_multiple = c.cfg.checks.se_multiple;
  return o;
}

csv::W1Row to_row(const W1Cell& cell) {
  return {cell.config_id, cell.delta, cell.w1.point, cell.w1.half_width, cell.bound.total, cell.pass};
}

int cmd_w1(const Context& c) {
  ModelSpec model = c.cfg.model.build();
  auto cell = w1_cell(model, cell_options(c));
  {
    auto out = c.open("w1.csv");
    csv::write_w1(out, {to_row(cell)});
  }
  std::cout << fmt::format("W1 {:.5g} +/- {:.3g}  bound {:.5g}  {}\n", cell.w1.point, cell.w1.half_width,
                           cell.bound.total, cell.pass ? "pass" : "FAIL");
  return cell.pass ? 0 : 1;
}

int cmd_sweep(const Context& c) {
  ModelSpec base = c.cfg.model.build();
  const auto& rhos = c.cfg.checks.sweep_rho;
  if (base.topology() == Topology::JSQ) {
    std::vector<csv::SscRow> rows;
    for (double rho : rhos) {
      ModelSpec m = with_load(base, rho);
      ProbeSet probes;
      auto h = register_ssc(m, probes);
      auto acc = c.run(m, probes);
      rows.push_back({m.describe(), rho, m.delta(), ssc_estimate(h, acc)});
    }
    auto out = c.open("ssc.csv");
    csv::write_ssc(out, rows);
    bool ok = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].rho > rows[i - 1].rho) ok = ok && rows[i].estimate.point < rows[i - 1].estimate.point;
    for (auto& r : rows) std::cout << fmt::format("rho {:<6} ssc {:.5g} +/- {:.3g}\n", r.rho, r.estimate.point, r.estimate.half_width);
    return ok ? 0 : 1;
  }
  if (base.topology() != Topology::GG1) {
    std::cerr << "sweep supports GG1 (W1 decay) and JSQ (state-space collapse)\n";
    return 2;
  }
  if (rhos.size() < 3) {
    std::cerr << fmt::format("sweep: decay_fit needs at least 3 load values, got {}\n", rhos.size());
    return 2;
  }
  std::vector<csv::W1Row> rows;
  std::vector<std::pair<double, double>> pairs;
  bool ok = true;
  for (double rho : rhos) {
    auto cell = w1_cell(with_load(base, rho), cell_options(c));
    rows.push_back(to_row(cell));
    pairs.emplace_back(cell.delta, cell.w1.point);
    ok = ok && cell.pass;
  }
  {
    auto out = c.open("sweep_w1.csv");
    csv::write_w1(out, rows);
  }
  auto fit = decay_fit(pairs);
  bool slope_ok = fit.slope >= 0.7 && fit.slope <= 1.3;
  {
    auto out = c.open("decay.csv");
    out << "slope,std_error,intercept,pass\n"
        << csv::number(fit.slope) << ',' << csv::number(fit.std_error) << ',' << csv::number(fit.intercept) << ','
        << (slope_ok ? "true" : "false") << '\n';
  }
  if (c.cfg.output.plots) svg::plot_w1_vs_delta(c.path("sweep_w1.csv"), c.path("sweep_w1.svg"));
  std::cout << fmt::format("decay slope {:.4f} +/- {:.3f}\n", fit.slope, fit.std_error);
  return ok && slope_ok ? 0 : 1;
}

int cmd_rbm(const Context& c) {
  ModelSpec model = c.cfg.model.build();
  const auto& r = c.cfg.checks.rbm;
  auto params = tandem_params(model, r.drift_mode);
  SRBMOptions opt;
  opt.dt = r.dt;
  opt.horizon = r.horizon;
  opt.burn_in = r.burn_in;
  opt.seed = c.cfg.run.seed;
  opt.stride = r.dump_stride;
  auto path = srbm_simulate(params, opt);
  auto halving = srbm_halving_check(params, r.dt, r.horizon, r.burn_in, c.cfg.run.seed);
  {
    auto out = c.open("rbm.csv");
    out << "quantity,value,half_width\n";
    out << "mean_y1," << csv::number(path.mean_y1.point) << ',' << csv::number(path.mean_y1.half_width) << '\n';
    out << "mean_y2," << csv::number(path.mean_y2.point) << ',' << csv::number(path.mean_y2.half_width) << '\n';
    out << "regulator_rate_1," << csv::number(path.regulator_rate[0]) << ",0\n";
    out << "regulator_rate_2," << csv::number(path.regulator_rate[1]) << ",0\n";
    out << "invariant_violations," << path.invariant_violations << ",0\n";
    out << "halving_difference," << csv::number(halving.difference.point) << ','
        << csv::number(halving.coarse.half_width) << '\n';
  }
  if (r.dump_stride > 0) {
    auto out = c.open("rbm_path.csv");
    write_srbm_path(out, path);
  }
  std::cout << fmt::format("E Y1 {:.4g} (rho1 {:.4g}), E Y2 {:.4g}, violations {}, halving {}\n",
                           path.mean_y1.point, model.rho(0), path.mean_y2.point, path.invariant_violations,
                           halving.pass ? "pass" : "FAIL");
  return path.invariant_violations == 0 && halving.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clockwork: simulation checks for queues with general clocks"};
  app.require_subcommand(0, 1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed, events, burn_in;
  std::optional<std::size_t> jobs;
  bool print_config = false;
  app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "master seed");
  app.add_option("--events", events, "events per replication");
  app.add_option("--burn-in", burn_in, "burn-in events");
  app.add_option("--jobs", jobs, "parallel replications");
  app.add_option("--out-dir", out_dir, "output directory (default: $CLOCKWORK_OUT_DIR or config)");
  app.add_flag("--print-config", print_config, "print the effective config and exit");

  using Handler = int (*)(const Context&);
  const std::vector<std::tuple<std::string, std::string, Handler>> commands{
      {"simulate", "raw accumulator report", cmd_simulate},
      {"identities", "stationary identity checks", cmd_identities},
      {"bar", "BAR residuals and extraction checks", cmd_bar},
      {"stein", "Poisson-equation solution and Stein factors", cmd_stein},
      {"bound", "Theorem 1 error bound report", cmd_bound},
      {"w1", "empirical W1 against the bound", cmd_w1},
      {"sweep", "load sweep with decay fit", cmd_sweep},
      {"rbm", "tandem SRBM simulation", cmd_rbm}};
  Handler chosen = nullptr;
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->callback([&chosen, f = fn] { chosen = f; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    Context ctx;
    nlohmann::json raw = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      try {
        in >> raw;
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(config_path + ": " + e.what());
      }
    }
    ctx.cfg = ExperimentConfig::from_json(raw);
    if (seed) ctx.cfg.run.seed = *seed;
    if (events) ctx.cfg.run.events = *events;
    if (burn_in) ctx.cfg.run.burn_in = *burn_in;
    if (jobs) ctx.cfg.run.jobs = *jobs;
    bool config_sets_dir = raw.contains("output") && raw["output"].contains("dir");
    if (!out_dir.empty()) ctx.cfg.output.dir = out_dir;
    else if (!config_sets_dir)
      if (const char* env = std::getenv("CLOCKWORK_OUT_DIR")) ctx.cfg.output.dir = env;

    if (print_config) {
      std::cout << ctx.cfg.to_json().dump(2) << '\n';
      return 0;
    }
    if (!chosen) {
      std::cerr << "a subcommand is required (see --help)\n";
      return 2;
    }
    ctx.cfg.model.build().require_stable();
    ctx.out_dir = ctx.cfg.output.dir;
    fs::create_directories(ctx.out_dir);
    return chosen(ctx);
  } catch (const UnstableModel& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
