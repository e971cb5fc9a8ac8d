#include "clockwork/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <fmt/format.h>

namespace clockwork {

using nlohmann::json;

namespace {

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(fmt::format("{}: expected an object", path.empty() ? "/" : path));
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError(fmt::format("unknown key {}/{}", path, it.key()));
}

template <class T>
T get(const json& j, const std::string& path, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}/{}: {}", path, key, e.what()));
  }
}

template <class T>
void maybe(const json& j, const std::string& path, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = get<T>(j, path, key);
}

double need(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) throw ConfigError(fmt::format("{}: missing key {}", path, key));
  return get<double>(j, path, key);
}

}  // namespace

ClockSpec clock_from_json(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("family"))
    throw ConfigError(fmt::format("{}: clock needs a family", path));
  const std::string fam = get<std::string>(j, path, "family");
  try {
    if (fam == "exponential") {
      allow_keys(j, path, {"family", "rate"});
      return ClockSpec::exponential(need(j, path, "rate"));
    }
    if (fam == "erlang") {
      allow_keys(j, path, {"family", "k", "rate"});
      if (!j.contains("k")) throw ConfigError(path + ": missing key k");
      return ClockSpec::erlang(get<int>(j, path, "k"), need(j, path, "rate"));
    }
    if (fam == "hyperexponential") {
      allow_keys(j, path, {"family", "probabilities", "rates", "mean", "scv"});
      if (j.contains("mean") || j.contains("scv")) {
        if (j.contains("probabilities") || j.contains("rates"))
          throw ConfigError(path + ": give either mean/scv or probabilities/rates");
        return ClockSpec::balanced_hyperexponential(need(j, path, "mean"), need(j, path, "scv"));
      }
      return ClockSpec::hyperexponential(get<std::vector<double>>(j, path, "probabilities"),
                                         get<std::vector<double>>(j, path, "rates"));
    }
    if (fam == "uniform") {
      allow_keys(j, path, {"family", "a", "b"});
      return ClockSpec::uniform(need(j, path, "a"), need(j, path, "b"));
    }
    if (fam == "lognormal") {
      allow_keys(j, path, {"family", "location", "scale"});
      return ClockSpec::lognormal(need(j, path, "location"), need(j, path, "scale"));
    }
    if (fam == "deterministic") {
      allow_keys(j, path, {"family", "value"});
      return ClockSpec::deterministic(need(j, path, "value"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
  throw ConfigError(fmt::format("{}/family: unknown clock family '{}'", path, fam));
}

json clock_to_json(const ClockSpec& c) {
  return std::visit(
      [](const auto& f) -> json {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, Exponential>) return {{"family", "exponential"}, {"rate", f.rate}};
        else if constexpr (std::is_same_v<F, Erlang>) return {{"family", "erlang"}, {"k", f.shape}, {"rate", f.rate}};
        else if constexpr (std::is_same_v<F, HyperExponential>)
          return {{"family", "hyperexponential"}, {"probabilities", f.probabilities}, {"rates", f.rates}};
        else if constexpr (std::is_same_v<F, Uniform>) return {{"family", "uniform"}, {"a", f.a}, {"b", f.b}};
        else if constexpr (std::is_same_v<F, LogNormal>)
          return {{"family", "lognormal"}, {"location", f.location}, {"scale", f.scale}};
        else return {{"family", "deterministic"}, {"value", f.value}};
      },
      c.family());
}

ModelSpec ModelConfig::build() const {
  switch (topology) {
    case Topology::GG1: return ModelSpec::gg1(arrival, services.at(0));
    case Topology::JSQ: return ModelSpec::jsq(servers, arrival, services.at(0));
    case Topology::Tandem2: return ModelSpec::tandem(arrival, services.at(0), services.at(1));
  }
  throw std::logic_error("unknown topology");
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  allow_keys(j, "", {"model", "run", "checks", "output"});

  if (j.contains("model")) {
    const json& m = j["model"];
    allow_keys(m, "/model", {"topology", "servers", "arrival", "service", "services"});
    if (m.contains("topology")) {
      auto t = get<std::string>(m, "/model", "topology");
      if (t == "gg1") c.model.topology = Topology::GG1;
      else if (t == "jsq") c.model.topology = Topology::JSQ;
      else if (t == "tandem") c.model.topology = Topology::Tandem2;
      else throw ConfigError(fmt::format("/model/topology: unknown topology '{}'", t));
    }
    c.model.servers = c.model.topology == Topology::JSQ ? 2 : 1;
    maybe(m, "/model", "servers", c.model.servers);
    if (m.contains("arrival")) c.model.arrival = clock_from_json(m["arrival"], "/model/arrival");
    if (m.contains("service") && m.contains("services"))
      throw ConfigError("/model: give either service or services");
    if (m.contains("service")) c.model.services = {clock_from_json(m["service"], "/model/service")};
    if (m.contains("services")) {
      if (!m["services"].is_array()) throw ConfigError("/model/services: expected an array");
      c.model.services.clear();
      for (std::size_t i = 0; i < m["services"].size(); ++i)
        c.model.services.push_back(clock_from_json(m["services"][i], fmt::format("/model/services/{}", i)));
    }
    if (c.model.topology == Topology::Tandem2 && c.model.services.size() == 1)
      c.model.services.push_back(c.model.services[0]);
    const std::size_t want = c.model.topology == Topology::Tandem2 ? 2 : 1;
    if (c.model.services.size() != want)
      throw ConfigError(fmt::format("/model/services: expected {} service clock(s)", want));
  }

  if (j.contains("run")) {
    const json& r = j["run"];
    allow_keys(r, "/run", {"events", "burn_in", "seed", "replications", "jobs", "batches"});
    maybe(r, "/run", "events", c.run.events);
    if (r.contains("burn_in") && !r["burn_in"].is_null()) c.run.burn_in = get<std::uint64_t>(r, "/run", "burn_in");
    maybe(r, "/run", "seed", c.run.seed);
    maybe(r, "/run", "replications", c.run.replications);
    maybe(r, "/run", "jobs", c.run.jobs);
    maybe(r, "/run", "batches", c.run.batches);
  }

  if (j.contains("checks")) {
    const json& k = j["checks"];
    allow_keys(k, "/checks", {"se_multiple", "m_values", "functions", "bound_mode", "conditional_residual",
                              "sweep_rho", "w1", "stein", "rbm"});
    maybe(k, "/checks", "se_multiple", c.checks.se_multiple);
    maybe(k, "/checks", "m_values", c.checks.m_values);
    maybe(k, "/checks", "functions", c.checks.functions);
    if (k.contains("bound_mode")) {
      auto s = get<std::string>(k, "/checks", "bound_mode");
      if (s == "crude") c.checks.bound_mode = BoundMode::Crude;
      else if (s == "simulated") c.checks.bound_mode = BoundMode::Simulated;
      else throw ConfigError("/checks/bound_mode: expected crude or simulated");
    }
    if (k.contains("conditional_residual") && !k["conditional_residual"].is_null())
      c.checks.conditional_residual = get<double>(k, "/checks", "conditional_residual");
    maybe(k, "/checks", "sweep_rho", c.checks.sweep_rho);
    if (k.contains("w1")) {
      const json& w = k["w1"];
      allow_keys(w, "/checks/w1", {"samples", "spacing", "resamples", "block_size"});
      maybe(w, "/checks/w1", "samples", c.checks.w1.samples);
      maybe(w, "/checks/w1", "spacing", c.checks.w1.spacing);
      maybe(w, "/checks/w1", "resamples", c.checks.w1.resamples);
      maybe(w, "/checks/w1", "block_size", c.checks.w1.block_size);
    }
    if (k.contains("stein")) {
      const json& s = k["stein"];
      allow_keys(s, "/checks/stein", {"h_count", "grid_points"});
      maybe(s, "/checks/stein", "h_count", c.checks.stein.h_count);
      maybe(s, "/checks/stein", "grid_points", c.checks.stein.grid_points);
    }
    if (k.contains("rbm")) {
      const json& r = k["rbm"];
      allow_keys(r, "/checks/rbm", {"dt", "horizon", "burn_in", "drift_mode", "dump_stride"});
      maybe(r, "/checks/rbm", "dt", c.checks.rbm.dt);
      maybe(r, "/checks/rbm", "horizon", c.checks.rbm.horizon);
      maybe(r, "/checks/rbm", "burn_in", c.checks.rbm.burn_in);
      maybe(r, "/checks/rbm", "dump_stride", c.checks.rbm.dump_stride);
      if (r.contains("drift_mode")) {
        auto s = get<std::string>(r, "/checks/rbm", "drift_mode");
        if (s == "paper_literal") c.checks.rbm.drift_mode = DriftMode::PaperLiteral;
        else if (s == "generator_consistent") c.checks.rbm.drift_mode = DriftMode::GeneratorConsistent;
        else throw ConfigError("/checks/rbm/drift_mode: expected paper_literal or generator_consistent");
      }
    }
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    allow_keys(o, "/output", {"dir", "plots"});
    maybe(o, "/output", "dir", c.output.dir);
    maybe(o, "/output", "plots", c.output.plots);
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json services = json::array();
  for (const auto& s : model.services) services.push_back(clock_to_json(s));
  std::string topo = model.topology == Topology::GG1 ? "gg1" : model.topology == Topology::JSQ ? "jsq" : "tandem";
  return {
      {"model", {{"topology", topo}, {"servers", model.servers}, {"arrival", clock_to_json(model.arrival)},
                 {"services", services}}},
      {"run",
       {{"events", run.events},
        {"burn_in", run.burn_in ? json(*run.burn_in) : json(nullptr)},
        {"seed", run.seed},
        {"replications", run.replications},
        {"jobs", run.jobs},
        {"batches", run.batches}}},
      {"checks",
       {{"se_multiple", checks.se_multiple},
        {"m_values", checks.m_values},
        {"functions", checks.functions},
        {"bound_mode", std::string(bound_mode_name(checks.bound_mode))},
        {"conditional_residual",
         checks.conditional_residual ? json(*checks.conditional_residual) : json(nullptr)},
        {"sweep_rho", checks.sweep_rho},
        {"w1",
         {{"samples", checks.w1.samples},
          {"spacing", checks.w1.spacing},
          {"resamples", checks.w1.resamples},
          {"block_size", checks.w1.block_size}}},
        {"stein", {{"h_count", checks.stein.h_count}, {"grid_points", checks.stein.grid_points}}},
        {"rbm",
         {{"dt", checks.rbm.dt},
          {"horizon", checks.rbm.horizon},
          {"burn_in", checks.rbm.burn_in},
          {"drift_mode", std::string(drift_mode_name(checks.rbm.drift_mode))},
          {"dump_stride", checks.rbm.dump_stride}}}}},
      {"output", {{"dir", output.dir}, {"plots", output.plots}}}};
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
  return ExperimentConfig::from_json(j);
}

}  // namespace clockwork
