#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "clockwork/approx_bounds.hpp"
#include "clockwork/model.hpp"

namespace clockwork {

/// Malformed configuration; what() names the JSON path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ClockSpec clock_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json clock_to_json(const ClockSpec& c);

struct ModelConfig {
  Topology topology = Topology::GG1;
  std::size_t servers = 1;
  ClockSpec arrival = ClockSpec::exponential(0.8);
  std::vector<ClockSpec> services{ClockSpec::exponential(1.0)};

  ModelSpec build() const;
};

struct RunConfig {
  std::uint64_t events = 1'000'000;
  std::optional<std::uint64_t> burn_in;
  std::uint64_t seed = 1;
  std::size_t replications = 1;
  std::size_t jobs = 1;
  std::size_t batches = 32;
};

struct W1Config {
  std::size_t samples = 100'000;
  std::uint64_t spacing = 100;
  std::size_t resamples = 200;
  std::size_t block_size = 1;
};

struct SteinConfig {
  std::size_t h_count = 10;
  std::size_t grid_points = 10'001;
};

struct RbmConfig {
  double dt = 1e-3;
  double horizon = 1e4;
  double burn_in = 1e3;
  DriftMode drift_mode = DriftMode::GeneratorConsistent;
  std::size_t dump_stride = 0;
};

struct ChecksConfig {
  double se_multiple = 3.0;
  std::vector<int> m_values{2, 3};
  /// Empty selects the whole library.
  std::vector<std::string> functions;
  BoundMode bound_mode = BoundMode::Simulated;
  /// Supplied E(R_a | X = 0); replaces the simulated estimate.
  std::optional<double> conditional_residual;
  std::vector<double> sweep_rho{0.8, 0.9, 0.95};
  W1Config w1;
  SteinConfig stein;
  RbmConfig rbm;
};

struct OutputConfig {
  std::string dir = "clockwork-out";
  bool plots = true;
};

struct ExperimentConfig {
  ModelConfig model;
  RunConfig run;
  ChecksConfig checks;
  OutputConfig output;

  /// Missing keys keep their defaults; unknown keys throw ConfigError.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

ExperimentConfig load_config(const std::string& path);

}  // namespace clockwork
