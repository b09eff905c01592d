#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spectral/region.hpp"
#include "spectral/rng.hpp"

namespace spectral {

// All schema and domain violations found in a config, reported together.
struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> v);
  std::vector<std::string> violations;
};

struct FieldSpec {
  cdouble z0{0.0, 0.0};
  cdouble z1{0.0, 0.0};
  std::int64_t nx = 0;
  std::int64_t ny = 0;
  std::vector<double> levels;  // strictly decreasing, positive
};

struct AreaSpec {
  double epsilon = 0.0;
  RegionSpec region;
  std::int64_t resolution = 0;
};

struct LimitSpec {
  RegionSpec region;
  std::vector<double> eps_schedule;  // empty selects the default schedule
};

struct ExperimentConfig {
  std::string command;
  std::optional<std::string> matrix;
  std::optional<double> delta;
  std::optional<double> epsilon;
  std::optional<double> t;
  std::optional<double> t_final;
  std::int64_t trials = 100;
  std::int64_t attempts = 100;
  std::int64_t steps = 1000;
  std::int64_t runs = 1;
  std::int64_t dump_paths = 1;
  std::optional<std::int64_t> n;
  std::int64_t r_bins = 10;
  std::optional<std::string> law;
  std::optional<std::string> variant;  // "complex" | "real"
  std::optional<std::vector<double>> eps_grid;
  std::optional<std::vector<double>> t_grid;
  std::optional<std::vector<double>> delta_list;
  std::optional<std::vector<double>> init1;
  std::optional<std::vector<double>> init2;
  std::optional<RegionSpec> region;
  std::optional<FieldSpec> field;
  std::optional<AreaSpec> area;
  std::optional<LimitSpec> limit;
  std::optional<double> perturb_delta;
  std::optional<double> davies_epsilon;
  RngSpec rng;
  std::optional<int> workers;
  std::string out = "out";
};

// Strict parse: unknown fields, duplicate keys, type mismatches, domain
// violations and cross-field inconsistencies are all collected and thrown as
// one ConfigError. cli_command, when nonempty, must match the config's
// "command" field if that is present; it fills it in otherwise.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& cli_command = "");
ExperimentConfig parse_config_file(const std::string& path,
                                   const std::string& cli_command = "");

// The fully resolved config as JSON; parsing it back yields the same config.
nlohmann::json config_echo(const ExperimentConfig& c);

extern const std::vector<std::string> kCommands;
bool is_known_command(const std::string& name);

}  // namespace spectral
