#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "edlab/errors.hpp"
#include "edlab/grid.hpp"
#include "edlab/inference.hpp"
#include "edlab/numerics.hpp"
#include "edlab/scenarios.hpp"
#include "edlab/states.hpp"

namespace edlab {

enum class ScenarioKind { FreePacket, DoubleSlit, Ho1d, Ho2dRotating, Ho2dBreathing };

// free_packet, double_slit, ho_1d, ho_2d_rotating, ho_2d_breathing
const std::vector<std::string>& scenario_names();
std::string scenario_name(ScenarioKind kind);

// One parsed `key = value` file. Every field carries a concrete value after
// parsing; absent keys take the scenario defaults. Grids are square in 2D.
struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::FreePacket;
  UnitsConfig units;
  double sigma0 = 1.0;
  double l = 5.0;
  double omega = 1.0;
  cplx w1{1.0 / 1.4142135623730951, 0.0};
  cplx w2{1.0 / 1.4142135623730951, 0.0};
  GridSpec grid;
  std::vector<double> times;  // in the scenario's time unit
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  bool plots = true;
  // Trajectory sampling (`sample` subcommand).
  std::size_t particles = 50000;
  double dt = 0.0;  // physical sampler step
  std::size_t threads = 1;

  int dim() const;
  // Physical length of one time label: T, 2 pi / omega or pi / omega.
  double time_unit() const;
  bool operator==(const ScenarioConfig&) const = default;
};

struct ConfigIssue {
  std::size_t line = 0;  // 0 for problems not tied to one line
  std::string key;
  std::string message;
};

// Carries every problem found in one pass; what() lists them one per line.
class ConfigParseError : public ConfigurationError {
 public:
  explicit ConfigParseError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);  // IoError when unreadable
// Canonical form: fixed key order, numbers as %.17g. parse_config of the
// result reproduces the config exactly.
std::string emit_config(const ScenarioConfig& config);

// Equal weights run the symmetric scenario, |w1|^2 below 0.01 or above 0.99
// the extreme-ratio one, anything else the unequal one.
SnapshotSet run_scenario(const ScenarioConfig& config);
// The closed-form state behind the scenario; drives `sample`.
AnalyticState scenario_state(const ScenarioConfig& config);

// Inputs of `infer bayes`: prior weights, likelihood rows (one row per
// evidence value, `;` separated) and the observed evidence index.
struct BayesConfig {
  std::vector<double> prior;
  std::vector<std::vector<double>> likelihood;
  std::size_t observed = 0;
};

// Inputs of `infer maxent`: optional prior (uniform when absent), feature
// rows and one target per row.
struct MaxEntConfig {
  std::vector<double> prior;
  std::vector<std::vector<double>> features;
  std::vector<double> targets;
};

BayesConfig parse_bayes_config(std::string_view text);
MaxEntConfig parse_maxent_config(std::string_view text);

std::string read_text_file(const std::string& path);

}  // namespace edlab
