#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "edlab/config.hpp"
#include "edlab/output.hpp"

namespace edlab {

struct RunOutcome {
  std::filesystem::path dir;
  std::vector<FileRecord> files;
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, double>> report;
  bool passed = false;
};

// Evaluates the scenario and writes snapshot CSVs, optional SVG plots and,
// last, manifest.json into `dir` (config.output_dir when unset). A stale
// manifest is removed before anything else is written.
RunOutcome execute_run(const ScenarioConfig& config, const std::optional<std::filesystem::path>& dir = {});

// Samples trajectories driven by the scenario's closed-form drift and
// writes per-time histogram CSVs (`x[,y],density,analytic`), the first 100
// trajectories and the manifest. Each recorded time gets a two-sample KS
// check of the positions against draws from the closed-form density, per
// axis, at a Bonferroni-corrected level 0.01 / (number of tests).
RunOutcome execute_sample(const ScenarioConfig& config, const std::optional<std::filesystem::path>& dir = {});

}  // namespace edlab
