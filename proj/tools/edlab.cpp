// Command-line front end. Exit codes: 0 success, 1 a check failed,
// 2 usage, configuration or I/O error. Diagnostics go to stderr.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "edlab/acceptance.hpp"
#include "edlab/config.hpp"
#include "edlab/errors.hpp"
#include "edlab/inference.hpp"
#include "edlab/run.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : " ") + g17(x);
  return out;
}

int report(const edlab::RunOutcome& r) {
  for (const auto& c : r.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  std::cout << "wrote " << r.files.size() << " files and manifest.json to " << r.dir.string() << "\n";
  if (!r.passed) std::cerr << "edlab: one or more checks failed\n";
  return r.passed ? kOk : kCheckFailed;
}

edlab::ScenarioConfig load(const std::string& path, const std::optional<std::uint64_t>& seed) {
  edlab::ScenarioConfig c = edlab::load_config(path);
  if (seed) c.seed = *seed;
  return c;
}

int infer_bayes(const std::string& path) {
  using namespace edlab::inference;
  const auto cfg = edlab::parse_bayes_config(edlab::read_text_file(path));
  const auto r = bayes_update(Distribution(cfg.prior), ConditionalTable(cfg.likelihood), cfg.observed);
  std::cout << "posterior = " << join(r.posterior.weights()) << "\n";
  std::cout << "evidence_probability = " << g17(r.evidence_probability) << "\n";
  return kOk;
}

int infer_maxent(const std::string& path) {
  using namespace edlab::inference;
  const auto cfg = edlab::parse_maxent_config(edlab::read_text_file(path));
  const std::size_t n = cfg.prior.empty() ? (cfg.features.empty() ? 0 : cfg.features.front().size()) : cfg.prior.size();
  const Distribution prior = cfg.prior.empty() ? Distribution::uniform(n) : Distribution(cfg.prior);
  std::vector<MomentConstraint> constraints;
  for (std::size_t k = 0; k < cfg.features.size(); ++k) constraints.push_back({cfg.features[k], cfg.targets[k]});
  const auto r = maxent_solve(prior, constraints);
  std::cout << "distribution = " << join(r.distribution.weights()) << "\n";
  std::cout << "multipliers = " << join(r.multipliers) << "\n";
  std::cout << "entropy = " << g17(shannon_entropy(r.distribution)) << "\n";
  std::cout << "iterations = " << r.iterations << "\n";
  std::cout << "residual = " << g17(r.residual) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropic dynamics laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EDLAB_VERSION);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Evaluate a scenario and write snapshots, plots and a manifest");
  run->add_option("config", config_path, "Scenario config file")->required();
  run->add_option("--seed", seed, "Override the config seed");

  auto* sample = app.add_subcommand("sample", "Sample trajectories and write histograms and a manifest");
  sample->add_option("config", config_path, "Scenario config file")->required();
  sample->add_option("--seed", seed, "Override the config seed");

  std::string suite = "fast";
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));

  std::string method;
  auto* infer = app.add_subcommand("infer", "Bayesian update or maximum-entropy inference");
  infer->add_option("method", method, "bayes or maxent")->required()->check(CLI::IsMember({"bayes", "maxent"}));
  infer->add_option("config", config_path, "Inference config file")->required();

  auto* list = app.add_subcommand("list-scenarios", "Print the scenario names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*list) {
      for (const auto& name : edlab::scenario_names()) std::cout << name << "\n";
      return kOk;
    }
    if (*run) return report(edlab::execute_run(load(config_path, seed)));
    if (*sample) return report(edlab::execute_sample(load(config_path, seed)));
    if (*infer) return method == "bayes" ? infer_bayes(config_path) : infer_maxent(config_path);
    if (*verify) {
      using namespace edlab::acceptance;
      bool ok = true;
      run_suite(suite == "full" ? Suite::Full : Suite::Fast, [&](const CriterionResult& r) {
        std::cout << format_result(r) << std::endl;
        ok = ok && r.passed;
      });
      if (!ok) std::cerr << "edlab: acceptance suite failed\n";
      return ok ? kOk : kCheckFailed;
    }
  } catch (const edlab::ConfigurationError& e) {
    std::cerr << "edlab: configuration error:\n" << e.what() << "\n";
    return kUsage;
  } catch (const edlab::IoError& e) {
    std::cerr << "edlab: " << e.what() << "\n";
    return kUsage;
  } catch (const edlab::Error& e) {
    // Invalid inference inputs (bad prior, impossible evidence) land here too.
    std::cerr << "edlab: " << e.what() << "\n";
    return *infer ? kUsage : kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "edlab: internal error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}
