// Command-line front end: parses a scenario config, runs the requested
// experiment across seeds, and writes figure-ready CSV files.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iccon/config.hpp"
#include "iccon/errors.hpp"
#include "iccon/experiment.hpp"
#include "iccon/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string token =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (token.empty()) throw iccon::ConfigError("--seeds: empty entry in '" + text + "'");
    std::size_t used = 0;
    std::uint64_t value = 0;
    try {
      value = std::stoull(token, &used);
    } catch (const std::exception&) {
      throw iccon::ConfigError("--seeds: '" + token + "' is not an integer");
    }
    if (used != token.size())
      throw iccon::ConfigError("--seeds: '" + token + "' is not an integer");
    seeds.push_back(value);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return seeds;
}

std::vector<std::uint64_t> default_seeds() {
  std::vector<std::uint64_t> seeds(10);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i + 1;
  return seeds;
}

struct CommonArgs {
  std::string config_path;
  std::string seeds_text;
  std::string out_dir = "./out";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Path to the scenario config file")->required();
  cmd->add_option("--seeds", args.seeds_text,
                  "Comma-separated 64-bit seeds (default: config seed, else 1..10)");
  cmd->add_option("--out", args.out_dir, "Output directory (default ./out)");
}

int run_scenario(iccon::ScenarioKind expected, const CommonArgs& args,
                 const std::string& policy_choice) {
  const iccon::ParsedConfig parsed = iccon::load_config(args.config_path);
  if (parsed.scenario != expected) {
    throw iccon::ConfigError(args.config_path + ": config declares scenario '" +
                             iccon::to_string(parsed.scenario) + "', expected '" +
                             iccon::to_string(expected) + "'");
  }

  iccon::RunManifest manifest;
  manifest.config = parsed;
  manifest.config_text = iccon::read_text_file(args.config_path);
  manifest.out_dir = args.out_dir;
  if (!args.seeds_text.empty()) {
    manifest.seeds = parse_seed_list(args.seeds_text);
  } else if (parsed.seed) {
    manifest.seeds = {*parsed.seed};
  } else {
    manifest.seeds = default_seeds();
  }

  if (expected == iccon::ScenarioKind::kChurn) {
    if (policy_choice == "both") {
      manifest.policies = {iccon::SelectionPolicy::kIccon, iccon::SelectionPolicy::kRandom};
    } else if (policy_choice == "random") {
      manifest.policies = {iccon::SelectionPolicy::kRandom};
    } else if (policy_choice == "iccon") {
      manifest.policies = {iccon::SelectionPolicy::kIccon};
    } else if (policy_choice.empty()) {
      manifest.policies = {parsed.sim->policy};
    } else {
      throw iccon::ConfigError("--policy must be iccon, random or both");
    }
  } else if (expected == iccon::ScenarioKind::kPerRequest) {
    manifest.policies = {parsed.sim->policy};
  }

  const iccon::ExperimentResult result = iccon::run_experiment(manifest);
  std::cout << result.summary;
  std::cout << "wrote " << result.files.size() << " files to " << args.out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iccon: information-centric AP selection simulator and cache analysis"};
  app.set_version_flag("--version", iccon::kVersion);
  app.require_subcommand(1);

  CommonArgs churn_args, per_request_args, sweep_args, validate_args;
  std::string policy_choice;

  CLI::App* churn = app.add_subcommand("churn", "FIFO departure/arrival scenario");
  add_common(churn, churn_args);
  churn->add_option("--policy", policy_choice, "iccon, random, or both (default: from config)");

  CLI::App* per_request = app.add_subcommand("per-request", "Per-request AP decision scenario");
  add_common(per_request, per_request_args);

  CLI::App* sweep = app.add_subcommand("che-sweep", "Characteristic-time sweep over (alpha, c)");
  add_common(sweep, sweep_args);

  CLI::App* validate = app.add_subcommand("validate", "Parse and validate a config, then exit");
  validate->add_option("--config", validate_args.config_path, "Path to the config file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (validate->parsed()) {
      const iccon::ParsedConfig parsed = iccon::load_config(validate_args.config_path);
      std::cout << "OK: scenario=" << iccon::to_string(parsed.scenario) << "\n";
      return kExitOk;
    }
    if (churn->parsed())
      return run_scenario(iccon::ScenarioKind::kChurn, churn_args, policy_choice);
    if (per_request->parsed())
      return run_scenario(iccon::ScenarioKind::kPerRequest, per_request_args, "");
    if (sweep->parsed())
      return run_scenario(iccon::ScenarioKind::kCheSweep, sweep_args, "");
  } catch (const iccon::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
