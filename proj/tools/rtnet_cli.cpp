#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "rtnet/pipeline.hpp"

namespace {

enum ExitCode : int { kOk = 0, kValidation = 1, kMissingInput = 2, kRuntime = 3 };

struct Subcommand {
  const char* name;
  const char* help;
  std::vector<std::string> keys;
};

const std::vector<Subcommand>& subcommands() {
  static const std::vector<std::string> windows = {"window-days", "step-days", "partial-windows"};
  const auto with_windows = [](std::vector<std::string> keys) {
    keys.insert(keys.end(), windows.begin(), windows.end());
    return keys;
  };
  static const std::vector<Subcommand> table = {
      {"ingest", "Parse an event stream into the artifact directory",
       {"input", "range-start", "range-end"}},
      {"synth", "Generate a synthetic event stream and ingest it",
       {"events", "range-start", "range-end", "synth-jsonl"}},
      {"backbone", "Disparity-filter backbone, size curve and significance table", {"alpha"}},
      {"diagnose", "Heterogeneity test, degree/weight distributions, clustering",
       {"band", "tail-lo", "tail-hi"}},
      {"align", "Involvement profiles, aligned users, ternary and coverage tables",
       {"theta", "min-involvement", "use-backbone", "ternary-bins"}},
      {"growth", "Windowed follower growth and daily retweet counts",
       with_windows({"min-obs"})},
      {"simulate", "Cascade setups and simulated growth at one (R0, delta)",
       with_windows({"n", "r0", "delta", "runs", "use-backbone"})},
      {"fit", "Fit delta and per-window R0 against the empirical growth",
       with_windows({"n", "r0-min", "r0-max", "r0-step", "runs", "tolerance", "fit-mode",
                     "delta-tol", "delta-scan", "max-iter", "use-backbone"})},
      {"report", "Collect plot-ready tables for every figure", {"band", "tail-lo", "tail-hi"}},
  };
  return table;
}

const char* describe(const std::string& key) {
  static const std::map<std::string, const char*> help = {
      {"input", "Event file (.jsonl, or .csv with a header row)"},
      {"range-start", "Dataset start, YYYY-MM-DD or Unix seconds (default: first event day)"},
      {"range-end", "Dataset end, exclusive (default: day after the last event)"},
      {"events", "Number of synthetic events (default: 200000)"},
      {"synth-jsonl", "Also write events.jsonl (default: true)"},
      {"alpha", "Significance level; edges with alpha < level are kept (default: 0.05)"},
      {"band", "Heterogeneity band in null standard deviations (default: 2)"},
      {"tail-lo", "Lower bound of the weight range for the tail fit"},
      {"tail-hi", "Upper bound of the weight range for the tail fit"},
      {"theta", "Alignment threshold in [0.5, 1) (default: 0.95)"},
      {"min-involvement", "Minimum involvement for a user to be aligned (default: 0)"},
      {"use-backbone", "Restrict to backbone edges (default: true)"},
      {"ternary-bins", "Bins per side of the ternary histogram (default: 10)"},
      {"window-days", "Sliding window length in days (default: 30)"},
      {"step-days", "Sliding window step in days (default: 15)"},
      {"partial-windows", "Keep a trailing partial window (default: false)"},
      {"min-obs", "Observations a user needs inside a window (default: 2)"},
      {"n", "Lookback in 30-day months for the temporal network (default: 1)"},
      {"r0", "R0 for the simulation (default: 1)"},
      {"delta", "Follower scaling delta in [0, 1] (default: 0.05)"},
      {"runs", "Stochastic replicates per grid point (default: 100)"},
      {"r0-min", "R0 grid start (default: 0)"},
      {"r0-max", "R0 grid end, inclusive (default: 5)"},
      {"r0-step", "R0 grid step (default: 0.05)"},
      {"tolerance", "Accepted fraction of (R0, replicate) draws per window (default: 0.10)"},
      {"fit-mode", "nested or single-pass (default: nested)"},
      {"delta-tol", "Nelder-Mead convergence tolerance on delta (default: 1e-4)"},
      {"delta-scan", "Evenly spaced delta values scanned to seed the simplex (default: 21)"},
      {"max-iter", "Nelder-Mead iteration limit (default: 200)"},
  };
  auto it = help.find(key);
  return it == help.end() ? "" : it->second;
}

void print_violations(const std::vector<rtnet::ConfigViolation>& violations) {
  for (const auto& v : violations) std::cerr << "error: " << v.key << ": " << v.message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rtnet: retweet network backbones, aligned users and cascade fitting"};
  app.require_subcommand(1, 1);

  std::string config_file;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  app.add_option("--config", config_file, "Flat key = value file; flags override it");
  for (const char* key : {"out", "seed", "threads"}) {
    options.emplace_back(key, app.add_option(std::string("--") + key, values[key]));
  }
  options[0].second->description("Artifact directory (default: artifacts)");
  options[1].second->description("Seed for every random stream (default: 0)");
  options[2].second->description("Worker threads; results do not depend on it (default: 1)");

  for (const auto& sub : subcommands()) {
    auto* cmd = app.add_subcommand(sub.name, sub.help);
    cmd->fallthrough();
    for (const auto& key : sub.keys) {
      options.emplace_back(key, cmd->add_option("--" + key, values[sub.name + (":" + key)], describe(key)));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }
  const std::string stage = app.get_subcommands().front()->get_name();

  rtnet::PipelineConfig config;
  std::vector<rtnet::ConfigViolation> violations;
  if (!config_file.empty()) {
    std::map<std::string, std::string> file_values;
    try {
      file_values = rtnet::read_config_file(config_file, violations);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kMissingInput;
    }
    for (const auto& [key, value] : file_values) {
      if (auto v = rtnet::set_config_value(config, key, value)) violations.push_back(*v);
    }
  }
  for (const auto& [key, option] : options) {
    if (option->count() == 0) continue;
    if (auto v = rtnet::set_config_value(config, key, option->as<std::string>())) {
      violations.push_back(*v);
    }
  }
  auto checks = rtnet::validate_config(config);
  violations.insert(violations.end(), checks.begin(), checks.end());
  if (!violations.empty()) {
    print_violations(violations);
    return kValidation;
  }

  try {
    std::cout << rtnet::run_stage(stage, config) << '\n';
  } catch (const rtnet::ConfigError& e) {
    print_violations(e.violations());
    return kValidation;
  } catch (const rtnet::MissingInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMissingInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << stage << " failed: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
