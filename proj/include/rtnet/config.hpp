#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rtnet/fit.hpp"

namespace rtnet {

struct PipelineConfig {
  std::filesystem::path input;       // event stream for `ingest`
  std::filesystem::path out_dir = "artifacts";
  std::uint64_t seed = 0;
  unsigned threads = 1;

  /// Dataset range; inferred from the events (whole UTC days) when unset.
  std::optional<Timestamp> range_start;
  std::optional<Timestamp> range_end;

  double alpha = 0.05;
  double band = 2.0;
  std::optional<double> tail_lo;
  std::optional<double> tail_hi;

  double theta = 0.95;
  std::uint64_t min_involvement = 0;
  bool use_backbone = true;
  int ternary_bins = 10;

  int window_days = 30;
  int step_days = 15;
  bool partial_windows = false;
  std::size_t min_obs = 2;

  FitConfig fit;
  /// Single-point parameters for `simulate`.
  double sim_r0 = 1.0;
  double sim_delta = 0.05;

  std::uint64_t synth_events = 200000;
  bool synth_jsonl = true;
};

struct ConfigViolation {
  std::string key;
  std::string message;
};

/// Every violated numeric constraint; empty means valid. Paths are checked
/// by the stages that read them.
std::vector<ConfigViolation> validate_config(const PipelineConfig& config);

/// Known keys, in documentation order.
const std::vector<std::string>& config_keys();

/// Sets one key from its text form. Returns a violation instead of throwing
/// for unknown keys and unparsable values.
std::optional<ConfigViolation> set_config_value(PipelineConfig& config, const std::string& key,
                                                const std::string& value);

/// Reads `key = value` lines ('#' starts a comment). Throws
/// std::runtime_error if the file cannot be read; malformed lines are
/// returned as violations.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path,
                                                    std::vector<ConfigViolation>& violations);

}  // namespace rtnet
