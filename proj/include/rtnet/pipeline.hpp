#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtnet/config.hpp"
#include "rtnet/fit.hpp"

namespace rtnet {

/// A stage input is absent; the message names the stage that produces it.
class MissingInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The configuration violates one or more constraints.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigViolation> violations);
  const std::vector<ConfigViolation>& violations() const { return violations_; }

 private:
  std::vector<ConfigViolation> violations_;
};

/// File names inside the artifact directory.
namespace artifact {
inline constexpr const char* kEvents = "events.bin";
inline constexpr const char* kEventsJsonl = "events.jsonl";
inline constexpr const char* kDataset = "dataset.csv";
inline constexpr const char* kGraph = "graph.bin";
inline constexpr const char* kFollowerLogs = "follower_logs.csv";
inline constexpr const char* kFlagRates = "flag_rates.csv";
inline constexpr const char* kIngestErrors = "ingest_errors.csv";
inline constexpr const char* kBackbone = "backbone.bin";
inline constexpr const char* kSignificance = "significance.csv";
inline constexpr const char* kSizeCurve = "size_curve.csv";
inline constexpr const char* kOverlap = "backbone_overlap.csv";
inline constexpr const char* kDiagnostics = "diagnostics.csv";
inline constexpr const char* kDegreeCcdf = "degree_ccdf.csv";
inline constexpr const char* kWeightCcdf = "weight_ccdf.csv";
inline constexpr const char* kHeterogeneity = "heterogeneity.csv";
inline constexpr const char* kAlignment = "alignment.csv";
inline constexpr const char* kTernary = "ternary.csv";
inline constexpr const char* kCoverage = "coverage.csv";
inline constexpr const char* kGrowth = "growth.csv";
inline constexpr const char* kDailyCounts = "daily_counts.csv";
inline constexpr const char* kSetups = "setups.csv";
inline constexpr const char* kSimulate = "simulate.csv";
inline constexpr const char* kFitJson = "fit.json";
inline constexpr const char* kFitWindows = "fit_windows.csv";
inline constexpr const char* kReportDir = "report";
}  // namespace artifact

/// The nine report files, in emission order.
const std::vector<std::string>& report_files();

/// Each stage reads its inputs from config.out_dir, writes its outputs and a
/// `<stage>.manifest.json` there, and returns a one-line summary.
std::string run_ingest(const PipelineConfig& config);
std::string run_synth(const PipelineConfig& config);
std::string run_backbone(const PipelineConfig& config);
std::string run_diagnose(const PipelineConfig& config);
std::string run_align(const PipelineConfig& config);
std::string run_growth(const PipelineConfig& config);
std::string run_simulate(const PipelineConfig& config);
std::string run_fit(const PipelineConfig& config);
std::string run_report(const PipelineConfig& config);

/// Dispatches by subcommand name; throws std::invalid_argument for unknown
/// names and ConfigError for invalid configurations.
std::string run_stage(const std::string& stage, const PipelineConfig& config);

/// Fit inputs for every window of the dataset, built from the on-disk
/// artifacts. Windows whose lookback reaches before the dataset start are
/// returned in `skipped`.
struct FitInputs {
  std::vector<WindowInput> windows;
  std::vector<ExcludedWindow> skipped;
};
FitInputs load_fit_inputs(const PipelineConfig& config);

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string fnv1a_file(const std::filesystem::path& path);

}  // namespace rtnet
