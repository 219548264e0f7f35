#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rtnet/sir.hpp"

namespace rtnet {

enum class FitMode {
  /// Acceptance is recomputed inside every objective evaluation.
  kNested,
  /// Acceptance is fixed once at the best scanned delta; delta is then
  /// refined on the fixed accepted sets.
  kSinglePass,
};

std::string_view to_string(FitMode mode);
FitMode parse_fit_mode(std::string_view text);

struct FitConfig {
  double r0_min = 0.0;
  double r0_max = 5.0;
  double r0_step = 0.05;
  std::size_t runs_per_point = 100;
  double tolerance_pct = 0.10;
  int lookback_months = 1;
  std::uint64_t seed = 0;
  FitMode mode = FitMode::kNested;
  double delta_tolerance = 1e-4;
  std::size_t max_iterations = 200;
  /// Evenly spaced delta values scanned to seed the simplex.
  std::size_t delta_scan_points = 21;
  unsigned threads = 1;

  /// Inclusive grid r0_min, r0_min + step, ..., r0_max.
  std::vector<double> r0_grid() const;
  /// ceil(tolerance_pct * grid points * runs), at least 1.
  std::size_t accepted_per_window() const;
};

/// Throws std::invalid_argument naming the first bad field.
void validate_fit_config(const FitConfig& config);

struct WindowInput {
  std::uint32_t key = 0;
  TimeWindow window;
  std::array<CascadeSetup, kNumClasses> setups;
  ClassRates empirical;
};

struct AcceptedDraw {
  std::size_t grid_index = 0;
  double r0 = 0.0;
  std::uint32_t replicate = 0;
  double loss = 0.0;
  std::array<double, kNumClasses> rates{};
};

struct ClassFit {
  double empirical = 0.0;
  double simulated_mean = 0.0;
  double simulated_sd = 0.0;
};

struct WindowFit {
  std::uint32_t key = 0;
  TimeWindow window;
  std::vector<AcceptedDraw> accepted;  // ordered by (loss, stream)
  double mean_loss = 0.0;
  double r0_mean = 0.0;
  double r0_sd = 0.0;
  std::array<ClassFit, kNumClasses> classes{};
};

struct ExcludedWindow {
  std::uint32_t key = 0;
  TimeWindow window;
  std::string reason;
};

struct FitResult {
  double delta = 0.0;
  double objective = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
  FitConfig config;
  std::vector<WindowFit> windows;  // ordered by key
  std::vector<ExcludedWindow> excluded;
};

/// Why a window cannot enter the fit, or empty if it can.
std::string exclusion_reason(const WindowInput& window);

/// Simulated sampling ratios for every (window, grid point, replicate,
/// class). They do not depend on delta, so each objective evaluation only
/// rescales them and reselects the accepted sets.
class SimulationTable {
 public:
  /// Windows must be simulable and have distinct keys.
  SimulationTable(std::span<const WindowInput> windows, const FitConfig& config);

  std::size_t window_count() const { return windows_.size(); }
  std::size_t grid_size() const { return grid_.size(); }
  std::size_t runs() const { return runs_; }
  const WindowInput& window(std::size_t w) const { return *windows_[w]; }

  /// Sampled-follower ratio before scaling by delta.
  double ratio(std::size_t w, std::size_t g, std::size_t r, std::size_t c) const {
    return ratios_[((w * grid_.size() + g) * runs_ + r) * kNumClasses + c];
  }
  double loss(std::size_t w, std::size_t draw, double delta) const;

  /// Draw ids (g * runs + r) of the accepted set for window w, ordered by
  /// (loss, id).
  std::vector<std::size_t> accept(std::size_t w, double delta) const;
  double mean_loss(std::size_t w, std::span<const std::size_t> draws, double delta) const;
  /// Sum over windows of the mean accepted loss, in key order.
  double objective(double delta) const;

  WindowFit summarize(std::size_t w, double delta) const;

 private:
  std::vector<const WindowInput*> windows_;
  std::vector<double> grid_;
  std::size_t runs_ = 0;
  std::size_t accepted_ = 0;
  std::vector<double> ratios_;
};

/// Stream for one (window, class, grid point, replicate) draw.
RandomStream draw_stream(std::uint64_t seed, std::uint32_t window_key, std::size_t class_index,
                         std::size_t grid_index, std::size_t replicate);

/// Throws std::invalid_argument if no window is simulable.
FitResult fit_parameters(std::span<const WindowInput> windows, const FitConfig& config);

void write_fit_json(std::ostream& out, const FitResult& result);

}  // namespace rtnet
