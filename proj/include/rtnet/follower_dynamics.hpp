#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "rtnet/alignment.hpp"
#include "rtnet/events.hpp"
#include "rtnet/ingest.hpp"

namespace rtnet {

inline constexpr Timestamp kWindowLength = 30 * kSecondsPerDay;
inline constexpr Timestamp kWindowStep = 15 * kSecondsPerDay;

struct TimeWindow {
  Timestamp start = 0;
  Timestamp end = 0;
  /// Set when the window was cut short by the end of the range.
  bool partial = false;

  TimeRange range() const { return {start, end}; }
  bool operator==(const TimeWindow&) const = default;
};

/// Windows of `length` starting every `step` from range.start. Full windows
/// only, unless `include_partial` adds one truncated tail window. Throws
/// std::invalid_argument if the range is shorter than one window or
/// step/length are not positive.
std::vector<TimeWindow> sliding_windows(TimeRange range, Timestamp length = kWindowLength,
                                        Timestamp step = kWindowStep,
                                        bool include_partial = false);

/// Users with at least `min_obs` observations inside the window.
std::vector<UserId> active_users(const FollowerLogs& logs, const TimeWindow& window,
                                 std::size_t min_obs = 2);

struct GrowthPoint {
  TimeWindow window;
  ContentClass content_class = ContentClass::kFactual;
  /// nullopt when no active user contributes or F_first = 0.
  std::optional<double> rate;
  std::size_t n_active = 0;
  std::uint64_t f_first = 0;
  std::uint64_t f_last = 0;
};

/// Sums the first and last in-window follower observation over the active
/// members of `aligned`; rate = (F_last - F_first) / F_first.
GrowthPoint window_growth_rate(const FollowerLogs& logs, std::span<const UserId> aligned,
                               const TimeWindow& window, ContentClass content_class,
                               std::size_t min_obs = 2);

struct DailySeries {
  std::int64_t first_day = 0;  // days since epoch
  std::vector<std::uint64_t> counts;
};

/// Retweets of class `c` per UTC day over `range` where either endpoint is
/// aligned to `c`; each retweet counts once.
DailySeries daily_counts(std::span<const RetweetEvent> events, ContentClass c,
                         const AlignmentIndex& alignment, TimeRange range);

/// Centered moving average; near the ends the window shrinks symmetrically.
std::vector<double> boxcar_smooth(std::span<const double> values, std::size_t width = 5);

struct TrendLine {
  std::vector<double> values;
  /// False when the series was too short for the polynomial stage.
  bool polynomial = false;
};

/// Boxcar smoothing followed by a least-squares polynomial of `degree`,
/// evaluated at the input abscissae (rescaled to [-1, 1]). Series shorter
/// than degree + 1 points return the boxcar stage only.
TrendLine trend_line(std::span<const double> x, std::span<const double> y, int degree = 10,
                     std::size_t boxcar_width = 5);

}  // namespace rtnet
