#include "rtnet/follower_dynamics.hpp"

#include <algorithm>
#include <stdexcept>

namespace rtnet {

namespace {

using ObsIter = std::vector<FollowerObservation>::const_iterator;

std::pair<ObsIter, ObsIter> in_window(const FollowerLog& log, const TimeWindow& w) {
  const auto by_time = [](const FollowerObservation& o, Timestamp t) { return o.time < t; };
  auto first = std::lower_bound(log.observations.begin(), log.observations.end(), w.start, by_time);
  auto last = std::lower_bound(first, log.observations.end(), w.end, by_time);
  return {first, last};
}

}  // namespace

std::vector<TimeWindow> sliding_windows(TimeRange range, Timestamp length, Timestamp step,
                                        bool include_partial) {
  if (length <= 0 || step <= 0) throw std::invalid_argument("window length and step must be positive");
  if (range.end - range.start < length) {
    throw std::invalid_argument("range is shorter than one window");
  }
  std::vector<TimeWindow> windows;
  Timestamp start = range.start;
  for (; start + length <= range.end; start += step) {
    windows.push_back({start, start + length, false});
  }
  if (include_partial && start < range.end) windows.push_back({start, range.end, true});
  return windows;
}

std::vector<UserId> active_users(const FollowerLogs& logs, const TimeWindow& window,
                                 std::size_t min_obs) {
  if (min_obs < 2) throw std::invalid_argument("min_obs must be >= 2");
  std::vector<UserId> users;
  for (const auto& [user, log] : logs) {
    auto [first, last] = in_window(log, window);
    if (static_cast<std::size_t>(last - first) >= min_obs) users.push_back(user);
  }
  return users;
}

GrowthPoint window_growth_rate(const FollowerLogs& logs, std::span<const UserId> aligned,
                               const TimeWindow& window, ContentClass content_class,
                               std::size_t min_obs) {
  if (min_obs < 2) throw std::invalid_argument("min_obs must be >= 2");
  GrowthPoint point;
  point.window = window;
  point.content_class = content_class;
  for (UserId user : aligned) {
    auto it = logs.find(user);
    if (it == logs.end()) continue;
    auto [first, last] = in_window(it->second, window);
    if (static_cast<std::size_t>(last - first) < min_obs) continue;
    ++point.n_active;
    point.f_first += first->followers;
    point.f_last += std::prev(last)->followers;
  }
  if (point.n_active > 0 && point.f_first > 0) {
    point.rate = (static_cast<double>(point.f_last) - static_cast<double>(point.f_first)) /
                 static_cast<double>(point.f_first);
  }
  return point;
}

DailySeries daily_counts(std::span<const RetweetEvent> events, ContentClass c,
                         const AlignmentIndex& alignment, TimeRange range) {
  DailySeries series;
  if (range.empty()) return series;
  series.first_day = day_of(range.start);
  const auto last_day = day_of(range.end - 1);
  series.counts.assign(static_cast<std::size_t>(last_day - series.first_day + 1), 0);
  const auto aligned_to_c = [&](UserId u) {
    auto it = alignment.find(u);
    return it != alignment.end() && it->second == c;
  };
  for (const auto& e : events) {
    if (e.content_class != c || !range.contains(e.timestamp)) continue;
    if (aligned_to_c(e.retweetee) || aligned_to_c(e.retweeter)) {
      ++series.counts[static_cast<std::size_t>(day_of(e.timestamp) - series.first_day)];
    }
  }
  return series;
}

std::vector<double> boxcar_smooth(std::span<const double> values, std::size_t width) {
  if (width == 0 || width % 2 == 0) throw std::invalid_argument("boxcar width must be odd");
  const std::size_t n = values.size();
  const std::size_t half = width / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = std::min({half, i, n - 1 - i});
    double sum = 0.0;
    for (std::size_t j = i - h; j <= i + h; ++j) sum += values[j];
    out[i] = sum / static_cast<double>(2 * h + 1);
  }
  return out;
}

}  // namespace rtnet
