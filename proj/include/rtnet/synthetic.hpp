#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rtnet/events.hpp"

namespace rtnet {

/// A planted population of users sharing involvement and follower behaviour.
struct SynthGroup {
  std::string name;
  std::size_t users = 0;
  /// Relative activity; with class_mix it sets how often the group takes part.
  double activity = 1.0;
  /// Planted involvement proportions over (factual, misleading, uncertain).
  std::array<double, kNumClasses> class_mix{1.0, 0.0, 0.0};
  /// Relative propensity to be the retweeted side of an event.
  double creator_weight = 1.0;
  /// Log-normal parameters of the initial follower count.
  double follower_log_mean = 7.0;
  double follower_log_sd = 1.5;
  /// Follower growth per 30 days, one entry per growth step (the last entry
  /// repeats). Empty means no growth.
  std::vector<double> growth;
  double bot_rate = 0.0;
  double verified_rate = 0.0;
};

struct SynthConfig {
  TimeRange range;
  std::vector<SynthGroup> groups;
  std::array<std::uint64_t, kNumClasses> events_per_class{};
  Timestamp growth_step = 15 * kSecondsPerDay;
  /// Share of events whose partner is one of the focal user's favourites for
  /// that class; repeat pairs give the heavy-tailed edge weights.
  double favourite_share = 0.6;
  std::size_t favourites_per_class = 3;
  /// Popularity of the u-th user of a group is proportional to (u + 1)^-exponent.
  double popularity_exponent = 0.8;
};

/// Throws std::invalid_argument for inconsistent configurations, e.g. a class
/// with events but no group able to take part in it.
void validate_synth_config(const SynthConfig& config);

/// Deterministic for a fixed (config, seed). Events come out in time order;
/// user names are "<group>-<index>".
EventStream generate_synthetic(const SynthConfig& config, std::uint64_t seed);

/// A mid-sized default world: three aligned groups plus a mixed swayable pool,
/// spread over one year.
SynthConfig default_synth_config(std::uint64_t total_events);

}  // namespace rtnet
