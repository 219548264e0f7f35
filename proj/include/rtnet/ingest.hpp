#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtnet/events.hpp"

namespace rtnet {

enum class EventFormat { kAuto, kJsonLines, kCsv };

struct ParseOptions {
  EventFormat format = EventFormat::kAuto;
  /// Events outside this range are rejected as per-line errors.
  std::optional<TimeRange> dataset_range;
};

struct ParseIssue {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct ParseResult {
  EventStream stream;
  std::vector<ParseIssue> issues;
};

/// Parses a JSON Lines (or headered CSV) event stream. Bad lines are skipped
/// and reported; a stream-level read failure throws std::runtime_error.
ParseResult parse_events(std::istream& in, const ParseOptions& options = {});
ParseResult parse_events_file(const std::filesystem::path& path,
                              const ParseOptions& options = {});

/// One JSON Lines record with the documented field order.
std::string serialize_event(const RetweetEvent& event, const UserTable& users);
void write_events_jsonl(std::ostream& out, const EventStream& stream);

struct FollowerObservation {
  Timestamp time = 0;
  std::uint64_t followers = 0;

  bool operator==(const FollowerObservation&) const = default;
};

struct FollowerLog {
  UserId user = 0;
  /// Strictly increasing in time.
  std::vector<FollowerObservation> observations;
};

using FollowerLogs = std::map<UserId, FollowerLog>;

/// One observation per event role; simultaneous observations of a user keep
/// the value seen last in stream order.
FollowerLogs build_follower_logs(std::span<const RetweetEvent> events);

struct UserFlagRates {
  UserId user = 0;
  double bot_rate = 0.0;
  double verification_rate = 0.0;
  std::size_t n_observations = 0;
};

std::map<UserId, UserFlagRates> user_flag_rates(std::span<const RetweetEvent> events);

void write_follower_logs_csv(std::ostream& out, const FollowerLogs& logs,
                             const UserTable& users);
void write_flag_rates_csv(std::ostream& out, const std::map<UserId, UserFlagRates>& rates,
                          const UserTable& users);

}  // namespace rtnet
