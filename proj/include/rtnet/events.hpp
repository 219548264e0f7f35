#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rtnet {

using UserId = std::uint64_t;
/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

inline constexpr Timestamp kSecondsPerDay = 86400;

/// Half-open interval [start, end).
struct TimeRange {
  Timestamp start = 0;
  Timestamp end = 0;

  bool contains(Timestamp t) const { return t >= start && t < end; }
  bool empty() const { return end <= start; }
};

enum class ContentClass : std::uint8_t { kFactual = 0, kMisleading = 1, kUncertain = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<ContentClass, kNumClasses> kAllClasses{
    ContentClass::kFactual, ContentClass::kMisleading, ContentClass::kUncertain};

constexpr std::size_t index_of(ContentClass c) { return static_cast<std::size_t>(c); }

std::string_view to_string(ContentClass c);
std::optional<ContentClass> parse_content_class(std::string_view s);

/// The ten expert domain categories (NA = URL not in the domain database).
enum class RawCategory : std::uint8_t {
  kScience,
  kMainstreamMedia,
  kSatire,
  kClickbait,
  kPolitical,
  kFakeOrHoax,
  kConspiracyJunkScience,
  kOther,
  kShadow,
  kNA,
};

inline constexpr std::size_t kNumCategories = 10;

/// Uppercase wire token, e.g. "MSM", "FAKE/HOAX".
std::string_view category_token(RawCategory c);

/// Accepts wire tokens and descriptive names ("Mainstream media"),
/// case-insensitively. Throws std::invalid_argument on anything else.
RawCategory parse_category(std::string_view label);

constexpr ContentClass classify_category(RawCategory c) {
  switch (c) {
    case RawCategory::kScience:
    case RawCategory::kMainstreamMedia:
      return ContentClass::kFactual;
    case RawCategory::kFakeOrHoax:
    case RawCategory::kConspiracyJunkScience:
    case RawCategory::kClickbait:
      return ContentClass::kMisleading;
    default:
      return ContentClass::kUncertain;
  }
}

/// Throws std::invalid_argument for unknown labels.
ContentClass classify_category(std::string_view label);

struct RetweetEvent {
  Timestamp timestamp = 0;
  UserId retweeter = 0;  // consumer
  UserId retweetee = 0;  // creator
  RawCategory raw_category = RawCategory::kNA;
  ContentClass content_class = ContentClass::kUncertain;
  std::uint64_t retweeter_followers = 0;
  std::uint64_t retweetee_followers = 0;
  bool retweeter_bot = false;
  bool retweeter_verified = false;
  bool retweetee_bot = false;
  bool retweetee_verified = false;

  bool operator==(const RetweetEvent&) const = default;
};

/// Interns external user identifiers into dense 64-bit ids in order of first
/// appearance.
class UserTable {
 public:
  UserId intern(std::string_view name);
  std::optional<UserId> find(std::string_view name) const;
  const std::string& name(UserId id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, UserId> index_;
};

struct EventStream {
  UserTable users;
  std::vector<RetweetEvent> events;
};

/// Day index (days since epoch, UTC) of a timestamp.
constexpr std::int64_t day_of(Timestamp t) {
  return t >= 0 ? t / kSecondsPerDay : -((-t + kSecondsPerDay - 1) / kSecondsPerDay);
}

/// Parses "YYYY-MM-DD" or "YYYY-MM-DDTHH:MM:SS[Z]" (also with a space) as UTC,
/// or a plain integer of epoch seconds.
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_date(Timestamp t);

}  // namespace rtnet
