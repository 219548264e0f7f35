#include "rtnet/events.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace rtnet {

namespace {

struct CategoryName {
  RawCategory category;
  std::string_view token;
  std::string_view description;
};

constexpr std::array<CategoryName, kNumCategories> kCategoryNames{{
    {RawCategory::kScience, "SCIENCE", "Science"},
    {RawCategory::kMainstreamMedia, "MSM", "Mainstream media"},
    {RawCategory::kSatire, "SATIRE", "Satire"},
    {RawCategory::kClickbait, "CLICKBAIT", "Clickbait"},
    {RawCategory::kPolitical, "POLITICAL", "Political"},
    {RawCategory::kFakeOrHoax, "FAKE/HOAX", "Fake or hoax"},
    {RawCategory::kConspiracyJunkScience, "CONSPIRACY/JUNKSCI", "Conspiracy and junk science"},
    {RawCategory::kOther, "OTHER", "Other"},
    {RawCategory::kShadow, "SHADOW", "Shadow"},
    {RawCategory::kNA, "NA", "NA"},
}};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

std::string_view to_string(ContentClass c) {
  switch (c) {
    case ContentClass::kFactual:
      return "factual";
    case ContentClass::kMisleading:
      return "misleading";
    case ContentClass::kUncertain:
      return "uncertain";
  }
  return "uncertain";
}

std::optional<ContentClass> parse_content_class(std::string_view s) {
  for (ContentClass c : kAllClasses) {
    if (iequals(s, to_string(c))) return c;
  }
  return std::nullopt;
}

std::string_view category_token(RawCategory c) {
  return kCategoryNames[static_cast<std::size_t>(c)].token;
}

RawCategory parse_category(std::string_view label) {
  for (const auto& entry : kCategoryNames) {
    if (iequals(label, entry.token) || iequals(label, entry.description)) {
      return entry.category;
    }
  }
  throw std::invalid_argument("unknown category '" + std::string(label) + "'");
}

ContentClass classify_category(std::string_view label) {
  return classify_category(parse_category(label));
}

UserId UserTable::intern(std::string_view name) {
  std::string key(name);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  const UserId id = names_.size();
  names_.push_back(key);
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<UserId> UserTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  if (text.empty()) return std::nullopt;

  Timestamp seconds = 0;
  if (parse_int(text, seconds)) return seconds;

  // YYYY-MM-DD[(T| )HH:MM:SS[Z]]
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned mo = 0;
  unsigned d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) ||
      !parse_int(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo},
                                        std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  Timestamp result =
      std::chrono::sys_days{ymd}.time_since_epoch().count() * kSecondsPerDay;

  std::string_view rest = text.substr(10);
  if (rest.empty()) return result;
  if (rest.front() != 'T' && rest.front() != ' ') return std::nullopt;
  rest.remove_prefix(1);
  if (!rest.empty() && rest.back() == 'Z') rest.remove_suffix(1);
  if (rest.size() != 8 || rest[2] != ':' || rest[5] != ':') return std::nullopt;
  int hh = 0;
  int mm = 0;
  int ss = 0;
  if (!parse_int(rest.substr(0, 2), hh) || !parse_int(rest.substr(3, 2), mm) ||
      !parse_int(rest.substr(6, 2), ss)) {
    return std::nullopt;
  }
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  return result + hh * 3600 + mm * 60 + ss;
}

std::string format_date(Timestamp t) {
  const std::chrono::sys_days days{std::chrono::days{day_of(t)}};
  const std::chrono::year_month_day ymd{days};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace rtnet
