#include <doctest.h>

#include <stdexcept>

#include "rtnet/events.hpp"

using namespace rtnet;

TEST_SUITE("events") {
  TEST_CASE("descriptive category names map to classes") {
    CHECK(classify_category("Mainstream media") == ContentClass::kFactual);
    CHECK(classify_category("Clickbait") == ContentClass::kMisleading);
    CHECK(classify_category("Satire") == ContentClass::kUncertain);
  }

  TEST_CASE("class mapping over all ten categories") {
    const std::pair<const char*, ContentClass> table[] = {
        {"SCIENCE", ContentClass::kFactual},
        {"MSM", ContentClass::kFactual},
        {"SATIRE", ContentClass::kUncertain},
        {"CLICKBAIT", ContentClass::kMisleading},
        {"POLITICAL", ContentClass::kUncertain},
        {"FAKE/HOAX", ContentClass::kMisleading},
        {"CONSPIRACY/JUNKSCI", ContentClass::kMisleading},
        {"OTHER", ContentClass::kUncertain},
        {"SHADOW", ContentClass::kUncertain},
        {"NA", ContentClass::kUncertain},
    };
    for (const auto& [token, cls] : table) {
      CAPTURE(token);
      CHECK(classify_category(token) == cls);
    }
  }

  TEST_CASE("classification is total and idempotent") {
    for (std::size_t i = 0; i < kNumCategories; ++i) {
      const auto cat = static_cast<RawCategory>(i);
      const auto token = category_token(cat);
      CHECK(parse_category(token) == cat);
      CHECK(classify_category(token) == classify_category(cat));
      CHECK(classify_category(cat) == classify_category(parse_category(token)));
    }
    CHECK(parse_category("fake or hoax") == RawCategory::kFakeOrHoax);
    CHECK(parse_category("conspiracy/junksci") == RawCategory::kConspiracyJunkScience);
  }

  TEST_CASE("unknown labels are errors") {
    CHECK_THROWS_AS(classify_category("Gossip"), std::invalid_argument);
    CHECK_THROWS_AS(parse_category(""), std::invalid_argument);
  }

  TEST_CASE("content class names round trip") {
    for (auto c : kAllClasses) CHECK(parse_content_class(to_string(c)) == c);
    CHECK_FALSE(parse_content_class("neutral").has_value());
  }

  TEST_CASE("timestamps") {
    CHECK(parse_timestamp("1970-01-01") == 0);
    CHECK(parse_timestamp("2020-01-01") == 1577836800);
    CHECK(parse_timestamp("2020-01-01T00:00:10Z") == 1577836810);
    CHECK(parse_timestamp("2020-01-01 01:00:00") == 1577840400);
    CHECK(parse_timestamp("1577836800") == 1577836800);
    CHECK(parse_timestamp(" 42 ") == 42);
    CHECK_FALSE(parse_timestamp("not-a-date").has_value());
    CHECK_FALSE(parse_timestamp("2020-02-30").has_value());
    CHECK_FALSE(parse_timestamp("2020-01-01T25:00:00").has_value());
    CHECK_FALSE(parse_timestamp("").has_value());
    CHECK(format_date(1577836800 + 86399) == "2020-01-01");
    CHECK(format_date(-1) == "1969-12-31");
  }

  TEST_CASE("day index floors toward negative infinity") {
    CHECK(day_of(0) == 0);
    CHECK(day_of(86399) == 0);
    CHECK(day_of(86400) == 1);
    CHECK(day_of(-1) == -1);
    CHECK(day_of(-86400) == -1);
    CHECK(day_of(-86401) == -2);
  }

  TEST_CASE("user table interns in first-appearance order") {
    UserTable users;
    CHECK(users.intern("bob") == 0);
    CHECK(users.intern("alice") == 1);
    CHECK(users.intern("bob") == 0);
    CHECK(users.size() == 2);
    CHECK(users.name(1) == "alice");
    CHECK(users.find("alice") == UserId{1});
    CHECK_FALSE(users.find("carol").has_value());
  }

  TEST_CASE("time ranges are half-open") {
    const TimeRange r{10, 20};
    CHECK(r.contains(10));
    CHECK(r.contains(19));
    CHECK_FALSE(r.contains(20));
    CHECK_FALSE(r.contains(9));
    CHECK(TimeRange{5, 5}.empty());
  }
}
