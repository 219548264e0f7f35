#include "rtnet/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "rtnet/csv.hpp"

namespace rtnet {

namespace {

constexpr std::array<std::string_view, 10> kFieldNames{
    "ts",          "src",         "dst",          "cat",         "src_followers",
    "dst_followers", "src_bot",   "dst_bot",      "src_verified", "dst_verified"};

enum Field : std::size_t {
  kTs,
  kSrc,
  kDst,
  kCat,
  kSrcFollowers,
  kDstFollowers,
  kSrcBot,
  kDstBot,
  kSrcVerified,
  kDstVerified,
};

using RecordFields = std::array<std::string, kFieldNames.size()>;

std::optional<std::size_t> field_index(std::string_view name) {
  for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
    if (kFieldNames[i] == name) return i;
  }
  return std::nullopt;
}

std::string json_scalar_text(const nlohmann::json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_null()) return "";
  return value.dump();
}

// Fills `fields` from one JSON object; returns an error message on failure.
std::optional<std::string> read_json_record(std::string_view line, RecordFields& fields) {
  auto doc = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return "invalid JSON object";
  std::array<bool, kFieldNames.size()> seen{};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    auto idx = field_index(it.key());
    if (!idx) return "unexpected field '" + it.key() + "'";
    if (it.value().is_object() || it.value().is_array()) {
      return "field '" + it.key() + "' must be a scalar";
    }
    fields[*idx] = json_scalar_text(it.value());
    seen[*idx] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) return "missing field '" + std::string(kFieldNames[i]) + "'";
  }
  return std::nullopt;
}

std::optional<std::uint64_t> parse_count(std::string_view text, std::string& error,
                                         std::string_view name) {
  if (!text.empty() && text.front() == '-') {
    error = "negative " + std::string(name);
    return std::nullopt;
  }
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    error = "malformed " + std::string(name) + " '" + std::string(text) + "'";
    return std::nullopt;
  }
  return value;
}

std::optional<bool> parse_flag(std::string_view text) {
  if (text == "true" || text == "1" || text == "True" || text == "TRUE") return true;
  if (text == "false" || text == "0" || text == "False" || text == "FALSE") return false;
  return std::nullopt;
}

struct Decoder {
  const ParseOptions& options;
  ParseResult& result;

  void decode(std::size_t line_no, const RecordFields& f) {
    std::string error;
    RetweetEvent ev;

    auto ts = parse_timestamp(f[kTs]);
    if (!ts) return fail(line_no, "malformed timestamp '" + f[kTs] + "'");
    if (options.dataset_range && !options.dataset_range->contains(*ts)) {
      return fail(line_no, "timestamp " + std::to_string(*ts) + " outside dataset range");
    }
    ev.timestamp = *ts;

    if (f[kSrc].empty() || f[kDst].empty()) return fail(line_no, "empty user identifier");

    try {
      ev.raw_category = parse_category(f[kCat]);
    } catch (const std::invalid_argument&) {
      return fail(line_no, "unknown category '" + f[kCat] + "'");
    }
    ev.content_class = classify_category(ev.raw_category);

    auto src_f = parse_count(f[kSrcFollowers], error, "follower count");
    if (!src_f) return fail(line_no, error);
    auto dst_f = parse_count(f[kDstFollowers], error, "follower count");
    if (!dst_f) return fail(line_no, error);
    ev.retweetee_followers = *src_f;
    ev.retweeter_followers = *dst_f;

    const std::array<std::pair<Field, bool*>, 4> flags{{{kSrcBot, &ev.retweetee_bot},
                                                        {kDstBot, &ev.retweeter_bot},
                                                        {kSrcVerified, &ev.retweetee_verified},
                                                        {kDstVerified, &ev.retweeter_verified}}};
    for (auto [field, target] : flags) {
      auto value = parse_flag(f[field]);
      if (!value) {
        return fail(line_no, "malformed flag " + std::string(kFieldNames[field]) + " '" +
                                 f[field] + "'");
      }
      *target = *value;
    }

    ev.retweetee = result.stream.users.intern(f[kSrc]);
    ev.retweeter = result.stream.users.intern(f[kDst]);
    result.stream.events.push_back(ev);
  }

  void fail(std::size_t line_no, std::string message) {
    result.issues.push_back({line_no, std::move(message)});
  }
};

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

}  // namespace

ParseResult parse_events(std::istream& in, const ParseOptions& options) {
  ParseResult result;
  Decoder decoder{options, result};

  EventFormat format = options.format;
  std::vector<std::size_t> csv_columns;  // column -> field index (or npos)
  bool csv_header_read = false;

  std::string line;
  std::size_t line_no = 0;
  RecordFields fields;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    if (format == EventFormat::kAuto) {
      const auto first = line.find_first_not_of(" \t");
      format = line[first] == '{' ? EventFormat::kJsonLines : EventFormat::kCsv;
    }

    if (format == EventFormat::kJsonLines) {
      if (auto err = read_json_record(line, fields)) {
        decoder.fail(line_no, *err);
        continue;
      }
      decoder.decode(line_no, fields);
      continue;
    }

    auto cells = split_csv_line(line);
    if (!csv_header_read) {
      csv_header_read = true;
      std::array<bool, kFieldNames.size()> seen{};
      for (const auto& name : cells) {
        auto idx = field_index(name);
        if (!idx || seen[*idx]) {
          throw std::runtime_error("CSV header: unexpected or duplicate column '" + name + "'");
        }
        seen[*idx] = true;
        csv_columns.push_back(*idx);
      }
      for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
          throw std::runtime_error("CSV header: missing column '" +
                                   std::string(kFieldNames[i]) + "'");
        }
      }
      continue;
    }
    if (cells.size() != csv_columns.size()) {
      decoder.fail(line_no, "expected " + std::to_string(csv_columns.size()) + " columns, got " +
                                std::to_string(cells.size()));
      continue;
    }
    for (std::size_t c = 0; c < cells.size(); ++c) fields[csv_columns[c]] = std::move(cells[c]);
    decoder.decode(line_no, fields);
  }
  if (in.bad()) throw std::runtime_error("I/O error while reading event stream");
  return result;
}

ParseResult parse_events_file(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  ParseOptions opts = options;
  if (opts.format == EventFormat::kAuto && path.extension() == ".csv") {
    opts.format = EventFormat::kCsv;
  }
  return parse_events(in, opts);
}

std::string serialize_event(const RetweetEvent& e, const UserTable& users) {
  const auto b = [](bool v) { return v ? "true" : "false"; };
  std::string out;
  out.reserve(192);
  out += "{\"ts\":" + std::to_string(e.timestamp);
  out += ",\"src\":" + nlohmann::json(users.name(e.retweetee)).dump();
  out += ",\"dst\":" + nlohmann::json(users.name(e.retweeter)).dump();
  out += ",\"cat\":\"" + std::string(category_token(e.raw_category)) + "\"";
  out += ",\"src_followers\":" + std::to_string(e.retweetee_followers);
  out += ",\"dst_followers\":" + std::to_string(e.retweeter_followers);
  out += std::string(",\"src_bot\":") + b(e.retweetee_bot);
  out += std::string(",\"dst_bot\":") + b(e.retweeter_bot);
  out += std::string(",\"src_verified\":") + b(e.retweetee_verified);
  out += std::string(",\"dst_verified\":") + b(e.retweeter_verified);
  out += "}";
  return out;
}

void write_events_jsonl(std::ostream& out, const EventStream& stream) {
  for (const auto& e : stream.events) out << serialize_event(e, stream.users) << '\n';
}

FollowerLogs build_follower_logs(std::span<const RetweetEvent> events) {
  struct Tagged {
    UserId user;
    Timestamp time;
    std::size_t order;
    std::uint64_t followers;
  };
  std::vector<Tagged> obs;
  obs.reserve(events.size() * 2);
  std::size_t order = 0;
  for (const auto& e : events) {
    obs.push_back({e.retweetee, e.timestamp, order++, e.retweetee_followers});
    obs.push_back({e.retweeter, e.timestamp, order++, e.retweeter_followers});
  }
  std::sort(obs.begin(), obs.end(), [](const Tagged& a, const Tagged& b) {
    if (a.user != b.user) return a.user < b.user;
    if (a.time != b.time) return a.time < b.time;
    return a.order < b.order;
  });

  FollowerLogs logs;
  for (std::size_t i = 0; i < obs.size();) {
    FollowerLog log{obs[i].user, {}};
    std::size_t j = i;
    for (; j < obs.size() && obs[j].user == obs[i].user; ++j) {
      if (!log.observations.empty() && log.observations.back().time == obs[j].time) {
        log.observations.back().followers = obs[j].followers;
      } else {
        log.observations.push_back({obs[j].time, obs[j].followers});
      }
    }
    logs.emplace_hint(logs.end(), log.user, std::move(log));
    i = j;
  }
  return logs;
}

std::map<UserId, UserFlagRates> user_flag_rates(std::span<const RetweetEvent> events) {
  struct Tally {
    std::size_t n = 0;
    std::size_t bot = 0;
    std::size_t verified = 0;
  };
  std::map<UserId, Tally> tallies;
  for (const auto& e : events) {
    auto& src = tallies[e.retweetee];
    ++src.n;
    src.bot += e.retweetee_bot;
    src.verified += e.retweetee_verified;
    auto& dst = tallies[e.retweeter];
    ++dst.n;
    dst.bot += e.retweeter_bot;
    dst.verified += e.retweeter_verified;
  }
  std::map<UserId, UserFlagRates> rates;
  for (const auto& [user, t] : tallies) {
    const double n = static_cast<double>(t.n);
    rates.emplace_hint(rates.end(), user,
                       UserFlagRates{user, static_cast<double>(t.bot) / n,
                                     static_cast<double>(t.verified) / n, t.n});
  }
  return rates;
}

void write_follower_logs_csv(std::ostream& out, const FollowerLogs& logs,
                             const UserTable& users) {
  CsvWriter csv(out);
  csv.header({"user", "timestamp", "followers"});
  for (const auto& [user, log] : logs) {
    for (const auto& o : log.observations) {
      csv.field(users.name(user)).field(o.time).field(o.followers).end_row();
    }
  }
}

void write_flag_rates_csv(std::ostream& out, const std::map<UserId, UserFlagRates>& rates,
                          const UserTable& users) {
  CsvWriter csv(out);
  csv.header({"user", "bot_rate", "verification_rate", "n_observations"});
  for (const auto& [user, r] : rates) {
    csv.field(users.name(user))
        .field(r.bot_rate)
        .field(r.verification_rate)
        .field(static_cast<std::uint64_t>(r.n_observations))
        .end_row();
  }
}

}  // namespace rtnet
