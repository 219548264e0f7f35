#include "rtnet/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <stdexcept>

namespace rtnet {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_bool(const std::string& text, bool& out) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") {
    out = true;
    return true;
  }
  if (text == "false" || text == "0" || text == "no" || text == "off") {
    out = false;
    return true;
  }
  return false;
}

// Returns false when the text does not parse.
using Setter = std::function<bool(PipelineConfig&, const std::string&)>;

template <typename T, typename Ref>
Setter number(Ref ref) {
  return [ref](PipelineConfig& c, const std::string& v) {
    T value{};
    if (!parse_number(v, value)) return false;
    ref(c) = value;
    return true;
  };
}

Setter timestamp(std::optional<Timestamp> PipelineConfig::*member) {
  return [member](PipelineConfig& c, const std::string& v) {
    const auto t = parse_timestamp(v);
    if (!t) return false;
    c.*member = *t;
    return true;
  };
}

Setter flag(bool PipelineConfig::*member) {
  return [member](PipelineConfig& c, const std::string& v) { return parse_bool(v, c.*member); };
}

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"input", [](PipelineConfig& c, const std::string& v) {
         c.input = v;
         return !v.empty();
       }},
      {"out", [](PipelineConfig& c, const std::string& v) {
         c.out_dir = v;
         return !v.empty();
       }},
      {"seed", number<std::uint64_t>([](PipelineConfig& c) -> auto& { return c.seed; })},
      {"threads", number<unsigned>([](PipelineConfig& c) -> auto& { return c.threads; })},
      {"range-start", timestamp(&PipelineConfig::range_start)},
      {"range-end", timestamp(&PipelineConfig::range_end)},
      {"alpha", number<double>([](PipelineConfig& c) -> auto& { return c.alpha; })},
      {"band", number<double>([](PipelineConfig& c) -> auto& { return c.band; })},
      {"tail-lo", number<double>([](PipelineConfig& c) -> auto& { return c.tail_lo; })},
      {"tail-hi", number<double>([](PipelineConfig& c) -> auto& { return c.tail_hi; })},
      {"theta", number<double>([](PipelineConfig& c) -> auto& { return c.theta; })},
      {"min-involvement",
       number<std::uint64_t>([](PipelineConfig& c) -> auto& { return c.min_involvement; })},
      {"use-backbone", flag(&PipelineConfig::use_backbone)},
      {"ternary-bins", number<int>([](PipelineConfig& c) -> auto& { return c.ternary_bins; })},
      {"window-days", number<int>([](PipelineConfig& c) -> auto& { return c.window_days; })},
      {"step-days", number<int>([](PipelineConfig& c) -> auto& { return c.step_days; })},
      {"partial-windows", flag(&PipelineConfig::partial_windows)},
      {"min-obs", number<std::size_t>([](PipelineConfig& c) -> auto& { return c.min_obs; })},
      {"n", number<int>([](PipelineConfig& c) -> auto& { return c.fit.lookback_months; })},
      {"r0-min", number<double>([](PipelineConfig& c) -> auto& { return c.fit.r0_min; })},
      {"r0-max", number<double>([](PipelineConfig& c) -> auto& { return c.fit.r0_max; })},
      {"r0-step", number<double>([](PipelineConfig& c) -> auto& { return c.fit.r0_step; })},
      {"runs", number<std::size_t>([](PipelineConfig& c) -> auto& { return c.fit.runs_per_point; })},
      {"tolerance", number<double>([](PipelineConfig& c) -> auto& { return c.fit.tolerance_pct; })},
      {"fit-mode", [](PipelineConfig& c, const std::string& v) {
         try {
           c.fit.mode = parse_fit_mode(v);
         } catch (const std::exception&) {
           return false;
         }
         return true;
       }},
      {"delta-tol", number<double>([](PipelineConfig& c) -> auto& { return c.fit.delta_tolerance; })},
      {"delta-scan",
       number<std::size_t>([](PipelineConfig& c) -> auto& { return c.fit.delta_scan_points; })},
      {"max-iter", number<std::size_t>([](PipelineConfig& c) -> auto& { return c.fit.max_iterations; })},
      {"r0", number<double>([](PipelineConfig& c) -> auto& { return c.sim_r0; })},
      {"delta", number<double>([](PipelineConfig& c) -> auto& { return c.sim_delta; })},
      {"events", number<std::uint64_t>([](PipelineConfig& c) -> auto& { return c.synth_events; })},
      {"synth-jsonl", flag(&PipelineConfig::synth_jsonl)},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [key, setter] : setters()) out.push_back(key);
    return out;
  }();
  return keys;
}

std::optional<ConfigViolation> set_config_value(PipelineConfig& config, const std::string& key,
                                                const std::string& value) {
  const auto& table = setters();
  auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
  if (it == table.end()) return ConfigViolation{key, "unknown key"};
  if (!it->second(config, trim(value))) {
    return ConfigViolation{key, "cannot parse value '" + value + "'"};
  }
  return std::nullopt;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path,
                                                    std::vector<ConfigViolation>& violations) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      violations.push_back({path.filename().string() + ":" + std::to_string(number),
                            "expected key = value"});
      continue;
    }
    values[trim(std::string_view(body).substr(0, eq))] = trim(std::string_view(body).substr(eq + 1));
  }
  return values;
}

std::vector<ConfigViolation> validate_config(const PipelineConfig& c) {
  std::vector<ConfigViolation> v;
  const auto check = [&](bool ok, const char* key, const char* message) {
    if (!ok) v.push_back({key, message});
  };
  check(c.threads >= 1, "threads", "must be at least 1");
  if (c.range_start && c.range_end) {
    check(*c.range_start < *c.range_end, "range-end", "must be after range-start");
  }
  check(c.alpha > 0.0 && c.alpha <= 1.0, "alpha", "must be in (0, 1]");
  check(c.band > 0.0, "band", "must be positive");
  if (c.tail_lo || c.tail_hi) {
    check(c.tail_lo && c.tail_hi, "tail-lo", "tail-lo and tail-hi must be given together");
    if (c.tail_lo && c.tail_hi) {
      check(*c.tail_lo > 0.0 && *c.tail_hi > *c.tail_lo, "tail-hi", "need 0 < tail-lo < tail-hi");
    }
  }
  check(c.theta >= 0.5 && c.theta < 1.0, "theta", "must be in [0.5, 1)");
  check(c.ternary_bins >= 1, "ternary-bins", "must be at least 1");
  check(c.window_days >= 1, "window-days", "must be at least 1");
  check(c.step_days >= 1, "step-days", "must be at least 1");
  check(c.step_days <= c.window_days, "step-days", "window step exceeds length");
  check(c.min_obs >= 2, "min-obs", "must be at least 2");
  check(c.fit.lookback_months >= 1, "n", "lookback must be at least 1 month");
  check(c.fit.r0_min >= 0.0, "r0-min", "must be non-negative");
  check(c.fit.r0_step > 0.0, "r0-step", "must be positive");
  check(c.fit.r0_max >= c.fit.r0_min, "r0-max", "must not be below r0-min");
  check(c.fit.runs_per_point >= 1, "runs", "must be at least 1");
  check(c.fit.tolerance_pct > 0.0 && c.fit.tolerance_pct <= 1.0, "tolerance", "must be in (0, 1]");
  check(c.fit.delta_tolerance > 0.0, "delta-tol", "must be positive");
  check(c.fit.delta_scan_points >= 2, "delta-scan", "must be at least 2");
  check(c.fit.max_iterations >= 1, "max-iter", "must be at least 1");
  check(c.sim_r0 >= 0.0, "r0", "must be non-negative");
  check(c.sim_delta >= 0.0 && c.sim_delta <= 1.0, "delta", "must be in [0, 1]");
  check(c.synth_events >= 1, "events", "must be at least 1");
  return v;
}

}  // namespace rtnet
