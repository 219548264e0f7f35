#include "rtnet/fit.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "rtnet/nelder_mead.hpp"
#include "rtnet/parallel.hpp"

namespace rtnet {

std::string_view to_string(FitMode mode) {
  return mode == FitMode::kNested ? "nested" : "single-pass";
}

FitMode parse_fit_mode(std::string_view text) {
  if (text == "nested") return FitMode::kNested;
  if (text == "single-pass") return FitMode::kSinglePass;
  throw std::invalid_argument("unknown fit mode '" + std::string(text) + "'");
}

std::vector<double> FitConfig::r0_grid() const {
  if (!(r0_step > 0.0) || !(r0_max >= r0_min)) throw std::invalid_argument("invalid R0 grid");
  const double span = (r0_max - r0_min) / r0_step;
  auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = r0_min + static_cast<double>(i) * r0_step;
  return grid;
}

std::size_t FitConfig::accepted_per_window() const {
  const double total = static_cast<double>(r0_grid().size() * runs_per_point);
  const double exact = tolerance_pct * total;
  // Guard against 0.1 * 10100 = 1010.0000000000001 rounding up.
  const double nearest = std::round(exact);
  const double k = std::abs(exact - nearest) < 1e-9 * std::max(1.0, total) ? nearest
                                                                           : std::ceil(exact);
  return std::clamp<std::size_t>(static_cast<std::size_t>(k), 1,
                                 static_cast<std::size_t>(total));
}

void validate_fit_config(const FitConfig& c) {
  const auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (!(c.r0_min >= 0.0)) fail("r0_min must be >= 0");
  if (!(c.r0_step > 0.0)) fail("r0_step must be positive");
  if (!(c.r0_max >= c.r0_min)) fail("r0_max must be >= r0_min");
  if (c.runs_per_point == 0) fail("runs_per_point must be positive");
  if (!(c.tolerance_pct > 0.0 && c.tolerance_pct <= 1.0)) fail("tolerance must be in (0, 1]");
  if (c.lookback_months < 1) fail("lookback must be >= 1 month");
  if (!(c.delta_tolerance > 0.0)) fail("delta_tolerance must be positive");
  if (c.max_iterations == 0) fail("max_iterations must be positive");
  if (c.delta_scan_points < 2) fail("delta_scan_points must be >= 2");
}

std::string exclusion_reason(const WindowInput& window) {
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const std::string name(to_string(kAllClasses[c]));
    const auto& s = window.setups[c];
    if (s.aligned.empty()) return "no " + name + " aligned user reaches a swayable user";
    if (!(s.aligned_follower_total() > 0.0)) return name + " aligned follower total is zero";
    if (!window.empirical[c]) return name + " empirical growth rate undefined";
  }
  return {};
}

RandomStream draw_stream(std::uint64_t seed, std::uint32_t window_key, std::size_t class_index,
                         std::size_t grid_index, std::size_t replicate) {
  return RandomStream(seed, {window_key, static_cast<std::uint32_t>(grid_index),
                             static_cast<std::uint32_t>(replicate * kNumClasses + class_index)});
}

SimulationTable::SimulationTable(std::span<const WindowInput> windows, const FitConfig& config)
    : grid_(config.r0_grid()),
      runs_(config.runs_per_point),
      accepted_(config.accepted_per_window()) {
  validate_fit_config(config);
  for (const auto& w : windows) {
    const auto reason = exclusion_reason(w);
    if (!reason.empty()) throw std::invalid_argument("window " + std::to_string(w.key) + ": " + reason);
    windows_.push_back(&w);
  }
  std::sort(windows_.begin(), windows_.end(),
            [](const WindowInput* a, const WindowInput* b) { return a->key < b->key; });
  for (std::size_t i = 1; i < windows_.size(); ++i) {
    if (windows_[i]->key == windows_[i - 1]->key) throw std::invalid_argument("duplicate window key");
  }

  const std::size_t g_count = grid_.size();
  ratios_.assign(windows_.size() * g_count * runs_ * kNumClasses, 0.0);
  const std::size_t tasks = windows_.size() * kNumClasses * g_count;
  parallel_for(tasks, config.threads, [&](std::size_t task) {
    const std::size_t g = task % g_count;
    const std::size_t c = (task / g_count) % kNumClasses;
    const std::size_t w = task / (g_count * kNumClasses);
    const auto& setup = windows_[w]->setups[c];
    const auto init = initial_state(setup);
    const double r_inf = final_size(init.s0, grid_[g]);
    const auto count =
        swayable_recovered_count(setup.population(), r_inf, init.i0, setup.swayable.size());
    const double aligned_total = setup.aligned_follower_total();
    const double swayable_total = setup.swayable_follower_total();
    SwayableSampler sampler(setup.swayable.size());
    for (std::size_t r = 0; r < runs_; ++r) {
      auto rng = draw_stream(config.seed, windows_[w]->key, c, g, r);
      const double sampled = sampler.sample_sum(setup.swayable_followers, swayable_total, count, rng);
      ratios_[((w * g_count + g) * runs_ + r) * kNumClasses + c] = sampled / aligned_total;
    }
  });
}

double SimulationTable::loss(std::size_t w, std::size_t draw, double delta) const {
  const auto& emp = windows_[w]->empirical;
  const std::size_t g = draw / runs_;
  const std::size_t r = draw % runs_;
  double q = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double d = delta * ratio(w, g, r, c) - *emp[c];
    q += d * d;
  }
  return q;
}

std::vector<std::size_t> SimulationTable::accept(std::size_t w, double delta) const {
  const std::size_t total = grid_.size() * runs_;
  std::vector<std::pair<double, std::size_t>> scored(total);
  for (std::size_t d = 0; d < total; ++d) scored[d] = {loss(w, d, delta), d};
  const auto mid = scored.begin() + static_cast<std::ptrdiff_t>(accepted_);
  if (accepted_ < total) std::nth_element(scored.begin(), mid, scored.end());
  std::sort(scored.begin(), mid);
  std::vector<std::size_t> ids(accepted_);
  for (std::size_t i = 0; i < accepted_; ++i) ids[i] = scored[i].second;
  return ids;
}

double SimulationTable::mean_loss(std::size_t w, std::span<const std::size_t> draws,
                                  double delta) const {
  double sum = 0.0;
  for (std::size_t d : draws) sum += loss(w, d, delta);
  return sum / static_cast<double>(draws.size());
}

double SimulationTable::objective(double delta) const {
  double total = 0.0;
  for (std::size_t w = 0; w < windows_.size(); ++w) total += mean_loss(w, accept(w, delta), delta);
  return total;
}

namespace {

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

template <typename Get>
MeanSd mean_sd(std::size_t n, Get&& get) {
  MeanSd out;
  if (n == 0) return out;
  for (std::size_t i = 0; i < n; ++i) out.mean += get(i);
  out.mean /= static_cast<double>(n);
  if (n < 2) return out;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = get(i) - out.mean;
    ss += d * d;
  }
  out.sd = std::sqrt(ss / static_cast<double>(n - 1));
  return out;
}

}  // namespace

WindowFit SimulationTable::summarize(std::size_t w, double delta) const {
  const auto ids = accept(w, delta);
  WindowFit fit;
  fit.key = windows_[w]->key;
  fit.window = windows_[w]->window;
  fit.accepted.reserve(ids.size());
  for (std::size_t d : ids) {
    AcceptedDraw draw;
    draw.grid_index = d / runs_;
    draw.replicate = static_cast<std::uint32_t>(d % runs_);
    draw.r0 = grid_[draw.grid_index];
    draw.loss = loss(w, d, delta);
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      draw.rates[c] = delta * ratio(w, draw.grid_index, draw.replicate, c);
    }
    fit.accepted.push_back(draw);
  }
  fit.mean_loss = mean_loss(w, ids, delta);
  const auto r0 = mean_sd(fit.accepted.size(), [&](std::size_t i) { return fit.accepted[i].r0; });
  fit.r0_mean = r0.mean;
  fit.r0_sd = r0.sd;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto rate =
        mean_sd(fit.accepted.size(), [&](std::size_t i) { return fit.accepted[i].rates[c]; });
    fit.classes[c] = {*windows_[w]->empirical[c], rate.mean, rate.sd};
  }
  return fit;
}

FitResult fit_parameters(std::span<const WindowInput> windows, const FitConfig& config) {
  validate_fit_config(config);
  FitResult result;
  result.config = config;
  std::vector<WindowInput> usable;
  for (const auto& w : windows) {
    auto reason = exclusion_reason(w);
    if (reason.empty()) {
      usable.push_back(w);
    } else {
      result.excluded.push_back({w.key, w.window, std::move(reason)});
    }
  }
  std::sort(result.excluded.begin(), result.excluded.end(),
            [](const ExcludedWindow& a, const ExcludedWindow& b) { return a.key < b.key; });
  if (usable.empty()) throw std::invalid_argument("no simulable window to fit");

  const SimulationTable table(usable, config);

  // Coarse scan seeds the simplex next to the best delta.
  const std::size_t points = config.delta_scan_points;
  const double h = 1.0 / static_cast<double>(points - 1);
  double best_delta = 0.0;
  double best_value = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double d = static_cast<double>(i) * h;
    const double v = table.objective(d);
    ++result.evaluations;
    if (i == 0 || v < best_value) {
      best_delta = d;
      best_value = v;
    }
  }
  const double partner = best_delta + h <= 1.0 ? best_delta + h : best_delta - h;

  NelderMeadResult nm;
  if (config.mode == FitMode::kNested) {
    nm = nelder_mead_1d([&](double d) { return table.objective(d); }, best_delta, partner, 0.0,
                        1.0, config.delta_tolerance, config.max_iterations);
  } else {
    std::vector<std::vector<std::size_t>> fixed(table.window_count());
    for (std::size_t w = 0; w < fixed.size(); ++w) fixed[w] = table.accept(w, best_delta);
    const auto fixed_objective = [&](double d) {
      double total = 0.0;
      for (std::size_t w = 0; w < fixed.size(); ++w) total += table.mean_loss(w, fixed[w], d);
      return total;
    };
    nm = nelder_mead_1d(fixed_objective, best_delta, partner, 0.0, 1.0, config.delta_tolerance,
                        config.max_iterations);
  }
  result.evaluations += nm.evaluations;
  result.converged = nm.converged;
  result.delta = nm.x;
  result.objective = table.objective(result.delta);
  for (std::size_t w = 0; w < table.window_count(); ++w) {
    result.windows.push_back(table.summarize(w, result.delta));
  }
  return result;
}

void write_fit_json(std::ostream& out, const FitResult& result) {
  using nlohmann::ordered_json;
  const auto& cfg = result.config;
  ordered_json doc;
  doc["delta"] = result.delta;
  doc["objective"] = result.objective;
  doc["evaluations"] = result.evaluations;
  doc["converged"] = result.converged;
  doc["config"] = {{"r0_min", cfg.r0_min},
                   {"r0_max", cfg.r0_max},
                   {"r0_step", cfg.r0_step},
                   {"runs_per_point", cfg.runs_per_point},
                   {"tolerance", cfg.tolerance_pct},
                   {"lookback_months", cfg.lookback_months},
                   {"seed", cfg.seed},
                   {"mode", std::string(to_string(cfg.mode))},
                   {"delta_tolerance", cfg.delta_tolerance}};
  ordered_json windows = ordered_json::array();
  for (const auto& w : result.windows) {
    ordered_json jw;
    jw["key"] = w.key;
    jw["start"] = format_date(w.window.start);
    jw["end"] = format_date(w.window.end);
    jw["mean_loss"] = w.mean_loss;
    jw["r0_mean"] = w.r0_mean;
    jw["r0_sd"] = w.r0_sd;
    ordered_json classes = ordered_json::object();
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      classes[std::string(to_string(kAllClasses[c]))] = {
          {"empirical", w.classes[c].empirical},
          {"simulated_mean", w.classes[c].simulated_mean},
          {"simulated_sd", w.classes[c].simulated_sd}};
    }
    jw["classes"] = std::move(classes);
    ordered_json r0s = ordered_json::array();
    ordered_json losses = ordered_json::array();
    for (const auto& a : w.accepted) {
      r0s.push_back(a.r0);
      losses.push_back(a.loss);
    }
    jw["accepted_r0"] = std::move(r0s);
    jw["accepted_loss"] = std::move(losses);
    windows.push_back(std::move(jw));
  }
  doc["windows"] = std::move(windows);
  ordered_json excluded = ordered_json::array();
  for (const auto& e : result.excluded) {
    excluded.push_back({{"key", e.key},
                        {"start", format_date(e.window.start)},
                        {"end", format_date(e.window.end)},
                        {"reason", e.reason}});
  }
  doc["excluded"] = std::move(excluded);
  out << doc.dump(2) << '\n';
}

}  // namespace rtnet
