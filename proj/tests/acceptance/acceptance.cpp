// One line per acceptance criterion; exits non-zero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rtnet/alignment.hpp"
#include "rtnet/backbone.hpp"
#include "rtnet/fit.hpp"
#include "rtnet/follower_dynamics.hpp"
#include "rtnet/pipeline.hpp"
#include "unit/helpers.hpp"

using namespace rtnet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

// ------------------------------------------------------------ disparity

std::set<std::pair<UserId, UserId>> edge_pairs(const WeightedDigraph& g) {
  std::set<std::pair<UserId, UserId>> out;
  for (const auto& e : g.edge_list()) out.insert({e.source, e.sink});
  return out;
}

Outcome disparity_oracle() {
  const auto t0 = Clock::now();
  RandomStream rng(1001, {0, 0, 0});
  std::size_t mismatches = 0;
  std::size_t checks = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t n = 2 + rng.below(49);
    const std::size_t m = 1 + rng.below(200);
    std::vector<Edge> raw;
    for (std::size_t i = 0; i < m; ++i) raw.push_back({rng.below(n), rng.below(n), 1 + rng.below(100)});
    const auto g = WeightedDigraph::from_edges(raw);
    for (double level : {0.01, 0.05, 0.1, 0.37, 0.5}) {
      ++checks;
      if (edge_pairs(disparity_filter(g, level)) != oracle::brute_force_disparity(raw, level)) {
        ++mismatches;
      }
    }
  }
  const double t = seconds_since(t0);
  return {mismatches == 0 && t < 10.0,
          fmt("%.0f/%.0f filtered sets match, %.2f s (limit 10 s)", double(checks - mismatches),
              double(checks), t)};
}

Outcome cutoff() {
  const auto g = oracle::circulant(41, 20);
  const double cut = std::pow(1.0 - 1.0 / 20.0, 19.0);
  std::vector<double> below;
  std::vector<double> above;
  for (int i = 1; i <= 36; ++i) below.push_back(0.01 * i);
  for (double a = 0.3775; a <= 1.0; a += 0.0025) above.push_back(a);
  above.push_back(1.0);
  std::size_t bad = 0;
  for (const auto& s : backbone_size_curve(g, below)) bad += s.edges != 0;
  for (const auto& s : backbone_size_curve(g, above)) bad += s.edges != g.edge_count();
  return {bad == 0 && g.edge_count() == 41 * 20,
          fmt("cutoff %.6f; %.0f of %.0f grid points off (0 edges for alpha <= 0.36, all above)",
              cut, double(bad), double(below.size() + above.size()))};
}

Outcome quadrature() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::uint64_t k = 2; k <= 100; ++k) {
    for (int i = 1; i <= 99; ++i) {
      const double p = 0.01 * i;
      worst = std::max(worst, std::abs(edge_alpha(p, k) - oracle::alpha_by_quadrature(p, k)));
    }
  }
  const double t = seconds_since(t0);
  return {worst < 1e-10 && t < 5.0,
          fmt("max |closed form - quadrature| = %.3e (limit 1e-10), %.2f s (limit 5 s)", worst, t)};
}

Outcome null_moments() {
  const auto t0 = Clock::now();
  RandomStream rng(1004, {0, 0, 0});
  double worst = 0.0;
  for (std::uint64_t k : {2u, 3u, 5u, 10u, 50u}) {
    const auto est = oracle::stick_breaking_moments(k, 1000000, rng);
    const auto m = null_heterogeneity_moments(k);
    worst = std::max(worst, std::abs(est.mean - m.mean) / est.mean_se);
    worst = std::max(worst, std::abs(est.variance - m.variance) / est.variance_se);
  }
  const double t = seconds_since(t0);
  return {worst <= 3.0 && t < 60.0,
          fmt("max deviation %.2f SE (limit 3), %.2f s (limit 60 s)", worst, t)};
}

Outcome final_size_solver() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  bool exact = true;
  for (int si = 10; si <= 99; ++si) {
    const double s0 = 0.01 * si;
    for (int ri = 0; ri <= 20; ++ri) {
      const double r0 = 0.25 * ri;
      const double got = final_size(s0, r0);
      if (ri == 0) {
        exact = exact && got == 1.0 - s0;
        continue;
      }
      worst = std::max(worst, std::abs(got - oracle::final_size_bisection(s0, r0, 1.0 - s0)));
    }
  }
  const double classic = final_size(1.0 - 1e-12, 2.0);
  const double t = seconds_since(t0);
  return {worst < 1e-8 && exact && std::abs(classic - 0.7968) <= 5e-4 && t < 5.0,
          fmt("max |newton - bisection| = %.2e, R0=0 exact: %.0f, classic point %.6f, %.2f s", worst,
              exact ? 1.0 : 0.0, classic, t)};
}

// ------------------------------------------------------------------ fit

std::vector<double> followers(RandomStream& rng, std::size_t n, double mu) {
  std::vector<double> out(n);
  for (auto& f : out) f = std::floor(std::exp(mu + rng.normal()));
  return out;
}

TimeWindow window_of(std::uint32_t key) {
  return {static_cast<Timestamp>(key) * kWindowStep,
          static_cast<Timestamp>(key) * kWindowStep + kWindowLength, false};
}

// Empirical rates drawn from the model itself at (delta, r0).
WindowInput model_window(std::uint32_t key, double delta, double r0, std::uint64_t seed,
                         const std::array<double, kNumClasses>& swayable_mu) {
  RandomStream rng(seed, {key, 7, 0});
  WindowInput w;
  w.key = key;
  w.window = window_of(key);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const std::size_t na = 45 + rng.below(11);
    const std::size_t ns = 450 + rng.below(101);
    w.setups[c] = testing::cascade_setup(followers(rng, na, 5.0), followers(rng, ns, swayable_mu[c]),
                                         kAllClasses[c], key);
    w.empirical[c] = simulate_growth_rate(w.setups[c], r0, delta, rng);
  }
  return w;
}

struct Recovery {
  double delta = 0.0;
  double rel_error = 0.0;
  int covered = 0;
  std::size_t windows = 0;
};

Recovery recover(const std::vector<WindowInput>& windows, const std::vector<double>& planted,
                 double delta, FitMode mode) {
  FitConfig cfg;
  cfg.seed = 6;
  cfg.tolerance_pct = 0.10;
  cfg.mode = mode;
  const auto result = fit_parameters(windows, cfg);
  Recovery r;
  r.delta = result.delta;
  r.rel_error = std::abs(result.delta - delta) / delta;
  r.windows = result.windows.size();
  for (const auto& wf : result.windows) {
    if (std::abs(wf.r0_mean - planted[wf.key]) <= cfg.r0_step + 2.0 * wf.r0_sd) ++r.covered;
  }
  return r;
}

// Judged in the default (nested) mode; the single-pass result is reported
// alongside for context only.
Outcome fit_self_consistency() {
  const auto t0 = Clock::now();
  constexpr double kDelta = 0.05;
  const std::array<double, 4> teeth{0.6, 1.2, 1.8, 2.4};
  std::vector<WindowInput> windows;
  std::vector<double> planted;
  for (std::uint32_t k = 0; k < 12; ++k) {
    planted.push_back(teeth[k % teeth.size()]);
    windows.push_back(model_window(k, kDelta, planted.back(), 2006, {5.0, 5.5, 4.5}));
  }
  const auto nested = recover(windows, planted, kDelta, FitMode::kNested);
  const double t = seconds_since(t0);
  const auto single = recover(windows, planted, kDelta, FitMode::kSinglePass);
  const bool pass = nested.rel_error <= 0.15 && nested.covered >= 10 && nested.windows == 12 &&
                    t < 900.0;
  return {pass, fmt("nested: delta %.5f (rel. error %.1f%%, limit 15%%), R0 within step + 2 sd in "
                    "%.0f/12 windows (need 10), %.1f s",
                    nested.delta, 100.0 * nested.rel_error, double(nested.covered), t) +
                    fmt("; single-pass: delta %.5f (%.1f%%), %.0f/12 windows", single.delta,
                        100.0 * single.rel_error, double(single.covered))};
}

Outcome growth_ordering() {
  // Factual growth exceeds misleading in windows 0, 3, 6, 9 and trails it
  // elsewhere; the ordering comes from the swayable audiences' reach.
  std::vector<WindowInput> windows;
  std::vector<int> planted;
  for (std::uint32_t k = 0; k < 12; ++k) {
    const bool factual_up = k % 3 == 0;
    const std::array<double, kNumClasses> mu = factual_up ? std::array{6.0, 5.0, 5.0}
                                                          : std::array{5.0, 6.0, 5.0};
    planted.push_back(factual_up ? 1 : -1);
    windows.push_back(model_window(k, 0.05, 1.0 + 0.1 * k, 2007, mu));
  }
  int empirical_agree = 0;
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const double d = *windows[k].empirical[0] - *windows[k].empirical[1];
    empirical_agree += (d > 0) == (planted[k] > 0);
  }
  FitConfig cfg;
  cfg.seed = 7;
  const auto result = fit_parameters(windows, cfg);
  int reproduced = 0;
  for (const auto& wf : result.windows) {
    const double d = wf.classes[0].simulated_mean - wf.classes[1].simulated_mean;
    reproduced += (d > 0) == (planted[wf.key] > 0);
  }
  const double share = static_cast<double>(reproduced) / 12.0;
  return {share >= 0.9 && result.windows.size() == 12,
          fmt("sign reproduced in %.0f/12 windows (%.0f%%, limit 90%%); empirical data carry it in "
              "%.0f/12",
              double(reproduced), 100.0 * share, double(empirical_agree))};
}

// ------------------------------------------------------------ fixtures

Outcome windowing_fixtures() {
  constexpr Timestamp kDay = kSecondsPerDay;
  FollowerLogs logs;
  logs[1] = FollowerLog{1, {{1 * kDay, 100}, {10 * kDay, 110}, {20 * kDay, 121}, {40 * kDay, 130}}};
  logs[2] = FollowerLog{2, {{5 * kDay, 200}, {25 * kDay, 180}, {35 * kDay, 190}}};
  logs[3] = FollowerLog{3, {{16 * kDay, 50}, {44 * kDay, 60}}};
  const auto windows = sliding_windows({0, 45 * kDay});
  const std::vector<UserId> users{1, 2, 3};
  bool exact = windows.size() == 2;
  if (exact) {
    const auto a = window_growth_rate(logs, users, windows[0], ContentClass::kFactual);
    const auto b = window_growth_rate(logs, users, windows[1], ContentClass::kFactual);
    exact = a.rate && b.rate && *a.rate == 1.0 / 300.0 && *b.rate == 29.0 / 351.0;
  }
  std::vector<double> x(40);
  std::vector<double> y(40);
  for (std::size_t i = 0; i < 40; ++i) {
    x[i] = static_cast<double>(i);
    y[i] = std::sin(0.3 * x[i]) + 0.05 * x[i];
  }
  const auto got = trend_line(x, y);
  const auto want = oracle::trend_reference(x, y, 10, 5);
  double worst = 0.0;
  for (std::size_t i = 0; i < 40; ++i) worst = std::max(worst, std::abs(got.values[i] - want[i]));
  return {exact && got.polynomial && worst < 1e-6,
          fmt("growth fixture exact: %.0f, max |trend - reference| = %.2e (limit 1e-6)",
              exact ? 1.0 : 0.0, worst)};
}

Outcome alignment_properties() {
  using testing::event;
  // Nesting over random involvement profiles.
  RandomStream rng(1009, {0, 0, 0});
  std::vector<InvolvementProfile> profiles;
  for (UserId u = 0; u < 2000; ++u) {
    InvolvementProfile p;
    p.user = u;
    p.counts = {rng.below(4), rng.below(4), rng.below(4)};
    p.counts[rng.below(3)] += rng.below(80);
    if (p.counts[0] + p.counts[1] + p.counts[2] == 0) p.counts[0] = 1;
    profiles.push_back(p);
  }
  bool nests = true;
  const std::vector<double> thetas{0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98, 0.99};
  for (std::size_t i = 1; i < thetas.size(); ++i) {
    const auto loose = align_users(profiles, thetas[i - 1]);
    for (const auto& [user, cls] : align_users(profiles, thetas[i])) {
      nests = nests && loose.count(user) && loose.at(user) == cls;
    }
  }

  // Coverage against an event-by-event recount on five users.
  constexpr auto F = ContentClass::kFactual;
  constexpr auto M = ContentClass::kMisleading;
  std::vector<RetweetEvent> ev;
  const auto add = [&](int times, UserId a, UserId b, ContentClass c) {
    for (int i = 0; i < times; ++i) ev.push_back(event(i, a, b, c));
  };
  add(12, 1, 2, F);
  add(3, 2, 3, F);
  add(1, 3, 2, M);
  add(6, 4, 5, M);
  add(2, 5, 1, F);
  add(1, 4, 1, ContentClass::kUncertain);
  add(4, 3, 4, F);
  add(1, 5, 5, M);
  const auto graphs = build_class_graphs(ev);
  const auto five = involvement_profiles(graphs);
  const std::vector<double> grid{0.5, 0.6, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 0.99};
  bool coverage = true;
  for (auto c : {F, M}) {
    std::map<UserId, std::array<double, 3>> counts;
    for (const auto& e : ev) {
      counts[e.retweetee][index_of(e.content_class)] += 1;
      counts[e.retweeter][index_of(e.content_class)] += 1;
    }
    const auto share = [&](UserId u) {
      const auto& x = counts[u];
      return x[index_of(c)] / (x[0] + x[1] + x[2]);
    };
    std::vector<double> want;
    for (double theta : grid) {
      double hit = 0;
      double all = 0;
      for (const auto& e : ev) {
        if (e.content_class != c) continue;
        all += 1;
        if (share(e.retweetee) > theta || share(e.retweeter) > theta) hit += 1;
      }
      want.push_back(hit / all);
    }
    coverage = coverage && coverage_curve(graphs[index_of(c)], five, c, grid) == want;
  }

  InvolvementProfile edge_case;
  edge_case.user = 1;
  edge_case.counts = {19, 0, 1};
  const bool strict = !classify_alignment(edge_case, 0.95).label.has_value();
  return {nests && coverage && strict,
          fmt("nesting: %.0f, coverage recount exact: %.0f, 19/20 at 0.95 unaligned: %.0f",
              nests ? 1.0 : 0.0, coverage ? 1.0 : 0.0, strict ? 1.0 : 0.0)};
}

// --------------------------------------------------------- determinism

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      out[fs::relative(entry.path(), dir).string()] = testing::read_file(entry.path());
    }
  }
  return out;
}

double run_pipeline(const fs::path& dir, unsigned threads) {
  PipelineConfig c;
  c.out_dir = dir;
  c.seed = 2024;
  c.threads = threads;
  c.synth_events = 1000000;
  const auto t0 = Clock::now();
  for (const char* stage : {"synth", "backbone", "diagnose", "align", "growth", "simulate", "report"}) {
    run_stage(stage, c);
  }
  return seconds_since(t0);
}

Outcome determinism_and_scale() {
  const auto a = testing::scratch_dir("acceptance_pipeline_a");
  const auto b = testing::scratch_dir("acceptance_pipeline_b");
  const double ta = run_pipeline(a, 1);
  const double tb = run_pipeline(b, 4);
  const auto sa = snapshot(a);
  const auto sb = snapshot(b);
  std::size_t differing = 0;
  for (const auto& [name, bytes] : sa) {
    const auto it = sb.find(name);
    differing += it == sb.end() || it->second != bytes;
  }
  differing += sb.size() > sa.size() ? sb.size() - sa.size() : 0;
  const bool report = sa.count("report/fig1a_creator_consumer.csv") && sa.count("growth.csv");
  return {ta < 60.0 && differing == 0 && report && !sa.empty(),
          fmt("1M events: %.1f s on 1 thread (limit 60 s), %.1f s on 4; %.0f files, %.0f differ",
              ta, tb, double(sa.size()), double(differing))};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"disparity filter matches brute force", disparity_oracle},
      {"k-regular cutoff", cutoff},
      {"closed form matches quadrature", quadrature},
      {"null heterogeneity moments", null_moments},
      {"final-size solver", final_size_solver},
      {"fit self-consistency", fit_self_consistency},
      {"growth-rate ordering", growth_ordering},
      {"windowing fixtures", windowing_fixtures},
      {"alignment nesting and coverage", alignment_properties},
      {"determinism and scale", determinism_and_scale},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
