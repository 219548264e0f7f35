#include "rtnet/sir.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rtnet {

WeightedDigraph temporal_network(std::span<const RetweetEvent> events, const TimeWindow& window,
                                 int lookback_months, ContentClass content_class) {
  if (lookback_months < 1) throw std::invalid_argument("lookback must be >= 1 month");
  const TimeRange range{window.start - lookback_months * kWindowLength, window.start};
  return build_network(events, range, content_class);
}

CascadePopulations cascade_populations(const WeightedDigraph& g, const AlignmentIndex& alignment,
                                       ContentClass content_class) {
  using Index = WeightedDigraph::Index;
  const std::size_t n = g.node_count();
  std::vector<char> aligned_any(n, 0);
  std::vector<Index> seeds;
  for (Index v = 0; v < n; ++v) {
    auto it = alignment.find(g.node(v));
    if (it == alignment.end()) continue;
    aligned_any[v] = 1;
    if (it->second == content_class) seeds.push_back(v);
  }

  CascadePopulations pops;
  const auto reached = reachable_mask(g, seeds);
  std::vector<Index> swayable;
  for (Index v = 0; v < n; ++v) {
    if (reached[v] && !aligned_any[v]) {
      swayable.push_back(v);
      pops.swayable.push_back(g.node(v));
    }
  }
  // Aligned seeds that can reach some swayable node: reverse search from V_sw.
  const auto reaches_swayable = reachable_mask(g, swayable, /*reverse=*/true);
  for (Index v : seeds) {
    if (reaches_swayable[v]) pops.aligned.push_back(g.node(v));
  }
  return pops;
}

FollowerSnapshot follower_snapshot(const FollowerLogs& logs, UserId user, Timestamp cutoff) {
  auto it = logs.find(user);
  if (it == logs.end() || it->second.observations.empty()) return {0.0, true};
  const auto& obs = it->second.observations;
  auto after = std::lower_bound(obs.begin(), obs.end(), cutoff,
                                [](const FollowerObservation& o, Timestamp t) { return o.time < t; });
  if (after == obs.begin()) return {static_cast<double>(obs.front().followers), true};
  return {static_cast<double>(std::prev(after)->followers), false};
}

double CascadeSetup::aligned_follower_total() const {
  return std::accumulate(aligned_followers.begin(), aligned_followers.end(), 0.0);
}

double CascadeSetup::swayable_follower_total() const {
  return std::accumulate(swayable_followers.begin(), swayable_followers.end(), 0.0);
}

CascadeSetup build_cascade_setup(std::span<const RetweetEvent> events, const FollowerLogs& logs,
                                 const AlignmentIndex& alignment, const TimeWindow& window,
                                 int lookback_months, ContentClass content_class,
                                 std::uint32_t window_key) {
  const auto g = temporal_network(events, window, lookback_months, content_class);
  auto pops = cascade_populations(g, alignment, content_class);

  CascadeSetup setup;
  setup.window_key = window_key;
  setup.window = window;
  setup.lookback_months = lookback_months;
  setup.content_class = content_class;
  const auto snapshot_into = [&](const std::vector<UserId>& users, std::vector<double>& out) {
    out.reserve(users.size());
    for (UserId u : users) {
      const auto snap = follower_snapshot(logs, u, window.start);
      out.push_back(snap.followers);
      setup.fallback_snapshots += snap.fallback;
    }
  };
  snapshot_into(pops.aligned, setup.aligned_followers);
  snapshot_into(pops.swayable, setup.swayable_followers);
  setup.aligned = std::move(pops.aligned);
  setup.swayable = std::move(pops.swayable);
  return setup;
}

SirInit initial_state(const CascadeSetup& setup) {
  const auto n = static_cast<double>(setup.population());
  if (n == 0.0) throw std::invalid_argument("cascade population is empty");
  return {static_cast<double>(setup.swayable.size()) / n,
          static_cast<double>(setup.aligned.size()) / n, 0.0};
}

namespace {

constexpr double kResidualTolerance = 1e-12;

double residual(double r, double s0, double r0) { return 1.0 - r - s0 * std::exp(-r0 * r); }

}  // namespace

double final_size(double s0, double r0) {
  if (!(s0 >= 0.0 && s0 <= 1.0)) throw std::invalid_argument("S0 must be in [0, 1]");
  if (!(r0 >= 0.0) || !std::isfinite(r0)) throw std::invalid_argument("R0 must be >= 0");
  const double i0 = 1.0 - s0;
  if (r0 == 0.0) return i0;
  if (s0 == 0.0) return 1.0;
  // Fully susceptible start without super-critical spread: only the trivial root.
  if (i0 == 0.0 && r0 <= 1.0) return 0.0;

  double r = i0 + 0.5 * s0 * std::min(r0, 1.0);
  bool newton_ok = false;
  for (int iter = 0; iter < 100; ++iter) {
    const double f = residual(r, s0, r0);
    if (std::abs(f) < 1e-15) {
      newton_ok = true;
      break;
    }
    const double df = -1.0 + s0 * r0 * std::exp(-r0 * r);
    if (df == 0.0 || !std::isfinite(df)) break;
    const double next = r - f / df;
    // Left the admissible interval; bisection takes over.
    if (!(next > 0.0 && next <= 1.0)) break;
    if (std::abs(next - r) < 1e-16) {
      r = next;
      newton_ok = true;
      break;
    }
    r = next;
  }
  if (newton_ok && r > i0 && std::abs(residual(r, s0, r0)) < kResidualTolerance) return r;

  // Bisection on [I0 + eps, 1]: residual is >= 0 at the left end (strictly
  // for I0 > 0) and <= 0 at R = 1.
  double lo = i0 > 0.0 ? i0 : 1e-9;
  double hi = 1.0;
  if (residual(lo, s0, r0) < 0.0 || residual(hi, s0, r0) > 0.0) {
    throw FinalSizeError("final-size root not bracketed for S0=" + std::to_string(s0) +
                         " R0=" + std::to_string(r0));
  }
  for (int iter = 0; iter < 200 && hi - lo > 0.0; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (residual(mid, s0, r0) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double root = std::abs(residual(lo, s0, r0)) < std::abs(residual(hi, s0, r0)) ? lo : hi;
  if (std::abs(residual(root, s0, r0)) >= kResidualTolerance) {
    throw FinalSizeError("final-size solver did not converge for S0=" + std::to_string(s0) +
                         " R0=" + std::to_string(r0) +
                         ", residual=" + std::to_string(residual(root, s0, r0)));
  }
  return root;
}

std::uint64_t swayable_recovered_count(std::size_t population, double r_inf, double i0,
                                       std::size_t n_swayable) {
  const double raw = static_cast<double>(population) * (r_inf - i0);
  if (!(raw > 0.0)) return 0;
  // nearbyint honours the default round-to-nearest-even mode.
  const double rounded = std::nearbyint(raw);
  return std::min<std::uint64_t>(static_cast<std::uint64_t>(rounded), n_swayable);
}

SwayableSampler::SwayableSampler(std::size_t pool_size) : pool_(pool_size) {
  std::iota(pool_.begin(), pool_.end(), std::size_t{0});
}

std::vector<std::size_t> SwayableSampler::sample_indices(std::size_t count, RandomStream& rng) {
  if (count > pool_.size()) throw std::invalid_argument("sample larger than pool");
  swaps_.clear();
  const std::size_t n = pool_.size();
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool_[i], pool_[j]);
    swaps_.push_back(j);
  }
  std::vector<std::size_t> picked(pool_.begin(), pool_.begin() + static_cast<std::ptrdiff_t>(count));
  for (std::size_t i = count; i-- > 0;) std::swap(pool_[i], pool_[swaps_[i]]);
  return picked;
}

double SwayableSampler::partial_shuffle_sum(std::span<const double> values, std::size_t count,
                                            RandomStream& rng) {
  swaps_.clear();
  const std::size_t n = pool_.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool_[i], pool_[j]);
    swaps_.push_back(j);
    sum += values[pool_[i]];
  }
  for (std::size_t i = count; i-- > 0;) std::swap(pool_[i], pool_[swaps_[i]]);
  return sum;
}

double SwayableSampler::sample_sum(std::span<const double> values, double values_total,
                                   std::size_t count, RandomStream& rng) {
  if (values.size() != pool_.size()) throw std::invalid_argument("values do not match pool");
  if (count > pool_.size()) throw std::invalid_argument("sample larger than pool");
  if (count == 0) return 0.0;
  if (count == pool_.size()) return values_total;
  if (2 * count <= pool_.size()) return partial_shuffle_sum(values, count, rng);
  return values_total - partial_shuffle_sum(values, pool_.size() - count, rng);
}

double simulate_growth_rate(const CascadeSetup& setup, double r0, double delta, RandomStream& rng) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must be in [0, 1]");
  const double aligned_total = setup.aligned_follower_total();
  if (!(aligned_total > 0.0)) throw std::invalid_argument("aligned follower total is zero");
  const auto init = initial_state(setup);
  const double r_inf = final_size(init.s0, r0);
  const auto count =
      swayable_recovered_count(setup.population(), r_inf, init.i0, setup.swayable.size());
  SwayableSampler sampler(setup.swayable.size());
  const double sampled = sampler.sample_sum(setup.swayable_followers,
                                            setup.swayable_follower_total(), count, rng);
  return delta * sampled / aligned_total;
}

double window_loss(const ClassRates& simulated, const ClassRates& empirical) {
  double q = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (simulated[c].has_value() != empirical[c].has_value()) {
      throw std::invalid_argument("class " + std::string(to_string(kAllClasses[c])) +
                                  " missing on one side");
    }
    if (!simulated[c]) continue;
    const double d = *simulated[c] - *empirical[c];
    q += d * d;
  }
  return q;
}

}  // namespace rtnet
