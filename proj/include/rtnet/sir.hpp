#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtnet/alignment.hpp"
#include "rtnet/follower_dynamics.hpp"
#include "rtnet/graph.hpp"
#include "rtnet/ingest.hpp"
#include "rtnet/philox.hpp"

namespace rtnet {

/// Class-p retweets from the n 30-day months before the window:
/// [window.start - n * 30 days, window.start). Throws if n < 1.
WeightedDigraph temporal_network(std::span<const RetweetEvent> events, const TimeWindow& window,
                                 int lookback_months, ContentClass content_class);

struct CascadePopulations {
  std::vector<UserId> aligned;   // V_a, sorted
  std::vector<UserId> swayable;  // V_sw, sorted
};

/// V_sw: nodes reachable from the class-c aligned users that are not aligned
/// to any class. V_a: class-c aligned users reaching at least one of them.
CascadePopulations cascade_populations(const WeightedDigraph& g, const AlignmentIndex& alignment,
                                       ContentClass content_class);

struct FollowerSnapshot {
  double followers = 0.0;
  /// No observation before the cutoff; the earliest one was used instead.
  bool fallback = false;
};

/// Latest observation strictly before `cutoff`, else the user's earliest.
FollowerSnapshot follower_snapshot(const FollowerLogs& logs, UserId user, Timestamp cutoff);

/// Everything the stochastic step needs for one (window, class) pair.
struct CascadeSetup {
  std::uint32_t window_key = 0;
  TimeWindow window;
  int lookback_months = 1;
  ContentClass content_class = ContentClass::kFactual;
  std::vector<UserId> aligned;
  std::vector<UserId> swayable;
  std::vector<double> aligned_followers;
  std::vector<double> swayable_followers;
  std::size_t fallback_snapshots = 0;

  std::size_t population() const { return aligned.size() + swayable.size(); }
  double aligned_follower_total() const;
  double swayable_follower_total() const;
  bool simulable() const {
    return !aligned.empty() && !swayable.empty() && aligned_follower_total() > 0.0;
  }
};

CascadeSetup build_cascade_setup(std::span<const RetweetEvent> events, const FollowerLogs& logs,
                                 const AlignmentIndex& alignment, const TimeWindow& window,
                                 int lookback_months, ContentClass content_class,
                                 std::uint32_t window_key);

struct SirInit {
  double s0 = 0.0;
  double i0 = 0.0;
  double r0_state = 0.0;
};

/// S0 = |V_sw| / N, I0 = |V_a| / N. Throws if N = 0.
SirInit initial_state(const CascadeSetup& setup);

class FinalSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Root of 1 - R - S0 exp(-R0 R) = 0 in [1 - S0, 1]: Newton-Raphson from
/// 1 - S0 + S0 min(R0, 1) / 2, with a bracketed bisection fallback. At
/// R0 = 0 the result is exactly 1 - S0. Throws std::invalid_argument for
/// S0 outside [0, 1] or R0 < 0 and FinalSizeError if the residual stays
/// above 1e-12.
double final_size(double s0, double r0);

/// round-half-even(N (R_inf - I0)), clamped to [0, n_swayable].
std::uint64_t swayable_recovered_count(std::size_t population, double r_inf, double i0,
                                       std::size_t n_swayable);

/// Uniform sampling without replacement from a pool of fixed size. The pool
/// order is restored after every draw, so a draw depends only on the stream.
class SwayableSampler {
 public:
  explicit SwayableSampler(std::size_t pool_size);

  std::vector<std::size_t> sample_indices(std::size_t count, RandomStream& rng);
  /// Sum of `values` over a uniform sample of `count` pool members. Draws the
  /// smaller of the sample and its complement.
  double sample_sum(std::span<const double> values, double values_total, std::size_t count,
                    RandomStream& rng);

 private:
  double partial_shuffle_sum(std::span<const double> values, std::size_t count, RandomStream& rng);

  std::vector<std::size_t> pool_;
  std::vector<std::size_t> swaps_;
};

/// delta * (followers of a uniform sample of recovered swayable users) /
/// (followers of V_a). Throws std::invalid_argument if delta is outside
/// [0, 1] or the aligned follower total is 0.
double simulate_growth_rate(const CascadeSetup& setup, double r0, double delta, RandomStream& rng);

/// Per-class rates; an absent class is nullopt.
using ClassRates = std::array<std::optional<double>, kNumClasses>;

/// Sum over classes of squared differences. Throws std::invalid_argument if
/// the two sides do not define the same classes.
double window_loss(const ClassRates& simulated, const ClassRates& empirical);

}  // namespace rtnet
