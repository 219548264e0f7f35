#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rtnet/graph.hpp"

namespace rtnet {

/// p-value of a normalised weight p on a node side of degree k under the
/// uniform-partition null: (1 - p)^(k - 1), and 1 for k = 1.
/// Throws std::invalid_argument unless p in (0, 1] and k >= 1.
double edge_alpha(double p, std::uint64_t k);

struct EdgeSignificance {
  UserId source = 0;
  UserId sink = 0;
  std::uint64_t weight = 0;
  double p_out = 0.0;  // weight / out-strength of source
  double p_in = 0.0;   // weight / in-strength of sink
  double alpha_out = 1.0;
  double alpha_in = 1.0;
  double alpha = 1.0;  // min(alpha_out, alpha_in)
};

/// One entry per edge of g, in edge order. Out-sides and in-sides are
/// evaluated as independent tasks; the result does not depend on `threads`.
std::vector<EdgeSignificance> edge_significance(const WeightedDigraph& g, unsigned threads = 1);

/// Keeps edges with alpha < alpha_level (weights unchanged) and drops the
/// nodes left isolated. alpha_level = 1 keeps every edge.
WeightedDigraph disparity_filter(const WeightedDigraph& g, double alpha_level,
                                 unsigned threads = 1);
WeightedDigraph disparity_filter(const WeightedDigraph& g,
                                 std::span<const EdgeSignificance> significance,
                                 double alpha_level);

/// Keeps edges with weight >= w_min, dropping isolated nodes.
WeightedDigraph global_threshold_backbone(const WeightedDigraph& g, std::uint64_t w_min);

/// Smallest weight w such that at least `fraction` of edges have weight >= w
/// (e.g. 0.01 for the top 1% of edges).
std::uint64_t top_weight_threshold(const WeightedDigraph& g, double fraction);

struct BackboneSize {
  double alpha = 0.0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::uint64_t weight = 0;
  double node_fraction = 0.0;
  double edge_fraction = 0.0;
  double weight_fraction = 0.0;
};

/// alpha_grid must be ascending; throws std::invalid_argument otherwise.
std::vector<BackboneSize> backbone_size_curve(const WeightedDigraph& g,
                                              std::span<const double> alpha_grid,
                                              unsigned threads = 1);

/// |E_ref intersect E_backbone| / |E_ref|. Throws if the reference has no edges.
double backbone_overlap(const WeightedDigraph& reference, const WeightedDigraph& backbone);

enum class Direction : std::uint8_t { kIn, kOut };

/// k * sum_j p_j^2 over the node's edges in `direction`. Throws
/// std::invalid_argument if the node is absent or has degree 0 there.
double local_heterogeneity(const WeightedDigraph& g, UserId node, Direction direction);

struct NullMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of the heterogeneity under the null model, k >= 1.
NullMoments null_heterogeneity_moments(std::uint64_t k);

struct HeterogeneityEntry {
  UserId node = 0;
  Direction direction = Direction::kOut;
  std::uint64_t degree = 0;
  double upsilon = 0.0;
  double null_mean = 0.0;
  double null_sd = 0.0;
  bool flagged = false;
};

struct DegreeBucket {
  Direction direction = Direction::kOut;
  std::uint64_t k_min = 0;  // inclusive
  std::uint64_t k_max = 0;  // inclusive
  std::size_t nodes = 0;
  std::size_t flagged = 0;
  double flagged_fraction = 0.0;
};

struct HeterogeneityReport {
  double band = 2.0;
  std::vector<HeterogeneityEntry> entries;
  /// Power-of-two degree buckets per direction.
  std::vector<DegreeBucket> buckets;
};

/// Flags node sides whose heterogeneity exceeds mean + a * sd of the null.
HeterogeneityReport strong_disorder_test(const WeightedDigraph& g, double band);

}  // namespace rtnet
