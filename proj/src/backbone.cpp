#include "rtnet/backbone.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

#include "rtnet/parallel.hpp"

namespace rtnet {

double edge_alpha(double p, std::uint64_t k) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("normalised weight must be in (0, 1]");
  if (k < 1) throw std::invalid_argument("degree must be >= 1");
  if (k == 1) return 1.0;
  return std::pow(1.0 - p, static_cast<double>(k - 1));
}

std::vector<EdgeSignificance> edge_significance(const WeightedDigraph& g, unsigned threads) {
  const std::size_t m = g.edge_count();
  std::vector<EdgeSignificance> sig(m);
  for (std::size_t e = 0; e < m; ++e) {
    const Edge edge = g.edge(e);
    sig[e].source = edge.source;
    sig[e].sink = edge.sink;
    sig[e].weight = edge.weight;
  }

  // Out-sides: each task owns the out-edges of one node.
  parallel_for(g.node_count(), threads, [&](std::size_t v) {
    const auto [begin, end] = g.out_range(static_cast<WeightedDigraph::Index>(v));
    if (begin == end) return;
    std::uint64_t strength = 0;
    for (std::size_t e = begin; e < end; ++e) strength += g.local_edge(e).weight;
    const std::uint64_t k = end - begin;
    for (std::size_t e = begin; e < end; ++e) {
      sig[e].p_out = static_cast<double>(g.local_edge(e).weight) / static_cast<double>(strength);
      sig[e].alpha_out = edge_alpha(sig[e].p_out, k);
    }
  });
  // In-sides: each task owns the in-edges of one node.
  parallel_for(g.node_count(), threads, [&](std::size_t v) {
    const auto in = g.in_edges(static_cast<WeightedDigraph::Index>(v));
    if (in.empty()) return;
    std::uint64_t strength = 0;
    for (std::size_t e : in) strength += g.local_edge(e).weight;
    for (std::size_t e : in) {
      sig[e].p_in = static_cast<double>(g.local_edge(e).weight) / static_cast<double>(strength);
      sig[e].alpha_in = edge_alpha(sig[e].p_in, in.size());
    }
  });
  for (auto& s : sig) s.alpha = std::min(s.alpha_out, s.alpha_in);
  return sig;
}

namespace {

bool retained(double alpha, double level) { return level >= 1.0 || alpha < level; }

void check_level(double level) {
  if (!(level > 0.0 && level <= 1.0)) {
    throw std::invalid_argument("significance level must be in (0, 1]");
  }
}

}  // namespace

WeightedDigraph disparity_filter(const WeightedDigraph& g,
                                 std::span<const EdgeSignificance> significance,
                                 double alpha_level) {
  check_level(alpha_level);
  if (significance.size() != g.edge_count()) {
    throw std::invalid_argument("significance table does not match graph");
  }
  return filter_edges(g, [&](std::size_t e) { return retained(significance[e].alpha, alpha_level); });
}

WeightedDigraph disparity_filter(const WeightedDigraph& g, double alpha_level, unsigned threads) {
  check_level(alpha_level);
  const auto sig = edge_significance(g, threads);
  return disparity_filter(g, sig, alpha_level);
}

WeightedDigraph global_threshold_backbone(const WeightedDigraph& g, std::uint64_t w_min) {
  return filter_edges(g, [&](std::size_t e) { return g.local_edge(e).weight >= w_min; });
}

std::uint64_t top_weight_threshold(const WeightedDigraph& g, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("fraction must be in (0, 1]");
  }
  if (g.edge_count() == 0) return 0;
  std::vector<std::uint64_t> weights;
  weights.reserve(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) weights.push_back(g.local_edge(e).weight);
  std::sort(weights.begin(), weights.end(), std::greater<>());
  const auto count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(weights.size()))));
  return weights[count - 1];
}

std::vector<BackboneSize> backbone_size_curve(const WeightedDigraph& g,
                                              std::span<const double> alpha_grid,
                                              unsigned threads) {
  if (!std::is_sorted(alpha_grid.begin(), alpha_grid.end())) {
    throw std::invalid_argument("alpha grid must be ascending");
  }
  for (double a : alpha_grid) check_level(a);
  const auto sig = edge_significance(g, threads);
  std::vector<BackboneSize> curve;
  curve.reserve(alpha_grid.size());
  for (double level : alpha_grid) {
    BackboneSize size;
    size.alpha = level;
    std::vector<char> touched(g.node_count(), 0);
    for (std::size_t e = 0; e < sig.size(); ++e) {
      if (!retained(sig[e].alpha, level)) continue;
      ++size.edges;
      size.weight += sig[e].weight;
      const auto& le = g.local_edge(e);
      touched[le.source] = 1;
      touched[le.sink] = 1;
    }
    size.nodes = static_cast<std::size_t>(std::count(touched.begin(), touched.end(), 1));
    const auto ratio = [](double part, double whole) { return whole > 0.0 ? part / whole : 0.0; };
    size.node_fraction = ratio(static_cast<double>(size.nodes), static_cast<double>(g.node_count()));
    size.edge_fraction = ratio(static_cast<double>(size.edges), static_cast<double>(g.edge_count()));
    size.weight_fraction =
        ratio(static_cast<double>(size.weight), static_cast<double>(g.total_weight()));
    curve.push_back(size);
  }
  return curve;
}

double backbone_overlap(const WeightedDigraph& reference, const WeightedDigraph& backbone) {
  if (reference.edge_count() == 0) throw std::invalid_argument("reference has no edges");
  std::size_t shared = 0;
  for (std::size_t e = 0; e < reference.edge_count(); ++e) {
    const Edge edge = reference.edge(e);
    if (backbone.find_edge(edge.source, edge.sink)) ++shared;
  }
  return static_cast<double>(shared) / static_cast<double>(reference.edge_count());
}

namespace {

double side_heterogeneity(const WeightedDigraph& g, WeightedDigraph::Index v, Direction dir,
                          std::uint64_t& degree) {
  std::vector<std::uint64_t> weights;
  if (dir == Direction::kOut) {
    const auto [begin, end] = g.out_range(v);
    for (std::size_t e = begin; e < end; ++e) weights.push_back(g.local_edge(e).weight);
  } else {
    for (std::size_t e : g.in_edges(v)) weights.push_back(g.local_edge(e).weight);
  }
  degree = weights.size();
  if (weights.empty()) return 0.0;
  double strength = 0.0;
  for (auto w : weights) strength += static_cast<double>(w);
  double sum_sq = 0.0;
  for (auto w : weights) {
    const double p = static_cast<double>(w) / strength;
    sum_sq += p * p;
  }
  return static_cast<double>(weights.size()) * sum_sq;
}

}  // namespace

double local_heterogeneity(const WeightedDigraph& g, UserId node, Direction direction) {
  auto v = g.index_of(node);
  if (!v) throw std::invalid_argument("node not in graph");
  std::uint64_t k = 0;
  const double upsilon = side_heterogeneity(g, *v, direction, k);
  if (k == 0) throw std::invalid_argument("node has degree 0 in that direction");
  return upsilon;
}

NullMoments null_heterogeneity_moments(std::uint64_t k) {
  if (k < 1) throw std::invalid_argument("degree must be >= 1");
  const double kd = static_cast<double>(k);
  const double mean = 2.0 * kd / (kd + 1.0);
  const double variance =
      kd * kd *
      ((20.0 + 4.0 * kd) / ((kd + 1.0) * (kd + 2.0) * (kd + 3.0)) - 4.0 / ((kd + 1.0) * (kd + 1.0)));
  // k = 1 is exactly zero; tiny negative round-off is clamped.
  return {mean, std::max(0.0, variance)};
}

HeterogeneityReport strong_disorder_test(const WeightedDigraph& g, double band) {
  if (!(band > 0.0)) throw std::invalid_argument("band multiplier must be positive");
  HeterogeneityReport report;
  report.band = band;
  // (direction, bucket exponent) -> (nodes, flagged)
  std::map<std::pair<int, int>, std::pair<std::size_t, std::size_t>> tally;
  for (WeightedDigraph::Index v = 0; v < g.node_count(); ++v) {
    for (Direction dir : {Direction::kOut, Direction::kIn}) {
      std::uint64_t k = 0;
      const double upsilon = side_heterogeneity(g, v, dir, k);
      if (k == 0) continue;
      const auto null = null_heterogeneity_moments(k);
      const double sd = std::sqrt(null.variance);
      HeterogeneityEntry entry{g.node(v), dir, k, upsilon, null.mean, sd,
                               upsilon > null.mean + band * sd};
      const int exponent = std::bit_width(k) - 1;
      auto& t = tally[{static_cast<int>(dir), exponent}];
      ++t.first;
      t.second += entry.flagged;
      report.entries.push_back(entry);
    }
  }
  for (const auto& [key, counts] : tally) {
    DegreeBucket bucket;
    bucket.direction = static_cast<Direction>(key.first);
    bucket.k_min = std::uint64_t{1} << key.second;
    bucket.k_max = (std::uint64_t{1} << (key.second + 1)) - 1;
    bucket.nodes = counts.first;
    bucket.flagged = counts.second;
    bucket.flagged_fraction =
        static_cast<double>(counts.second) / static_cast<double>(counts.first);
    report.buckets.push_back(bucket);
  }
  return report;
}

}  // namespace rtnet
