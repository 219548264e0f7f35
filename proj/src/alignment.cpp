#include "rtnet/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace rtnet {

std::array<double, kNumClasses> InvolvementProfile::proportions() const {
  const double t = static_cast<double>(total());
  if (t == 0.0) return {0.0, 0.0, 0.0};
  return {static_cast<double>(counts[0]) / t, static_cast<double>(counts[1]) / t,
          static_cast<double>(counts[2]) / t};
}

ClassGraphs build_class_graphs(std::span<const RetweetEvent> events,
                               const WeightedDigraph* backbone) {
  std::array<std::vector<Edge>, kNumClasses> edges;
  for (const auto& e : events) {
    if (backbone && !backbone->find_edge(e.retweetee, e.retweeter)) continue;
    edges[index_of(e.content_class)].push_back({e.retweetee, e.retweeter, 1});
  }
  ClassGraphs graphs;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    graphs[c] = WeightedDigraph::from_edges(std::move(edges[c]));
  }
  return graphs;
}

std::vector<InvolvementProfile> involvement_profiles(const ClassGraphs& graphs) {
  std::map<UserId, InvolvementProfile> profiles;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto& g = graphs[c];
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const Edge edge = g.edge(e);
      auto& src = profiles[edge.source];
      src.user = edge.source;
      src.counts[c] += edge.weight;
      auto& dst = profiles[edge.sink];
      dst.user = edge.sink;
      dst.counts[c] += edge.weight;
    }
  }
  std::vector<InvolvementProfile> out;
  out.reserve(profiles.size());
  for (auto& [user, p] : profiles) out.push_back(p);
  return out;
}

namespace {

void check_theta(double theta) {
  if (!(theta >= 0.5 && theta < 1.0)) throw std::invalid_argument("theta must be in [0.5, 1)");
}

// Strict "> theta" test on integer counts: count / total > theta.
std::optional<ContentClass> dominant_class(const InvolvementProfile& p, double theta) {
  const double total = static_cast<double>(p.total());
  for (ContentClass c : kAllClasses) {
    if (static_cast<double>(p.counts[index_of(c)]) / total > theta) return c;
  }
  return std::nullopt;
}

}  // namespace

AlignmentLabel classify_alignment(const InvolvementProfile& profile, double theta,
                                  std::uint64_t min_involvement) {
  check_theta(theta);
  if (profile.total() == 0) throw std::invalid_argument("profile has no retweets");
  AlignmentLabel label{profile.user, std::nullopt, theta};
  if (profile.total() < min_involvement) return label;
  label.label = dominant_class(profile, theta);
  return label;
}

AlignmentIndex align_users(std::span<const InvolvementProfile> profiles, double theta,
                           std::uint64_t min_involvement) {
  AlignmentIndex index;
  for (const auto& p : profiles) {
    if (p.total() == 0) continue;
    const auto label = classify_alignment(p, theta, min_involvement);
    if (label.label) index.emplace(p.user, *label.label);
  }
  return index;
}

std::vector<UserId> aligned_to(const AlignmentIndex& index, ContentClass c) {
  std::vector<UserId> out;
  for (const auto& [user, cls] : index) {
    if (cls == c) out.push_back(user);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> coverage_curve(const WeightedDigraph& class_graph,
                                   std::span<const InvolvementProfile> profiles, ContentClass c,
                                   std::span<const double> theta_grid) {
  if (class_graph.total_weight() == 0) {
    throw std::invalid_argument("class has no retweets");
  }
  for (double theta : theta_grid) check_theta(theta);
  if (!std::is_sorted(theta_grid.begin(), theta_grid.end())) {
    throw std::invalid_argument("theta grid must be ascending");
  }

  // Share of class c in each node's profile.
  std::vector<double> share(class_graph.node_count(), 0.0);
  for (const auto& p : profiles) {
    auto v = class_graph.index_of(p.user);
    if (!v || p.total() == 0) continue;
    share[*v] = static_cast<double>(p.counts[index_of(c)]) / static_cast<double>(p.total());
  }

  std::vector<double> curve;
  curve.reserve(theta_grid.size());
  const double total = static_cast<double>(class_graph.total_weight());
  for (double theta : theta_grid) {
    std::uint64_t covered = 0;
    for (std::size_t e = 0; e < class_graph.edge_count(); ++e) {
      const auto& le = class_graph.local_edge(e);
      if (share[le.source] > theta || share[le.sink] > theta) covered += le.weight;
    }
    curve.push_back(static_cast<double>(covered) / total);
  }
  return curve;
}

TernaryBin ternary_bin_of(const std::array<double, kNumClasses>& proportions, int n) {
  if (n < 1) throw std::invalid_argument("bins_per_side must be >= 1");
  const double a = proportions[0] * n;
  const double b = proportions[1] * n;
  int i = std::clamp(static_cast<int>(std::floor(a)), 0, n - 1);
  int j = std::clamp(static_cast<int>(std::floor(b)), 0, n - 1);
  if (i + j > n - 1) {
    // Only reachable on the outer edge (factual + misleading = 1).
    j = n - 1 - i;
    return {i, j, true, 0};
  }
  const double frac = (a - i) + (b - j);
  const bool up = (i + j == n - 1) || frac < 1.0;
  return {i, j, up, 0};
}

std::vector<TernaryBin> ternary_histogram(std::span<const InvolvementProfile> profiles,
                                          int bins_per_side) {
  if (bins_per_side < 1) throw std::invalid_argument("bins_per_side must be >= 1");
  const int n = bins_per_side;
  // Bins in a fixed order: for each (i, j) the up cell, then the down cell.
  std::vector<TernaryBin> bins;
  std::map<std::tuple<int, int, bool>, std::size_t> slot;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; i + j <= n - 1; ++j) {
      slot[{i, j, true}] = bins.size();
      bins.push_back({i, j, true, 0});
      if (i + j <= n - 2) {
        slot[{i, j, false}] = bins.size();
        bins.push_back({i, j, false, 0});
      }
    }
  }
  for (const auto& p : profiles) {
    if (p.total() == 0) continue;
    const auto bin = ternary_bin_of(p.proportions(), n);
    ++bins[slot.at({bin.i, bin.j, bin.up})].count;
  }
  return bins;
}

}  // namespace rtnet
