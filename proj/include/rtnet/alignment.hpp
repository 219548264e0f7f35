#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "rtnet/events.hpp"
#include "rtnet/graph.hpp"

namespace rtnet {

/// Retweets a user gives or receives, per content class.
struct InvolvementProfile {
  UserId user = 0;
  std::array<std::uint64_t, kNumClasses> counts{};

  std::uint64_t total() const { return counts[0] + counts[1] + counts[2]; }
  std::array<double, kNumClasses> proportions() const;
};

/// One graph per content class, indexed by index_of(ContentClass).
using ClassGraphs = std::array<WeightedDigraph, kNumClasses>;

/// Splits events into per-class graphs. When `backbone` is given only events
/// on its edges are kept.
ClassGraphs build_class_graphs(std::span<const RetweetEvent> events,
                               const WeightedDigraph* backbone = nullptr);

/// counts[c] = in-strength + out-strength in graph c (a self-loop counts
/// twice). Sorted by user; users absent from every graph are omitted.
std::vector<InvolvementProfile> involvement_profiles(const ClassGraphs& graphs);

struct AlignmentLabel {
  UserId user = 0;
  std::optional<ContentClass> label;  // nullopt = unaligned
  double theta = 0.95;
};

/// Aligned to c iff counts[c] / total > theta. theta must lie in [0.5, 1).
/// Profiles below `min_involvement` retweets are unaligned. Throws
/// std::invalid_argument for total = 0 or theta out of range.
AlignmentLabel classify_alignment(const InvolvementProfile& profile, double theta,
                                  std::uint64_t min_involvement = 0);

/// Lookup from user to aligned class (unaligned users are absent).
using AlignmentIndex = std::unordered_map<UserId, ContentClass>;

AlignmentIndex align_users(std::span<const InvolvementProfile> profiles, double theta,
                           std::uint64_t min_involvement = 0);

/// Users aligned to `c`, sorted.
std::vector<UserId> aligned_to(const AlignmentIndex& index, ContentClass c);

/// For each theta: share of the class graph's weight on edges with at least
/// one endpoint aligned to `c` at that theta. theta_grid must be ascending in
/// [0.5, 1); a class graph without weight is an error.
std::vector<double> coverage_curve(const WeightedDigraph& class_graph,
                                   std::span<const InvolvementProfile> profiles, ContentClass c,
                                   std::span<const double> theta_grid);

/// Triangular bins over the (factual, misleading, uncertain) simplex with
/// `bins_per_side` bins along each side: n^2 cells, split into "up"
/// triangles (i + j <= n - 1) and "down" triangles (i + j <= n - 2), where
/// i = floor(n * factual) and j = floor(n * misleading).
struct TernaryBin {
  int i = 0;
  int j = 0;
  bool up = true;
  std::size_t count = 0;
};

std::vector<TernaryBin> ternary_histogram(std::span<const InvolvementProfile> profiles,
                                          int bins_per_side);

/// The bin (i, j, up) a proportion triple falls into.
TernaryBin ternary_bin_of(const std::array<double, kNumClasses>& proportions, int bins_per_side);

}  // namespace rtnet
