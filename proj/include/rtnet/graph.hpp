#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rtnet/events.hpp"

namespace rtnet {

/// Directed edge in user-id space. Direction is creator -> consumer, i.e. the
/// retweeted user points at the retweeter.
struct Edge {
  UserId source = 0;
  UserId sink = 0;
  std::uint64_t weight = 0;

  bool operator==(const Edge&) const = default;
};

/// Immutable directed weighted graph in compressed adjacency form.
///
/// Nodes are kept sorted by id and addressed by a dense local index. Edges are
/// sorted by (source, sink); `in_edges` lists edge positions sorted by
/// (sink, source). Self-loops are allowed; duplicate pairs are merged by
/// summing their weights at construction.
class WeightedDigraph {
 public:
  using Index = std::uint32_t;

  struct LocalEdge {
    Index source;
    Index sink;
    std::uint64_t weight;
  };

  WeightedDigraph() : out_offsets_{0}, in_offsets_{0} {}

  /// Zero-weight edges are rejected with std::invalid_argument.
  static WeightedDigraph from_edges(std::vector<Edge> edges,
                                    std::span<const UserId> extra_nodes = {});

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }
  std::uint64_t total_weight() const { return total_weight_; }

  std::span<const UserId> nodes() const { return nodes_; }
  UserId node(Index v) const { return nodes_[v]; }
  std::optional<Index> index_of(UserId id) const;
  bool contains(UserId id) const { return index_of(id).has_value(); }

  const LocalEdge& local_edge(std::size_t e) const { return edges_[e]; }
  Edge edge(std::size_t e) const {
    const auto& le = edges_[e];
    return {nodes_[le.source], nodes_[le.sink], le.weight};
  }
  std::vector<Edge> edge_list() const;

  /// Edge positions [begin, end) leaving v.
  std::pair<std::size_t, std::size_t> out_range(Index v) const {
    return {out_offsets_[v], out_offsets_[v + 1]};
  }
  /// Edge positions entering v.
  std::span<const std::size_t> in_edges(Index v) const {
    return std::span<const std::size_t>(in_edges_).subspan(in_offsets_[v],
                                                            in_offsets_[v + 1] - in_offsets_[v]);
  }
  std::size_t out_degree(Index v) const { return out_offsets_[v + 1] - out_offsets_[v]; }
  std::size_t in_degree(Index v) const { return in_offsets_[v + 1] - in_offsets_[v]; }

  /// Position of edge (source, sink), if present.
  std::optional<std::size_t> find_edge(UserId source, UserId sink) const;

 private:
  std::vector<UserId> nodes_;
  std::vector<LocalEdge> edges_;
  std::vector<std::size_t> out_offsets_;
  std::vector<std::size_t> in_offsets_;
  std::vector<std::size_t> in_edges_;
  std::uint64_t total_weight_ = 0;
};

/// Aggregates events with timestamp in `range` (and of `class_filter`, when
/// given) into a graph; weight = number of retweets of the pair.
WeightedDigraph build_network(std::span<const RetweetEvent> events, TimeRange range,
                              std::optional<ContentClass> class_filter = std::nullopt);

/// Same aggregation over events accepted by `keep`.
WeightedDigraph build_network_if(std::span<const RetweetEvent> events,
                                 const std::function<bool(const RetweetEvent&)>& keep);

/// Subgraph of `g` keeping the edges accepted by `keep` (edge position), then
/// dropping nodes left without edges.
WeightedDigraph filter_edges(const WeightedDigraph& g,
                             const std::function<bool(std::size_t)>& keep);

struct NodeDegrees {
  std::uint64_t k_in = 0;
  std::uint64_t k_out = 0;
  std::uint64_t s_in = 0;
  std::uint64_t s_out = 0;

  bool operator==(const NodeDegrees&) const = default;
};

/// Indexed by local node index. A self-loop counts toward both directions.
std::vector<NodeDegrees> node_degrees(const WeightedDigraph& g);

enum class NodeRole : std::uint8_t { kCreatorOnly = 0, kConsumerOnly = 1, kBoth = 2 };

struct PartitionReport {
  std::vector<UserId> creators_only;
  std::vector<UserId> consumers_only;
  std::vector<UserId> both;
  /// cross_fraction[from][to]: share of total weight flowing from one role
  /// group to another, indexed by NodeRole.
  std::array<std::array<double, 3>, 3> cross_fraction{};
};

PartitionReport creator_consumer_partition(const WeightedDigraph& g);

/// Strongly connected components (iterative Tarjan, linear time), largest
/// first; equal sizes are ordered by smallest member id.
std::vector<std::vector<UserId>> strongly_connected_components(const WeightedDigraph& g);

/// Every node with a directed path from some source, including the sources.
/// Throws std::invalid_argument if a source is not a node of g.
std::vector<UserId> reachable_set(const WeightedDigraph& g, std::span<const UserId> sources);

/// Mask over local indices reachable from `sources` (local indices). Follows
/// in-edges instead when `reverse` is set.
std::vector<char> reachable_mask(const WeightedDigraph& g,
                                 std::span<const WeightedDigraph::Index> sources,
                                 bool reverse = false);

}  // namespace rtnet
