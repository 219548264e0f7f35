#include "rtnet/graph.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace rtnet {

WeightedDigraph WeightedDigraph::from_edges(std::vector<Edge> edges,
                                            std::span<const UserId> extra_nodes) {
  for (const auto& e : edges) {
    if (e.weight == 0) throw std::invalid_argument("edge weight must be positive");
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.source != b.source ? a.source < b.source : a.sink < b.sink;
  });

  WeightedDigraph g;
  g.nodes_.reserve(edges.size() * 2 + extra_nodes.size());
  for (const auto& e : edges) {
    g.nodes_.push_back(e.source);
    g.nodes_.push_back(e.sink);
  }
  g.nodes_.insert(g.nodes_.end(), extra_nodes.begin(), extra_nodes.end());
  std::sort(g.nodes_.begin(), g.nodes_.end());
  g.nodes_.erase(std::unique(g.nodes_.begin(), g.nodes_.end()), g.nodes_.end());
  if (g.nodes_.size() > std::numeric_limits<Index>::max()) {
    throw std::length_error("graph too large for 32-bit node indices");
  }

  const auto local = [&](UserId id) {
    return static_cast<Index>(std::lower_bound(g.nodes_.begin(), g.nodes_.end(), id) -
                              g.nodes_.begin());
  };

  g.edges_.reserve(edges.size());
  for (const auto& e : edges) {
    const Index s = local(e.source);
    const Index t = local(e.sink);
    if (!g.edges_.empty() && g.edges_.back().source == s && g.edges_.back().sink == t) {
      g.edges_.back().weight += e.weight;
    } else {
      g.edges_.push_back({s, t, e.weight});
    }
    g.total_weight_ += e.weight;
  }

  const std::size_t n = g.nodes_.size();
  g.out_offsets_.assign(n + 1, 0);
  g.in_offsets_.assign(n + 1, 0);
  for (const auto& e : g.edges_) {
    ++g.out_offsets_[e.source + 1];
    ++g.in_offsets_[e.sink + 1];
  }
  for (std::size_t v = 0; v < n; ++v) {
    g.out_offsets_[v + 1] += g.out_offsets_[v];
    g.in_offsets_[v + 1] += g.in_offsets_[v];
  }
  // Edges are sorted by (source, sink); a counting pass keeps in-lists sorted
  // by source within each sink.
  g.in_edges_.resize(g.edges_.size());
  std::vector<std::size_t> cursor(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  for (std::size_t e = 0; e < g.edges_.size(); ++e) {
    g.in_edges_[cursor[g.edges_[e].sink]++] = e;
  }
  return g;
}

std::optional<WeightedDigraph::Index> WeightedDigraph::index_of(UserId id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
  if (it == nodes_.end() || *it != id) return std::nullopt;
  return static_cast<Index>(it - nodes_.begin());
}

std::vector<Edge> WeightedDigraph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) out.push_back(edge(e));
  return out;
}

std::optional<std::size_t> WeightedDigraph::find_edge(UserId source, UserId sink) const {
  auto s = index_of(source);
  auto t = index_of(sink);
  if (!s || !t) return std::nullopt;
  auto [begin, end] = out_range(*s);
  auto it = std::lower_bound(edges_.begin() + static_cast<std::ptrdiff_t>(begin),
                             edges_.begin() + static_cast<std::ptrdiff_t>(end), *t,
                             [](const LocalEdge& e, Index v) { return e.sink < v; });
  if (it == edges_.begin() + static_cast<std::ptrdiff_t>(end) || it->sink != *t) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - edges_.begin());
}

WeightedDigraph build_network_if(std::span<const RetweetEvent> events,
                                 const std::function<bool(const RetweetEvent&)>& keep) {
  std::vector<Edge> edges;
  for (const auto& e : events) {
    if (keep(e)) edges.push_back({e.retweetee, e.retweeter, 1});
  }
  return WeightedDigraph::from_edges(std::move(edges));
}

WeightedDigraph build_network(std::span<const RetweetEvent> events, TimeRange range,
                              std::optional<ContentClass> class_filter) {
  return build_network_if(events, [&](const RetweetEvent& e) {
    return range.contains(e.timestamp) && (!class_filter || e.content_class == *class_filter);
  });
}

WeightedDigraph filter_edges(const WeightedDigraph& g,
                             const std::function<bool(std::size_t)>& keep) {
  std::vector<Edge> kept;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (keep(e)) kept.push_back(g.edge(e));
  }
  return WeightedDigraph::from_edges(std::move(kept));
}

std::vector<NodeDegrees> node_degrees(const WeightedDigraph& g) {
  std::vector<NodeDegrees> deg(g.node_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& le = g.local_edge(e);
    ++deg[le.source].k_out;
    deg[le.source].s_out += le.weight;
    ++deg[le.sink].k_in;
    deg[le.sink].s_in += le.weight;
  }
  return deg;
}

PartitionReport creator_consumer_partition(const WeightedDigraph& g) {
  PartitionReport report;
  std::vector<NodeRole> role(g.node_count(), NodeRole::kBoth);
  for (WeightedDigraph::Index v = 0; v < g.node_count(); ++v) {
    const bool out = g.out_degree(v) > 0;
    const bool in = g.in_degree(v) > 0;
    if (out && !in) {
      role[v] = NodeRole::kCreatorOnly;
      report.creators_only.push_back(g.node(v));
    } else if (in && !out) {
      role[v] = NodeRole::kConsumerOnly;
      report.consumers_only.push_back(g.node(v));
    } else if (in && out) {
      report.both.push_back(g.node(v));
    }
  }
  if (g.total_weight() == 0) return report;
  std::array<std::array<std::uint64_t, 3>, 3> weight{};
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& le = g.local_edge(e);
    weight[static_cast<std::size_t>(role[le.source])][static_cast<std::size_t>(role[le.sink])] +=
        le.weight;
  }
  const double total = static_cast<double>(g.total_weight());
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      report.cross_fraction[a][b] = static_cast<double>(weight[a][b]) / total;
    }
  }
  return report;
}

std::vector<std::vector<UserId>> strongly_connected_components(const WeightedDigraph& g) {
  using Index = WeightedDigraph::Index;
  constexpr Index kUnvisited = std::numeric_limits<Index>::max();
  const std::size_t n = g.node_count();
  std::vector<Index> order(n, kUnvisited);
  std::vector<Index> low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<Index> stack;
  struct Frame {
    Index node;
    std::size_t next_edge;
  };
  std::vector<Frame> call;
  std::vector<std::vector<UserId>> components;
  Index counter = 0;

  for (Index root = 0; root < n; ++root) {
    if (order[root] != kUnvisited) continue;
    call.push_back({root, g.out_range(root).first});
    order[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;

    while (!call.empty()) {
      Frame& frame = call.back();
      const Index v = frame.node;
      const std::size_t end = g.out_range(v).second;
      if (frame.next_edge < end) {
        const Index w = g.local_edge(frame.next_edge++).sink;
        if (order[w] == kUnvisited) {
          order[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, g.out_range(w).first});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], order[w]);
        }
        continue;
      }
      if (low[v] == order[v]) {
        std::vector<UserId> component;
        Index w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          component.push_back(g.node(w));
        } while (w != v);
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
      }
      call.pop_back();
      if (!call.empty()) {
        const Index parent = call.back().node;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }

  std::sort(components.begin(), components.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() > b.size() : a.front() < b.front();
  });
  return components;
}

std::vector<char> reachable_mask(const WeightedDigraph& g,
                                 std::span<const WeightedDigraph::Index> sources, bool reverse) {
  std::vector<char> seen(g.node_count(), 0);
  std::vector<WeightedDigraph::Index> frontier;
  for (auto s : sources) {
    if (!seen[s]) {
      seen[s] = 1;
      frontier.push_back(s);
    }
  }
  while (!frontier.empty()) {
    const auto v = frontier.back();
    frontier.pop_back();
    if (reverse) {
      for (std::size_t e : g.in_edges(v)) {
        const auto u = g.local_edge(e).source;
        if (!seen[u]) {
          seen[u] = 1;
          frontier.push_back(u);
        }
      }
    } else {
      auto [begin, end] = g.out_range(v);
      for (std::size_t e = begin; e < end; ++e) {
        const auto w = g.local_edge(e).sink;
        if (!seen[w]) {
          seen[w] = 1;
          frontier.push_back(w);
        }
      }
    }
  }
  return seen;
}

std::vector<UserId> reachable_set(const WeightedDigraph& g, std::span<const UserId> sources) {
  std::vector<WeightedDigraph::Index> local;
  local.reserve(sources.size());
  for (UserId s : sources) {
    auto idx = g.index_of(s);
    if (!idx) throw std::invalid_argument("source " + std::to_string(s) + " is not in the graph");
    local.push_back(*idx);
  }
  const auto mask = reachable_mask(g, local);
  std::vector<UserId> out;
  for (WeightedDigraph::Index v = 0; v < g.node_count(); ++v) {
    if (mask[v]) out.push_back(g.node(v));
  }
  return out;
}

}  // namespace rtnet
