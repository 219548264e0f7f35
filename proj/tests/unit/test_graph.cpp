#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "helpers.hpp"
#include "rtnet/graph.hpp"
#include "rtnet/graph_io.hpp"
#include "rtnet/philox.hpp"

using namespace rtnet;
using testing::graph;

namespace {

WeightedDigraph random_graph(RandomStream& rng, std::size_t n, std::size_t m) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < m; ++i) {
    edges.push_back({rng.below(n), rng.below(n), 1 + rng.below(5)});
  }
  std::vector<UserId> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  return WeightedDigraph::from_edges(edges, all);
}

// Transitive closure by repeated relaxation.
std::vector<std::vector<char>> closure(const WeightedDigraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
  for (std::size_t v = 0; v < n; ++v) r[v][v] = 1;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    r[g.local_edge(e).source][g.local_edge(e).sink] = 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!r[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) r[i][j] |= r[k][j];
    }
  }
  return r;
}

std::set<std::set<UserId>> brute_force_sccs(const WeightedDigraph& g) {
  const auto r = closure(g);
  std::set<std::set<UserId>> out;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    std::set<UserId> comp;
    for (std::size_t j = 0; j < g.node_count(); ++j) {
      if (r[i][j] && r[j][i]) comp.insert(g.node(static_cast<WeightedDigraph::Index>(j)));
    }
    out.insert(comp);
  }
  return out;
}

}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("repeated retweets aggregate into one weighted edge") {
    using testing::event;
    const std::vector<RetweetEvent> events{event(1, 1, 2), event(2, 1, 2), event(3, 1, 2)};
    const auto g = build_network(events, {0, 10});
    REQUIRE(g.edge_count() == 1);
    CHECK(g.edge(0) == Edge{1, 2, 3});
    CHECK(g.node_count() == 2);
  }

  TEST_CASE("time range is half-open") {
    using testing::event;
    const std::vector<RetweetEvent> events{event(0, 1, 2), event(10, 3, 4), event(9, 5, 6)};
    const auto g = build_network(events, {0, 10});
    CHECK(g.edge_count() == 2);
    CHECK_FALSE(g.contains(3));
    CHECK(build_network(events, {5, 5}).empty());
  }

  TEST_CASE("class filter keeps only matching edges") {
    using testing::event;
    const std::vector<RetweetEvent> events{event(1, 1, 2, ContentClass::kFactual),
                                           event(1, 3, 4, ContentClass::kMisleading),
                                           event(1, 5, 6, ContentClass::kFactual)};
    const auto g = build_network(events, {0, 10}, ContentClass::kFactual);
    CHECK(g.edge_list() == std::vector<Edge>{{1, 2, 1}, {5, 6, 1}});
  }

  TEST_CASE("total weight equals retained events") {
    RandomStream rng(1, {0, 0, 0});
    std::vector<RetweetEvent> events;
    for (int i = 0; i < 1000; ++i) {
      events.push_back(testing::event(static_cast<Timestamp>(rng.below(100)), rng.below(40),
                                      rng.below(40)));
    }
    const auto g = build_network(events, {20, 70});
    const auto retained = std::count_if(events.begin(), events.end(), [](const auto& e) {
      return e.timestamp >= 20 && e.timestamp < 70;
    });
    CHECK(g.total_weight() == static_cast<std::uint64_t>(retained));
  }

  TEST_CASE("zero weights are rejected and duplicates merged") {
    CHECK_THROWS_AS(graph({{1, 2, 0}}), std::invalid_argument);
    const auto g = graph({{1, 2, 2}, {1, 2, 3}});
    CHECK(g.edge_list() == std::vector<Edge>{{1, 2, 5}});
  }

  TEST_CASE("degrees and strengths") {
    const auto g = graph({{0, 1, 98}, {0, 2, 1}, {0, 3, 1}, {5, 5, 2}}, {9});
    const auto d = node_degrees(g);
    CHECK(d[*g.index_of(0)] == NodeDegrees{0, 3, 0, 100});
    CHECK(d[*g.index_of(9)] == NodeDegrees{});
    CHECK(d[*g.index_of(5)] == NodeDegrees{1, 1, 2, 2});
    CHECK(d[*g.index_of(1)] == NodeDegrees{1, 0, 98, 0});
  }

  TEST_CASE("creator and consumer partition") {
    const auto chain = creator_consumer_partition(graph({{1, 2, 1}, {2, 3, 1}}));
    CHECK(chain.creators_only == std::vector<UserId>{1});
    CHECK(chain.both == std::vector<UserId>{2});
    CHECK(chain.consumers_only == std::vector<UserId>{3});

    const auto cycle = creator_consumer_partition(graph({{1, 2, 1}, {2, 1, 1}}));
    CHECK(cycle.both == std::vector<UserId>{1, 2});
    CHECK(cycle.creators_only.empty());

    // Edge 1->2 of weight 7 out of total 10 runs from a creator to a consumer.
    const auto r = creator_consumer_partition(graph({{1, 2, 7}, {3, 4, 3}}));
    const auto creator = static_cast<std::size_t>(NodeRole::kCreatorOnly);
    const auto consumer = static_cast<std::size_t>(NodeRole::kConsumerOnly);
    CHECK(r.cross_fraction[creator][consumer] == doctest::Approx(1.0));
    const auto single = creator_consumer_partition(graph({{1, 2, 7}, {2, 3, 3}}));
    const auto both = static_cast<std::size_t>(NodeRole::kBoth);
    CHECK(single.cross_fraction[creator][both] == doctest::Approx(0.7));
    CHECK(single.cross_fraction[both][consumer] == doctest::Approx(0.3));
  }

  TEST_CASE("partition covers non-isolated nodes disjointly") {
    RandomStream rng(4, {0, 0, 0});
    const auto g = random_graph(rng, 30, 40);
    const auto p = creator_consumer_partition(g);
    std::set<UserId> seen;
    for (const auto* group : {&p.creators_only, &p.consumers_only, &p.both}) {
      for (auto u : *group) CHECK(seen.insert(u).second);
    }
    const auto d = node_degrees(g);
    std::size_t non_isolated = 0;
    for (const auto& x : d) non_isolated += (x.k_in + x.k_out) > 0;
    CHECK(seen.size() == non_isolated);
    double total = 0.0;
    for (const auto& row : p.cross_fraction) {
      for (double f : row) total += f;
    }
    CHECK(total == doctest::Approx(1.0));
  }

  TEST_CASE("strongly connected components on small shapes") {
    const auto triangle = strongly_connected_components(graph({{1, 2, 1}, {2, 3, 1}, {3, 1, 1}}));
    REQUIRE(triangle.size() == 1);
    CHECK(triangle[0] == std::vector<UserId>{1, 2, 3});

    const auto dag =
        strongly_connected_components(graph({{1, 2, 1}, {1, 3, 1}, {2, 4, 1}, {3, 4, 1}}));
    CHECK(dag.size() == 4);
    for (const auto& c : dag) CHECK(c.size() == 1);

    const auto g = graph({{1, 2, 1}, {2, 3, 1}, {3, 1, 1}, {4, 5, 1}, {5, 6, 1}, {6, 4, 1},
                          {3, 4, 1}});
    const auto two = strongly_connected_components(g);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == std::vector<UserId>{1, 2, 3});
    CHECK(two[1] == std::vector<UserId>{4, 5, 6});
    std::set<std::set<UserId>> got;
    for (const auto& c : two) got.insert({c.begin(), c.end()});
    CHECK(got == brute_force_sccs(g));
  }

  TEST_CASE("components match pairwise reachability on random graphs") {
    RandomStream rng(8, {0, 0, 0});
    for (int trial = 0; trial < 100; ++trial) {
      const auto g = random_graph(rng, 2 + rng.below(25), rng.below(60));
      const auto comps = strongly_connected_components(g);
      std::set<std::set<UserId>> got;
      for (std::size_t i = 0; i < comps.size(); ++i) {
        if (i > 0) CHECK(comps[i - 1].size() >= comps[i].size());
        got.insert({comps[i].begin(), comps[i].end()});
      }
      REQUIRE(got == brute_force_sccs(g));
    }
  }

  TEST_CASE("condensation is acyclic") {
    RandomStream rng(9, {0, 0, 0});
    const auto g = random_graph(rng, 40, 80);
    const auto comps = strongly_connected_components(g);
    std::vector<std::size_t> comp_of(g.node_count());
    for (std::size_t c = 0; c < comps.size(); ++c) {
      for (auto u : comps[c]) comp_of[*g.index_of(u)] = c;
    }
    std::vector<Edge> dag;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const auto a = comp_of[g.local_edge(e).source];
      const auto b = comp_of[g.local_edge(e).sink];
      if (a != b) dag.push_back({a, b, 1});
    }
    std::vector<UserId> all(comps.size());
    for (std::size_t c = 0; c < comps.size(); ++c) all[c] = c;
    const auto condensed = strongly_connected_components(WeightedDigraph::from_edges(dag, all));
    CHECK(condensed.size() == comps.size());
  }

  TEST_CASE("reachable sets") {
    const auto chain = graph({{1, 2, 1}, {2, 3, 1}}, {9});
    const std::vector<UserId> a{1};
    const std::vector<UserId> c{3};
    const std::vector<UserId> x{9};
    CHECK(reachable_set(chain, a) == std::vector<UserId>{1, 2, 3});
    CHECK(reachable_set(chain, x) == std::vector<UserId>{9});
    CHECK(reachable_set(chain, c) == std::vector<UserId>{3});
    const std::vector<UserId> unknown{42};
    CHECK_THROWS_AS(reachable_set(chain, unknown), std::invalid_argument);
  }

  TEST_CASE("reachability is monotone and idempotent") {
    RandomStream rng(10, {0, 0, 0});
    for (int trial = 0; trial < 30; ++trial) {
      const auto g = random_graph(rng, 20, 30);
      const std::vector<UserId> small{rng.below(20)};
      std::vector<UserId> large = small;
      large.push_back(rng.below(20));
      const auto rs = reachable_set(g, small);
      const auto rl = reachable_set(g, large);
      CHECK(std::includes(rl.begin(), rl.end(), rs.begin(), rs.end()));
      CHECK(reachable_set(g, rl) == rl);
      const auto r = closure(g);
      const auto src = *g.index_of(small[0]);
      std::vector<UserId> expected;
      for (std::size_t j = 0; j < g.node_count(); ++j) {
        if (r[src][j]) expected.push_back(g.node(static_cast<WeightedDigraph::Index>(j)));
      }
      CHECK(rs == expected);
    }
  }

  TEST_CASE("reverse reachability follows in-edges") {
    const auto g = graph({{1, 2, 1}, {2, 3, 1}});
    const std::vector<WeightedDigraph::Index> src{*g.index_of(2)};
    const auto fwd = reachable_mask(g, src);
    const auto rev = reachable_mask(g, src, true);
    CHECK(fwd == std::vector<char>{0, 1, 1});
    CHECK(rev == std::vector<char>{1, 1, 0});
  }

  TEST_CASE("binary graph format round trips, including isolated nodes") {
    const auto g = graph({{1, 2, 3}, {2, 1, 1}, {7, 7, 4}}, {100});
    std::stringstream buf;
    write_graph_binary(buf, g);
    const auto back = read_graph_binary(buf);
    CHECK(back.edge_list() == g.edge_list());
    CHECK(std::vector<UserId>(back.nodes().begin(), back.nodes().end()) ==
          std::vector<UserId>(g.nodes().begin(), g.nodes().end()));

    std::string bytes;
    {
      std::ostringstream out;
      write_graph_binary(out, g);
      bytes = out.str();
    }
    CHECK(bytes.substr(0, 8) == "RTNGRAPH");
    std::istringstream truncated(bytes.substr(0, bytes.size() - 4));
    CHECK_THROWS_AS(read_graph_binary(truncated), std::runtime_error);
    std::string bad = bytes;
    bad[0] = 'X';
    std::istringstream bad_magic(bad);
    CHECK_THROWS_AS(read_graph_binary(bad_magic), std::runtime_error);
    std::string version = bytes;
    version[8] = 9;
    std::istringstream bad_version(version);
    CHECK_THROWS_AS(read_graph_binary(bad_version), std::runtime_error);
  }

  TEST_CASE("graph CSV export") {
    std::ostringstream out;
    write_graph_csv(out, graph({{1, 2, 3}}));
    CHECK(out.str() == "src,dst,weight\n1,2,3\n");
  }

  TEST_CASE("event store round trips") {
    EventStream s;
    s.users.intern("alice");
    s.users.intern("bob, jr");
    auto e = testing::event(17, 0, 1, ContentClass::kMisleading);
    e.retweeter_followers = 12;
    e.retweetee_verified = true;
    s.events.push_back(e);
    std::stringstream buf;
    write_event_store(buf, s);
    const auto back = read_event_store(buf);
    CHECK(back.events == s.events);
    CHECK(back.users.names() == s.users.names());
  }
}
