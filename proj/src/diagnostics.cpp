#include "rtnet/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rtnet {

std::vector<CcdfPoint> ccdf(std::span<const double> samples) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<CcdfPoint> out;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    out.push_back({sorted[i], static_cast<double>(sorted.size() - i) / n});
    i = j;
  }
  return out;
}

std::optional<PowerLawFit> fit_power_law_tail(std::span<const double> samples, double lo,
                                              double hi, int bins_per_decade) {
  if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("fit range must satisfy 0 < lo < hi");
  if (bins_per_decade < 1) throw std::invalid_argument("bins_per_decade must be >= 1");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  std::vector<double> xs;
  std::vector<double> ys;
  const double step = std::log(10.0) / bins_per_decade;
  for (int b = 0;; ++b) {
    const double edge = lo * std::exp(step * b);
    if (edge > hi * (1.0 + 1e-12)) break;
    auto it = std::lower_bound(sorted.begin(), sorted.end(), edge);
    if (it == sorted.end() || *it > hi) continue;
    const double value = *it;
    if (!xs.empty() && value == xs.back()) continue;
    xs.push_back(value);
    ys.push_back(static_cast<double>(sorted.end() - it) / n);
  }
  if (xs.size() < 3) return std::nullopt;

  Eigen::MatrixXd design(xs.size(), 2);
  Eigen::VectorXd rhs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    design(static_cast<Eigen::Index>(i), 0) = 1.0;
    design(static_cast<Eigen::Index>(i), 1) = std::log(xs[i]);
    rhs(static_cast<Eigen::Index>(i)) = std::log(ys[i]);
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);

  PowerLawFit fit;
  fit.intercept = coef(0);
  fit.slope = coef(1);
  fit.beta = 1.0 - fit.slope;
  fit.lo = lo;
  fit.hi = hi;
  fit.points = xs.size();
  return fit;
}

double average_clustering(const WeightedDigraph& g) {
  using Index = WeightedDigraph::Index;
  const std::size_t n = g.node_count();
  if (n == 0) return 0.0;
  std::vector<std::vector<Index>> adj(n);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& le = g.local_edge(e);
    if (le.source == le.sink) continue;
    adj[le.source].push_back(le.sink);
    adj[le.sink].push_back(le.source);
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  // Orient each undirected edge from lower to higher (degree, index) rank so
  // every triangle is enumerated once.
  const auto before = [&](Index a, Index b) {
    return adj[a].size() != adj[b].size() ? adj[a].size() < adj[b].size() : a < b;
  };
  std::vector<std::vector<Index>> forward(n);
  for (Index v = 0; v < n; ++v) {
    for (Index w : adj[v]) {
      if (before(v, w)) forward[v].push_back(w);
    }
  }
  std::vector<std::uint64_t> triangles(n, 0);
  std::vector<char> mark(n, 0);
  for (Index u = 0; u < n; ++u) {
    for (Index v : forward[u]) mark[v] = 1;
    for (Index v : forward[u]) {
      for (Index w : forward[v]) {
        if (mark[w]) {
          ++triangles[u];
          ++triangles[v];
          ++triangles[w];
        }
      }
    }
    for (Index v : forward[u]) mark[v] = 0;
  }

  double sum = 0.0;
  for (Index v = 0; v < n; ++v) {
    const double d = static_cast<double>(adj[v].size());
    if (d < 2.0) continue;
    sum += static_cast<double>(triangles[v]) / (d * (d - 1.0) / 2.0);
  }
  return sum / static_cast<double>(n);
}

TopologyReport topology_report(const WeightedDigraph& g,
                               std::optional<std::pair<double, double>> fit_range) {
  TopologyReport report;
  const auto degrees = node_degrees(g);
  std::vector<double> k_in;
  std::vector<double> k_out;
  for (const auto& d : degrees) {
    if (d.k_in > 0) k_in.push_back(static_cast<double>(d.k_in));
    if (d.k_out > 0) k_out.push_back(static_cast<double>(d.k_out));
  }
  std::vector<double> weights;
  weights.reserve(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    weights.push_back(static_cast<double>(g.local_edge(e).weight));
  }
  report.in_degree_ccdf = ccdf(k_in);
  report.out_degree_ccdf = ccdf(k_out);
  report.weight_ccdf = ccdf(weights);
  report.average_clustering = average_clustering(g);
  if (fit_range) {
    report.weight_tail = fit_power_law_tail(weights, fit_range->first, fit_range->second);
  }
  return report;
}

}  // namespace rtnet
