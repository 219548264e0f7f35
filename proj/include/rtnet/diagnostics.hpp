#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rtnet/graph.hpp"

namespace rtnet {

/// Complementary cumulative distribution evaluated at each distinct value:
/// fraction of samples >= value.
struct CcdfPoint {
  double value = 0.0;
  double fraction = 0.0;
};

std::vector<CcdfPoint> ccdf(std::span<const double> samples);

/// Least-squares line through log-log CCDF points taken on a logarithmic grid
/// inside [lo, hi]. For a density ~ x^-beta the CCDF slope is 1 - beta.
struct PowerLawFit {
  double beta = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 0;
};

/// Returns nullopt when fewer than three distinct tail points fall in range.
std::optional<PowerLawFit> fit_power_law_tail(std::span<const double> samples, double lo,
                                              double hi, int bins_per_decade = 10);

/// Average local clustering over the undirected, unweighted projection
/// (self-loops ignored; nodes of degree < 2 contribute 0).
double average_clustering(const WeightedDigraph& g);

struct TopologyReport {
  std::vector<CcdfPoint> in_degree_ccdf;
  std::vector<CcdfPoint> out_degree_ccdf;
  std::vector<CcdfPoint> weight_ccdf;
  double average_clustering = 0.0;
  std::optional<PowerLawFit> weight_tail;
};

/// The weight-tail fit is attempted only when `fit_range` is given.
TopologyReport topology_report(const WeightedDigraph& g,
                               std::optional<std::pair<double, double>> fit_range = std::nullopt);

}  // namespace rtnet
