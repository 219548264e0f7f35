#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>

#include "rtnet/follower_dynamics.hpp"

namespace rtnet {

namespace {

// Legendre polynomials P_0..P_degree at t, by the three-term recurrence.
void legendre_row(double t, int degree, Eigen::Ref<Eigen::RowVectorXd> row) {
  row(0) = 1.0;
  if (degree >= 1) row(1) = t;
  for (int k = 1; k < degree; ++k) {
    row(k + 1) = ((2.0 * k + 1.0) * t * row(k) - k * row(k - 1)) / (k + 1.0);
  }
}

}  // namespace

TrendLine trend_line(std::span<const double> x, std::span<const double> y, int degree,
                     std::size_t boxcar_width) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
  if (degree < 0) throw std::invalid_argument("degree must be non-negative");

  TrendLine result;
  result.values = boxcar_smooth(y, boxcar_width);
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n < degree + 1) return result;

  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) throw std::invalid_argument("abscissae must not all coincide");
  const auto scaled = [&](double v) { return 2.0 * (v - lo) / (hi - lo) - 1.0; };

  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> basis(n, degree + 1);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    legendre_row(scaled(x[static_cast<std::size_t>(i)]), degree, basis.row(i));
    rhs(i) = result.values[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd fitted = basis * coef;
  for (Eigen::Index i = 0; i < n; ++i) result.values[static_cast<std::size_t>(i)] = fitted(i);
  result.polynomial = true;
  return result;
}

}  // namespace rtnet
