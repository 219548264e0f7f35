#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

namespace rtnet {

struct NelderMeadResult {
  double x = 0.0;
  double fx = 0.0;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// One-dimensional Nelder-Mead on [lo, hi] with a two-point simplex
/// {x0, x1}. Reflection 1, expansion 2, contraction 1/2, shrink 1/2; every
/// trial point is projected onto the interval. Stops once the simplex is
/// narrower than `xtol`.
template <typename F>
NelderMeadResult nelder_mead_1d(F&& f, double x0, double x1, double lo, double hi, double xtol,
                                std::size_t max_iterations) {
  if (!(lo <= hi)) throw std::invalid_argument("empty search interval");
  if (!(xtol > 0.0)) throw std::invalid_argument("xtol must be positive");
  NelderMeadResult result;
  const auto project = [&](double x) { return std::clamp(x, lo, hi); };
  const auto eval = [&](double x) {
    ++result.evaluations;
    return f(x);
  };

  double b = project(x0), w = project(x1);
  double fb = eval(b), fw = eval(w);
  for (; result.iterations < max_iterations; ++result.iterations) {
    if (fw < fb || (fw == fb && w < b)) {
      std::swap(b, w);
      std::swap(fb, fw);
    }
    if (std::abs(w - b) < xtol) {
      result.converged = true;
      break;
    }
    // With two points the centroid of the non-worst vertices is b itself.
    const double r = project(b + (b - w));
    // Reflection pinned to the bound: contract towards the interior instead.
    const double fr = r == b ? fw : eval(r);
    if (r != b && fr < fb) {
      const double e = project(b + 2.0 * (b - w));
      const double fe = eval(e);
      if (fe < fr) {
        w = e;
        fw = fe;
      } else {
        w = r;
        fw = fr;
      }
      continue;
    }
    if (r != b && fr < fw) {
      const double oc = project(b + 0.5 * (r - b));
      const double foc = eval(oc);
      if (foc <= fr) {
        w = oc;
        fw = foc;
        continue;
      }
    } else {
      const double ic = project(b + 0.5 * (w - b));
      const double fic = eval(ic);
      if (fic < fw) {
        w = ic;
        fw = fic;
        continue;
      }
    }
    w = b + 0.5 * (w - b);
    fw = eval(w);
  }
  if (fw < fb) {
    std::swap(b, w);
    std::swap(fb, fw);
  }
  if (!result.converged && std::abs(w - b) < xtol) result.converged = true;
  result.x = b;
  result.fx = fb;
  return result;
}

}  // namespace rtnet
