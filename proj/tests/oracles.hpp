#pragma once

// Test-only reference computations: grid/golden-section minimizers, nested
// low-dimensional searches and finite differences. These stay independent of
// the library's solver paths so they can certify them.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "tvopt/common.hpp"

namespace oracles {

using tvopt::Matrix;
using tvopt::Rng;
using tvopt::Vector;

/// Coarse grid scan followed by golden-section refinement; exact enough for
/// strictly convex objectives (the refinement converges to machine precision).
inline double min_scalar(const std::function<double(double)>& f, double lo,
                         double hi, int grid = 201, int iters = 200) {
  double best_x = lo, best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    double x = lo + (hi - lo) * i / (grid - 1);
    double v = f(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  double span = (hi - lo) / (grid - 1);
  double a = std::max(lo, best_x - 2.0 * span);
  double b = std::min(hi, best_x + 2.0 * span);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

/// Nested search: valid because partial minimization of a strictly convex
/// function is convex in the remaining variable.
inline Vector min_2d(const std::function<double(double, double)>& f, double lo,
                     double hi) {
  auto inner = [&](double x) {
    return min_scalar([&](double y) { return f(x, y); }, lo, hi);
  };
  double x = min_scalar([&](double u) { return f(u, inner(u)); }, lo, hi, 121, 120);
  double y = inner(x);
  Vector out(2);
  out << x, y;
  return out;
}

/// Separable prox objective solved coordinate by coordinate.
inline Vector min_separable(
    const std::function<double(int, double)>& coordinate_objective, int dim,
    double lo, double hi) {
  Vector out(dim);
  for (int i = 0; i < dim; ++i)
    out[i] = min_scalar([&](double x) { return coordinate_objective(i, x); }, lo, hi);
  return out;
}

inline Vector central_difference_gradient(
    const std::function<double(const Vector&)>& f, const Vector& x,
    double step = 1e-6) {
  Vector g(x.size());
  Vector probe = x;
  for (long i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    double fp = f(probe);
    probe[i] = x[i] - step;
    double fm = f(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

inline double slope_r_squared(const std::vector<double>& xs,
                              const std::vector<double>& ys, double* slope_out) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  double cov = sxy - sx * sy / n;
  double vx = sxx - sx * sx / n;
  double vy = syy - sy * sy / n;
  if (slope_out) *slope_out = cov / vx;
  if (vy <= 0.0) return 1.0;
  return (cov * cov) / (vx * vy);
}

}  // namespace oracles
