#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fluxlab/errors.hpp"
#include "fluxlab/vec3.hpp"

namespace fluxlab::quad {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Vec3& v) { return norm(v); }

// n-point Gauss-Legendre on [a, b].
template <class T, class F>
T gauss(const GaussRule& rule, F&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  T sum{};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += f(mid + half * rule.nodes[i]) * rule.weights[i];
  }
  return sum * half;
}

namespace detail {

template <class T, class F>
T simpson_step(F& f, double a, double b, const T& fa, const T& fm, const T& fb, const T& whole,
               double rel_tol, double abs_tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const T flm = f(lm);
  const T frm = f(rm);
  const T left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
  const T right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
  const T both = left + right;
  const T diff = both - whole;
  if (depth <= 0 || magnitude(diff) <= 15.0 * std::max(rel_tol * magnitude(both), abs_tol)) {
    return both + diff / 15.0;
  }
  return simpson_step<T>(f, a, m, fa, flm, fm, left, rel_tol, 0.5 * abs_tol, depth - 1) +
         simpson_step<T>(f, m, b, fm, frm, fb, right, rel_tol, 0.5 * abs_tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson with Richardson correction. The interval is first cut into
// `pieces` equal parts; recursion stops at `max_depth` regardless of tolerance.
template <class T, class F>
T adaptive_simpson(F&& f, double a, double b, int pieces, double rel_tol, double abs_tol = 0.0,
                   int max_depth = 18) {
  T sum{};
  const double h = (b - a) / pieces;
  for (int i = 0; i < pieces; ++i) {
    const double lo = a + i * h;
    const double hi = (i + 1 == pieces) ? b : lo + h;
    const T flo = f(lo);
    const T fmid = f(0.5 * (lo + hi));
    const T fhi = f(hi);
    const T whole = (flo + fmid * 4.0 + fhi) * ((hi - lo) / 6.0);
    sum += detail::simpson_step<T>(f, lo, hi, flo, fmid, fhi, whole, rel_tol, abs_tol / pieces,
                                   max_depth);
  }
  return sum;
}

struct PeriodicResult {
  double value;
  double error;     // |last - previous| estimate
  std::size_t points;
};

// Trapezoid rule on one period [0, 2pi) with point doubling until successive
// estimates agree to rel_tol (or abs_tol). Spectrally accurate for smooth
// periodic integrands. Throws NonConvergenceError past max_points.
template <class F>
PeriodicResult periodic_trapezoid(F&& f, double rel_tol, double abs_tol = 0.0,
                                  std::size_t start_points = 64,
                                  std::size_t max_points = std::size_t{1} << 22) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  std::size_t n = start_points;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += f(two_pi * static_cast<double>(i) / n);
  double estimate = sum * two_pi / n;
  while (true) {
    // The doubled grid reuses every old node; only the midpoints are new.
    double mids = 0.0;
    for (std::size_t i = 0; i < n; ++i) mids += f(two_pi * (static_cast<double>(i) + 0.5) / n);
    sum += mids;
    n *= 2;
    const double refined = sum * two_pi / n;
    const double err = std::abs(refined - estimate);
    if (err <= std::max(rel_tol * std::abs(refined), abs_tol)) return {refined, err, n};
    if (n >= max_points) {
      throw NonConvergenceError("periodic trapezoid did not converge", err);
    }
    estimate = refined;
  }
}

}  // namespace fluxlab::quad
