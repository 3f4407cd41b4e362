#pragma once

// Volume quadrature over the straight-tube geometry shared by the numeric
// field-momentum and overlap-Lagrangian routes.
//
// Transverse plane: polar coordinates about the tube axis, split into radial
// and angular panels. Panels are graded geometrically toward the charge when
// it sits inside or near the tube support so that the 1/d kernel singularity
// lands on panel corners.
// Axial direction: z = d tan(t) with d the transverse distance to the charge,
// which turns the Coulomb profile d/(d^2 + z^2)^{3/2} into cos(t)/d.

#include <algorithm>
#include <cmath>
#include <vector>

#include "fluxlab/em_kernel.hpp"
#include "fluxlab/interaction.hpp"
#include "fluxlab/quadrature.hpp"

namespace fluxlab::detail {

struct OverlapGeometry {
  double rho_charge;    // charge distance from the tube axis
  double theta_charge;  // its polar angle about the axis
  double rho_max;       // transverse integration radius
  std::vector<double> radial_edges;
  std::vector<double> angular_edges;
};

inline double profile_support(const FluxonState& f) {
  switch (f.profile) {
    case TubeProfile::UniformDisk:
      return f.tube_radius;
    case TubeProfile::GaussianTube:
      return 12.0 * f.tube_radius;  // exp(-72) of the peak field beyond
    case TubeProfile::PointLimit:
      break;
  }
  return 0.0;
}

inline void add_graded(std::vector<double>& edges, double centre, double span, double lo,
                       double hi) {
  for (int kx = 0; kx <= 12; ++kx) {
    const double off = span * std::ldexp(1.0, -kx);
    for (double e : {centre - off, centre + off}) {
      if (e > lo && e < hi) edges.push_back(e);
    }
  }
  if (centre > lo && centre < hi) edges.push_back(centre);
}

inline void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(),
                      [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::abs(b); }),
          v.end());
}

inline OverlapGeometry overlap_geometry(const ChargeState& q, const FluxonState& f,
                                        const QuadratureSpec& spec) {
  OverlapGeometry g;
  const Vec3 d = q.position - f.position;
  g.rho_charge = std::hypot(d.x, d.y);
  g.theta_charge = std::atan2(d.y, d.x);
  g.rho_max = std::min(spec.outer_radius, profile_support(f));

  const double s = f.tube_radius;
  std::vector<double> fractions;
  if (f.profile == TubeProfile::GaussianTube) {
    fractions = {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 7.0, 8.0,
                 10.0, 12.0};
  } else {
    fractions = {0.0, 0.25, 0.5, 0.75, 1.0};
  }
  for (double fr : fractions) {
    if (fr * s < g.rho_max) g.radial_edges.push_back(fr * s);
  }
  g.radial_edges.push_back(g.rho_max);
  if (g.rho_charge < g.rho_max) {
    add_graded(g.radial_edges, g.rho_charge, g.rho_charge, 0.0, g.rho_max);
  }
  sort_unique(g.radial_edges);

  const double t0 = g.theta_charge;
  if (g.rho_charge < 2.0 * g.rho_max) {
    g.angular_edges = {t0 - pi, t0 + pi};
    add_graded(g.angular_edges, t0, pi, t0 - pi, t0 + pi);
  } else {
    for (int i = 0; i <= 16; ++i) g.angular_edges.push_back(t0 - pi + i * (2.0 * pi / 16.0));
  }
  sort_unique(g.angular_edges);
  return g;
}

// One-dimensional rule selected by the spec: fixed Gauss-Legendre per panel,
// or adaptive Simpson started from two pieces per panel.
template <class T, class F>
T integrate_panel(QuadratureRule rule, const quad::GaussRule& gl, double simpson_tol, F&& f,
                  double a, double b) {
  if (rule == QuadratureRule::GaussLegendre) return quad::gauss<T>(gl, f, a, b);
  return quad::adaptive_simpson<T>(f, a, b, 2, simpson_tol, 0.0, 14);
}

// Integral over the truncated tube domain of integrand(x), x a 3D point.
// Points within spec.inner_cutoff of the charge line are excluded.
template <class T, class F>
T integrate_overlap(const ChargeState& q, const FluxonState& f, const QuadratureSpec& spec,
                    const OverlapGeometry& g, int points, double simpson_tol, F&& integrand) {
  const quad::GaussRule gl = quad::gauss_legendre(points);
  const QuadratureRule rule = spec.rule;
  const double Z = spec.z_extent;
  const double cutoff = spec.inner_cutoff;

  auto axial = [&](double x, double y) -> T {
    const double d = std::hypot(x - q.position.x, y - q.position.y);
    if (d <= cutoff || d == 0.0) return T{};
    const double t_max = std::atan(Z / d);
    auto fz = [&](double t) -> T {
      const double c = std::cos(t);
      return integrand(Vec3{x, y, d * std::tan(t)}) * (d / (c * c));
    };
    return integrate_panel<T>(rule, gl, simpson_tol, fz, -t_max, 0.0) +
           integrate_panel<T>(rule, gl, simpson_tol, fz, 0.0, t_max);
  };
  auto angular = [&](double rho) -> T {
    T sum{};
    for (std::size_t j = 0; j + 1 < g.angular_edges.size(); ++j) {
      sum += integrate_panel<T>(
          rule, gl, simpson_tol,
          [&](double th) {
            return axial(f.position.x + rho * std::cos(th), f.position.y + rho * std::sin(th));
          },
          g.angular_edges[j], g.angular_edges[j + 1]);
    }
    return sum * rho;
  };
  T total{};
  for (std::size_t i = 0; i + 1 < g.radial_edges.size(); ++i) {
    total += integrate_panel<T>(rule, gl, simpson_tol, angular, g.radial_edges[i],
                                g.radial_edges[i + 1]);
  }
  return total;
}

}  // namespace fluxlab::detail
