#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fluxlab/constants.hpp"
#include "fluxlab/interaction.hpp"
#include "fluxlab/vec3.hpp"

namespace fluxlab {

// Planar polygon. A closed loop stores each vertex once; the closing edge
// runs from the last vertex back to the first.
class LoopPath {
 public:
  // Drops a trailing copy of the first vertex. Throws InvalidArgument for
  // fewer than three vertices, repeated consecutive vertices, non-planar or
  // non-finite points, or refinement < 1.
  explicit LoopPath(std::vector<Vec3> vertices, bool closed = true, int refinement = 1);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  bool closed() const { return closed_; }
  // Initial subsegments per edge for the line quadrature.
  int refinement() const { return refinement_; }
  std::size_t edge_count() const { return closed_ ? vertices_.size() : vertices_.size() - 1; }
  Vec3 edge_start(std::size_t i) const { return vertices_[i]; }
  Vec3 edge_end(std::size_t i) const { return vertices_[(i + 1) % vertices_.size()]; }

 private:
  std::vector<Vec3> vertices_;
  bool closed_;
  int refinement_;
};

// Dense polygons standing in for smooth curves. Negative turns run clockwise.
LoopPath circle_loop(const Vec3& center, double radius, int vertices, int turns = 1);
LoopPath ellipse_loop(const Vec3& center, double semi_major, double semi_minor, double rotation,
                      int vertices);
LoopPath square_loop(const Vec3& center, double half_side, double rotation);
// Star-shaped polygon with vertex i at angle 2 pi i/n and distance radii[i].
LoopPath star_loop(const Vec3& center, std::span<const double> radii);
// Loop a, then loop b, joined through a spur from a's first vertex to b's
// first vertex that is traversed once in each direction.
LoopPath concatenate(const LoopPath& a, const LoopPath& b);

// Header `x_cm,y_cm`, one vertex per row.
LoopPath read_loop_csv(std::istream& in);
LoopPath read_loop_csv(const std::string& path);

// Pi(x) felt by the moving particle at x, plus the points the loop must avoid.
struct MomentumProvider {
  std::function<Vec3(const Vec3&)> momentum;
  std::vector<Vec3> singular_points;
  double exclusion_radius = 0.0;  // cm
};

// Charge moving around a static point fluxon at R.
MomentumProvider point_fluxon_momentum(double e, double flux, const Vec3& R,
                                       const PhysicalConstants& k = codata());
// Charge moving around a flux distribution. exclusion_radius < 0 selects
// 1% of the smallest sample spacing.
MomentumProvider distributed_momentum(double e, const FluxDistribution& dist,
                                      const PhysicalConstants& k = codata(),
                                      double exclusion_radius = -1.0);
// Fluxon moving around a static charge at r: the phase integrand is
// -Rdot.Pi(r - R), i.e. momentum -Pi(r - x).
MomentumProvider fluxon_loop_momentum(double e, double flux, const Vec3& charge_position,
                                      const PhysicalConstants& k = codata());

// (1/hbar) loop integral of Pi.dr with per-edge adaptive Gauss-Legendre:
// subsegments are bisected until the two estimates agree to 1e-8 relative.
// Throws SingularityError if the loop enters a singular exclusion and
// NonConvergenceError past 20 bisection levels.
double ab_phase(const LoopPath& loop, const MomentumProvider& pi_field,
                const PhysicalConstants& k = codata());

// e Phi / (hbar c), the phase of one counterclockwise turn.
double phase_quantum(double e, double flux, const PhysicalConstants& k = codata());

// Signed turns of the loop about point. Throws AmbiguityError when the point
// lies on the loop.
int winding_number(const LoopPath& loop, const Vec3& point);

// Sum of winding x Bz x area over the samples.
double enclosed_flux(const LoopPath& loop, const FluxDistribution& dist);

// phase / 2 pi reduced to [0, 1).
double fringe_shift(double phase);

}  // namespace fluxlab
