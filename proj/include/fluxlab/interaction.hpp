#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fluxlab/constants.hpp"
#include "fluxlab/em_kernel.hpp"
#include "fluxlab/vec3.hpp"

namespace fluxlab {

enum class QuadratureRule { GaussLegendre, AdaptiveSimpson };

// Discretisation of the overlap integrals over the truncated 3D domain.
struct QuadratureSpec {
  double inner_cutoff;  // cm, excluded cylinder around the charge
  double outer_radius;  // cm, transverse truncation around the tube axis
  double z_extent;      // cm, axial half-length
  int points_per_dim = 16;
  QuadratureRule rule = QuadratureRule::GaussLegendre;

  void validate() const;
};

// cutoff = tube_radius/100, outer_radius = z_extent = 100 x separation.
QuadratureSpec default_quadrature(const ChargeState& charge, const FluxonState& fluxon);

struct FluxSample {
  Vec3 position;  // cm
  double Bz;      // G
  double area;    // cm^2
};

// Discretised flux cross-section. Keeps the total flux alongside the samples
// and checks the two agree.
class FluxDistribution {
 public:
  explicit FluxDistribution(std::vector<FluxSample> samples,
                            std::optional<double> declared_total = std::nullopt);

  const std::vector<FluxSample>& samples() const { return samples_; }
  double total_flux() const { return total_flux_; }
  // Flux-weighted centre; falls back to the area centroid when the net flux is zero.
  Vec3 centroid() const;
  // Smallest sqrt(area); a rough sample spacing.
  double min_spacing() const;

 private:
  std::vector<FluxSample> samples_;
  double total_flux_;
};

// Header `x_cm,y_cm,Bz_G,area_cm2`, exact names required.
FluxDistribution read_flux_distribution_csv(std::istream& in);
FluxDistribution read_flux_distribution_csv(const std::string& path);
void write_flux_distribution_csv(std::ostream& out, const FluxDistribution& dist);

// Uniform field over a disk, cut into exactly `sample_count` cells on
// concentric rings of equal width.
FluxDistribution uniform_disk_distribution(const Vec3& center, double radius, double total_flux,
                                           int sample_count);

// Pi = e Phi / (2 pi c |r - R|) phi_hat, phi_hat = z_hat x (r - R)/|r - R|.
Vec3 field_momentum_closed(double e, double flux, const Vec3& r, const Vec3& R,
                           const PhysicalConstants& k = codata());

// Closed form for an axisymmetric tube: the flux enclosed within |r - R|
// replaces Phi. Identical to field_momentum_closed outside the tube.
Vec3 field_momentum_tube(double e, const FluxonState& fluxon, const Vec3& r,
                         const PhysicalConstants& k = codata());

struct MomentumResult {
  Vec3 value;               // g cm/s
  double truncation_error;  // domain truncation (z and transverse)
  double cutoff_error;      // excluded cylinder around the charge
  double quadrature_error;  // rule error, from a coarser companion rule
  double error_estimate() const { return truncation_error + cutoff_error + quadrature_error; }
};

// (1/4 pi c) Integral E_charge x B_fluxon d^3x by 3D quadrature. Requires a
// finite tube and the charge more than tube_radius/10 off the axis. Throws
// NonConvergenceError when the truncation estimate exceeds 1% of |Pi|.
MomentumResult field_momentum_numeric(const ChargeState& charge, const FluxonState& fluxon,
                                      const QuadratureSpec& quad,
                                      const PhysicalConstants& k = codata());

// Sum over flux samples of e Bz dA / (2 pi c |r - R_i|) phi_hat_i.
Vec3 field_momentum_distributed(double e, const FluxDistribution& dist, const Vec3& r,
                                const PhysicalConstants& k = codata());

// A = Phi / (2 pi |x - R|) phi_hat.
Vec3 vector_potential_symmetric(double flux, const Vec3& R, const Vec3& x);

enum class LagrangianMethod { ClosedForm, NumericOverlap };

struct LagrangianResult {
  double value;      // erg
  double tolerance;  // zero for the closed form
};

// L_int = (rdot - Rdot).Pi (closed form) or the volume integral of
// (B_e.B_f - E_e.E_f)/4pi (numeric overlap).
LagrangianResult interaction_lagrangian(const ChargeState& charge, const FluxonState& fluxon,
                                        LagrangianMethod method,
                                        const PhysicalConstants& k = codata());
LagrangianResult interaction_lagrangian(const ChargeState& charge, const FluxonState& fluxon,
                                        LagrangianMethod method, const QuadratureSpec& quad,
                                        const PhysicalConstants& k = codata());

struct ConvergencePoint {
  double tube_radius;
  MomentumResult numeric;
  double relative_error;  // |numeric - closed| / |closed|
};

struct ConvergenceStudy {
  Vec3 closed;
  std::vector<ConvergencePoint> points;  // in the order of the requested fractions
  Vec3 richardson;                       // s^2 extrapolation from the last two points
  double richardson_relative_error;
};

// Numeric Pi for tube radii fraction * separation with default truncations.
ConvergenceStudy overlap_convergence(const ChargeState& charge, const FluxonState& fluxon,
                                     std::span<const double> tube_fractions, int points_per_dim,
                                     const PhysicalConstants& k = codata());

}  // namespace fluxlab
