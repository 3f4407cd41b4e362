#pragma once

#include <array>

#include "fluxlab/constants.hpp"
#include "fluxlab/vec3.hpp"

namespace fluxlab {

// Moving point charge in the z = 0 plane.
struct ChargeState {
  Vec3 position;   // cm
  Vec3 velocity;   // cm/s
  double charge;   // statC
  double mass;     // g
};

enum class TubeProfile { PointLimit, UniformDisk, GaussianTube };

// Straight flux tube along z, piercing the plane at `position`.
struct FluxonState {
  Vec3 position;             // cm
  Vec3 velocity;             // cm/s
  double flux;               // maxwell
  double mass;               // g
  double tube_radius = 0.0;  // cm; disk radius or Gaussian width
  TubeProfile profile = TubeProfile::PointLimit;
};

struct FieldSample {
  Vec3 E;  // statV/cm
  Vec3 B;  // G
};

// Throw InvalidArgument when a state breaks its invariants
// (|v| < c, mass > 0, finite planar data, tube radius rules).
void validate(const ChargeState& charge, const PhysicalConstants& k = codata());
void validate(const FluxonState& fluxon, const PhysicalConstants& k = codata());

// Quasi-static fields of the charge: Coulomb E plus B = v x E / c.
// Throws SingularityError at the source point.
FieldSample charge_fields(const ChargeState& charge, const Vec3& x,
                          const PhysicalConstants& k = codata());

// Tube field B = B_z(rho) z_hat and motional E = -V x B / c. A PointLimit
// fluxon has no field off its axis; on the axis it throws SingularityError.
FieldSample fluxon_fields(const FluxonState& fluxon, const Vec3& x,
                          const PhysicalConstants& k = codata());

// Axial field of the tube profile at planar distance rho from its axis.
double tube_field(const FluxonState& fluxon, double rho);

// Flux threading a disk of radius rho centred on the tube axis.
double enclosed_tube_flux(const FluxonState& fluxon, double rho);

// Cross-term energy density (B1.B2 - E1.E2)/4pi, erg/cm^3.
double scalar_density(const FieldSample& f1, const FieldSample& f2);

// Field transformation into a frame moving with velocity beta*c.
// Throws InvalidArgument unless |beta| < 1.
FieldSample boost_fields(const FieldSample& f, const Vec3& beta);

// Contravariant F^{mu nu} with metric (+,-,-,-): F^{0i} = -E_i, F^{ij} = -eps_ijk B_k.
using FieldTensor = std::array<std::array<double, 4>, 4>;
FieldTensor field_tensor(const FieldSample& f);

// F1_{mu nu} F2^{mu nu}, indices lowered with the Minkowski metric.
double tensor_contraction(const FieldTensor& f1, const FieldTensor& f2);

}  // namespace fluxlab
