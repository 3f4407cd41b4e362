#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "fluxlab/constants.hpp"
#include "fluxlab/em_kernel.hpp"
#include "fluxlab/vec3.hpp"

namespace fluxlab {

// Canonical variables of the planar charge-fluxon system.
struct CanonicalState {
  Vec3 r;  // charge position, cm
  Vec3 R;  // fluxon position, cm
  Vec3 p;  // charge canonical momentum, g cm/s
  Vec3 P;  // fluxon canonical momentum, g cm/s
  double t = 0.0;
};

struct KineticVelocities {
  Vec3 charge;  // rdot = (p - Pi)/m
  Vec3 fluxon;  // Rdot = (P + Pi)/M
};

struct StepDiagnostics {
  double energy;
  double accel_charge;        // |r''| by finite differences of rdot
  double accel_fluxon;        // |R''|
  double third_law_residual;  // |m r'' + M R''|
};

struct Trajectory {
  std::vector<CanonicalState> states;
  std::vector<KineticVelocities> kinetic_velocities;
  std::vector<StepDiagnostics> diagnostics;
};

enum class Integrator { RK4, StormerVerlet };

struct SimulationOptions {
  // Relative separation below which a step is refused. Zero selects
  // 1e-6 of the initial separation.
  double exclusion_radius = 0.0;
  // Relative change of H after which the run is abandoned with
  // NonConvergenceError (the step no longer resolves the path). Off by default.
  double max_energy_drift = std::numeric_limits<double>::infinity();
};

// The charge and fluxon arguments supply e, m, Phi, M and the tube profile;
// their positions and velocities are ignored in favour of the canonical state.
// Pi is the enclosed-flux closed form, which is the point-flux Pi outside the tube.

// H = (p - Pi)^2/2m + (P + Pi)^2/2M with Pi = Pi(r - R).
double hamiltonian(const CanonicalState& s, const ChargeState& charge, const FluxonState& fluxon,
                   const PhysicalConstants& k = codata());

KineticVelocities kinetic_velocities(const CanonicalState& s, const ChargeState& charge,
                                     const FluxonState& fluxon,
                                     const PhysicalConstants& k = codata());

// Canonical state matching the positions and velocities stored in charge and fluxon.
CanonicalState canonical_state(const ChargeState& charge, const FluxonState& fluxon,
                               const PhysicalConstants& k = codata());

// Step size keeping the change of Pi per step under 1e-3 of the larger
// kinetic momentum, evaluated at the closest approach of the current
// straight relative path.
double default_time_step(const CanonicalState& s, const ChargeState& charge,
                         const FluxonState& fluxon, const PhysicalConstants& k = codata());

// One step of size dt. Throws SingularityError when the relative position
// passes within the exclusion radius of the fluxon axis.
CanonicalState step(const CanonicalState& s, double dt, const ChargeState& charge,
                    const FluxonState& fluxon, Integrator integrator,
                    const PhysicalConstants& k = codata(), double exclusion_radius = 0.0);

// Integrates over [t0, t0 + T] with ceil(T/dt) uniform steps (so the used
// step never exceeds dt) and fills the per-step diagnostics.
Trajectory simulate(const CanonicalState& initial, double T, double dt, const ChargeState& charge,
                    const FluxonState& fluxon, Integrator integrator,
                    const SimulationOptions& options = {}, const PhysicalConstants& k = codata());

struct ForceReport {
  double max_accel_charge;
  double max_accel_fluxon;
  double max_third_law_residual;
  double energy_drift;              // max |H - H0| / |H0| (absolute when H0 = 0)
  double momentum_drift;            // max |m rdot + M Rdot - initial|
  double max_canonical_residual;    // max |p - m rdot - Pi| + |P - M Rdot + Pi|
};

// Requires at least three recorded states.
ForceReport force_diagnostics(const Trajectory& traj, const ChargeState& charge,
                              const FluxonState& fluxon, const PhysicalConstants& k = codata());

// Columns t,rx,ry,Rx,Ry,px,py,Px,Py,H.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace fluxlab
