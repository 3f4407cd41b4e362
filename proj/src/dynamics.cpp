#include "fluxlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "fluxlab/errors.hpp"
#include "fluxlab/interaction.hpp"

namespace fluxlab {
namespace {

// Pi(u) = kappa h(|u|^2) (z_hat x u); h and dh/dq for each tube profile.
struct RadialFactor {
  double h;
  double dh;
};

// d/dx of (1 - exp(-x))/x.
double gaussian_factor_slope(double x) {
  if (x < 0.5) {
    double term = 1.0;  // x^{n-1}/(n+1)!, starting at n = 1
    double fact = 2.0;
    double sum = 0.0;
    for (int n = 1; n < 30; ++n) {
      sum += ((n % 2) ? -1.0 : 1.0) * n * term / fact;
      term *= x;
      fact *= (n + 2);
    }
    return sum;
  }
  return (std::exp(-x) * (1.0 + x) - 1.0) / (x * x);
}

RadialFactor radial_factor(const FluxonState& f, double q) {
  const double w = f.tube_radius;
  switch (f.profile) {
    case TubeProfile::UniformDisk:
      if (q < w * w) return {1.0 / (w * w), 0.0};
      break;
    case TubeProfile::GaussianTube: {
      const double two_s2 = 2.0 * w * w;
      const double x = q / two_s2;
      const double phi = x == 0.0 ? 1.0 : -std::expm1(-x) / x;
      return {phi / two_s2, gaussian_factor_slope(x) / (two_s2 * two_s2)};
    }
    case TubeProfile::PointLimit:
      break;
  }
  return {1.0 / q, -1.0 / (q * q)};
}

struct MomentumField {
  Vec3 Pi;
  double jac[2][2];  // jac[i][j] = d Pi_j / d u_i
};

MomentumField momentum_field(const Vec3& u, const ChargeState& q, const FluxonState& f,
                             const PhysicalConstants& k) {
  const double rho2 = u.x * u.x + u.y * u.y;
  if (rho2 == 0.0) throw SingularityError("trajectory reached the fluxon axis");
  const double kappa = q.charge * f.flux / (2.0 * pi * k.c);
  const auto [h, dh] = radial_factor(f, rho2);
  const double zx[2] = {-u.y, u.x};  // z_hat x u
  const double ui[2] = {u.x, u.y};
  static constexpr double dzx[2][2] = {{0.0, 1.0}, {-1.0, 0.0}};
  MomentumField m;
  m.Pi = Vec3{zx[0], zx[1], 0.0} * (kappa * h);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      m.jac[i][j] = kappa * (2.0 * ui[i] * dh * zx[j] + h * dzx[i][j]);
    }
  }
  return m;
}

struct Derivative {
  Vec3 rdot;
  Vec3 Rdot;
  Vec3 pdot;  // Pdot = -pdot
};

Derivative derivative(const Vec3& r, const Vec3& R, const Vec3& p, const Vec3& P,
                      const ChargeState& q, const FluxonState& f, const PhysicalConstants& k) {
  const auto m = momentum_field(r - R, q, f, k);
  Derivative d;
  d.rdot = (p - m.Pi) / q.mass;
  d.Rdot = (P + m.Pi) / f.mass;
  const Vec3 w = d.rdot - d.Rdot;
  d.pdot = {m.jac[0][0] * w.x + m.jac[0][1] * w.y, m.jac[1][0] * w.x + m.jac[1][1] * w.y, 0.0};
  return d;
}

double segment_distance_to_origin(const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = norm2(ab);
  double t = len2 > 0.0 ? -dot(a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(a + ab * t);
}

CanonicalState rk4_step(const CanonicalState& s, double dt, const ChargeState& q,
                        const FluxonState& f, const PhysicalConstants& k) {
  const auto k1 = derivative(s.r, s.R, s.p, s.P, q, f, k);
  const double h2 = 0.5 * dt;
  const auto k2 = derivative(s.r + k1.rdot * h2, s.R + k1.Rdot * h2, s.p + k1.pdot * h2,
                             s.P - k1.pdot * h2, q, f, k);
  const auto k3 = derivative(s.r + k2.rdot * h2, s.R + k2.Rdot * h2, s.p + k2.pdot * h2,
                             s.P - k2.pdot * h2, q, f, k);
  const auto k4 = derivative(s.r + k3.rdot * dt, s.R + k3.Rdot * dt, s.p + k3.pdot * dt,
                             s.P - k3.pdot * dt, q, f, k);
  const double w = dt / 6.0;
  CanonicalState out;
  out.r = s.r + (k1.rdot + k2.rdot * 2.0 + k3.rdot * 2.0 + k4.rdot) * w;
  out.R = s.R + (k1.Rdot + k2.Rdot * 2.0 + k3.Rdot * 2.0 + k4.Rdot) * w;
  const Vec3 dp = (k1.pdot + k2.pdot * 2.0 + k3.pdot * 2.0 + k4.pdot) * w;
  out.p = s.p + dp;
  out.P = s.P - dp;
  out.t = s.t + dt;
  return out;
}

bool settled(const Vec3& a, const Vec3& b, double scale) {
  return norm(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() * scale;
}

// Generalised Stormer-Verlet for non-separable H (symplectic, second order):
//   p_half = p - dt/2 grad_q H(p_half, q)
//   q'     = q + dt/2 (grad_p H(p_half, q) + grad_p H(p_half, q'))
//   p'     = p_half - dt/2 grad_q H(p_half, q')
// grad_r H = -pdot, grad_R H = +pdot.
CanonicalState stormer_verlet_step(const CanonicalState& s, double dt, const ChargeState& q,
                                   const FluxonState& f, const PhysicalConstants& k) {
  constexpr int kMaxIterations = 100;
  const double h2 = 0.5 * dt;

  Vec3 p_half = s.p;
  Vec3 P_half = s.P;
  bool done = false;
  for (int it = 0; it < kMaxIterations && !done; ++it) {
    const auto d = derivative(s.r, s.R, p_half, P_half, q, f, k);
    const Vec3 np = s.p + d.pdot * h2;
    const Vec3 nP = s.P - d.pdot * h2;
    const double scale = norm(np) + norm(nP) + norm(d.pdot) * dt;
    done = settled(np, p_half, scale) && settled(nP, P_half, scale);
    p_half = np;
    P_half = nP;
  }
  if (!done) throw NonConvergenceError("Stormer-Verlet momentum half step did not converge", 0.0);

  const auto d0 = derivative(s.r, s.R, p_half, P_half, q, f, k);
  Vec3 r1 = s.r + d0.rdot * dt;
  Vec3 R1 = s.R + d0.Rdot * dt;
  done = false;
  for (int it = 0; it < kMaxIterations && !done; ++it) {
    const auto d1 = derivative(r1, R1, p_half, P_half, q, f, k);
    const Vec3 nr = s.r + (d0.rdot + d1.rdot) * h2;
    const Vec3 nR = s.R + (d0.Rdot + d1.Rdot) * h2;
    const double scale = norm(nr) + norm(nR) + (norm(d0.rdot) + norm(d0.Rdot)) * dt;
    done = settled(nr, r1, scale) && settled(nR, R1, scale);
    r1 = nr;
    R1 = nR;
  }
  if (!done) throw NonConvergenceError("Stormer-Verlet position step did not converge", 0.0);

  const auto d1 = derivative(r1, R1, p_half, P_half, q, f, k);
  CanonicalState out;
  out.r = r1;
  out.R = R1;
  out.p = p_half + d1.pdot * h2;
  out.P = P_half - d1.pdot * h2;
  out.t = s.t + dt;
  return out;
}

}  // namespace

double hamiltonian(const CanonicalState& s, const ChargeState& charge, const FluxonState& fluxon,
                   const PhysicalConstants& k) {
  const auto v = kinetic_velocities(s, charge, fluxon, k);
  return 0.5 * charge.mass * norm2(v.charge) + 0.5 * fluxon.mass * norm2(v.fluxon);
}

KineticVelocities kinetic_velocities(const CanonicalState& s, const ChargeState& charge,
                                     const FluxonState& fluxon, const PhysicalConstants& k) {
  FluxonState at = fluxon;
  at.position = s.R;
  const Vec3 Pi = field_momentum_tube(charge.charge, at, s.r, k);
  return {(s.p - Pi) / charge.mass, (s.P + Pi) / fluxon.mass};
}

CanonicalState canonical_state(const ChargeState& charge, const FluxonState& fluxon,
                               const PhysicalConstants& k) {
  validate(charge, k);
  validate(fluxon, k);
  const Vec3 Pi = field_momentum_tube(charge.charge, fluxon, charge.position, k);
  return {charge.position, fluxon.position, charge.velocity * charge.mass + Pi,
          fluxon.velocity * fluxon.mass - Pi, 0.0};
}

double default_time_step(const CanonicalState& s, const ChargeState& charge,
                         const FluxonState& fluxon, const PhysicalConstants& k) {
  const Vec3 u = s.r - s.R;
  const auto v = kinetic_velocities(s, charge, fluxon, k);
  const Vec3 w = v.charge - v.fluxon;
  const double speed = norm(w);
  // Closest approach of the straight relative path, if it is still ahead.
  double rho = std::hypot(u.x, u.y);
  if (speed > 0.0 && dot(u, w) < 0.0) rho = std::abs(u.x * w.y - u.y * w.x) / speed;
  const double kappa = std::abs(charge.charge * fluxon.flux) / (2.0 * pi * k.c);
  // |dPi/dt| <= kappa |w| / rho^2 off the tube.
  const double rate = kappa * speed / (rho * rho);
  const double p = std::max(charge.mass * norm(v.charge), fluxon.mass * norm(v.fluxon));
  if (rate == 0.0 || p == 0.0) return speed > 0.0 ? 1e-3 * rho / speed : 1.0;
  return 1e-3 * p / rate;
}

CanonicalState step(const CanonicalState& s, double dt, const ChargeState& charge,
                    const FluxonState& fluxon, Integrator integrator, const PhysicalConstants& k,
                    double exclusion_radius) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  CanonicalState out = integrator == Integrator::RK4
                           ? rk4_step(s, dt, charge, fluxon, k)
                           : stormer_verlet_step(s, dt, charge, fluxon, k);
  const double closest = segment_distance_to_origin(s.r - s.R, out.r - out.R);
  if (closest <= exclusion_radius || !is_finite(out.r) || !is_finite(out.p)) {
    throw SingularityError("step passes within the exclusion radius of the fluxon at t = " +
                           std::to_string(s.t));
  }
  return out;
}

Trajectory simulate(const CanonicalState& initial, double T, double dt, const ChargeState& charge,
                    const FluxonState& fluxon, Integrator integrator,
                    const SimulationOptions& options, const PhysicalConstants& k) {
  if (!(T > 0.0) || !(dt > 0.0)) throw InvalidArgument("duration and time step must be positive");
  if (!(charge.mass > 0.0) || !(fluxon.mass > 0.0)) throw InvalidArgument("masses must be positive");
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt * (1.0 - 1e-12)));
  const double h = T / static_cast<double>(steps);
  const double exclusion = options.exclusion_radius > 0.0
                               ? options.exclusion_radius
                               : 1e-6 * norm(initial.r - initial.R);

  Trajectory traj;
  traj.states.reserve(steps + 1);
  traj.states.push_back(initial);
  CanonicalState s = initial;
  const double h0 = hamiltonian(initial, charge, fluxon, k);
  for (std::size_t n = 0; n < steps; ++n) {
    s = step(s, h, charge, fluxon, integrator, k, exclusion);
    s.t = initial.t + static_cast<double>(n + 1) * h;
    const double drift = std::abs(hamiltonian(s, charge, fluxon, k) - h0);
    if (h0 != 0.0 && drift > options.max_energy_drift * std::abs(h0)) {
      std::ostringstream msg;
      msg << "energy drift " << drift / std::abs(h0) << " at t = " << s.t
          << " exceeds " << options.max_energy_drift << "; reduce dt";
      throw NonConvergenceError(msg.str(), drift);
    }
    traj.states.push_back(s);
  }

  const std::size_t count = traj.states.size();
  traj.kinetic_velocities.reserve(count);
  for (const auto& st : traj.states) {
    traj.kinetic_velocities.push_back(kinetic_velocities(st, charge, fluxon, k));
  }
  traj.diagnostics.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == count ? i : i + 1;
    const double span = traj.states[hi].t - traj.states[lo].t;
    const Vec3 a = (traj.kinetic_velocities[hi].charge - traj.kinetic_velocities[lo].charge) / span;
    const Vec3 A = (traj.kinetic_velocities[hi].fluxon - traj.kinetic_velocities[lo].fluxon) / span;
    const auto& v = traj.kinetic_velocities[i];
    traj.diagnostics[i] = {0.5 * charge.mass * norm2(v.charge) + 0.5 * fluxon.mass * norm2(v.fluxon),
                           norm(a), norm(A), norm(a * charge.mass + A * fluxon.mass)};
  }
  return traj;
}

ForceReport force_diagnostics(const Trajectory& traj, const ChargeState& charge,
                              const FluxonState& fluxon, const PhysicalConstants& k) {
  if (traj.states.size() < 3 || traj.diagnostics.size() != traj.states.size() ||
      traj.kinetic_velocities.size() != traj.states.size()) {
    throw InvalidArgument("force diagnostics need a trajectory with at least three states");
  }
  ForceReport rep{};
  const double H0 = traj.diagnostics.front().energy;
  const auto& v0 = traj.kinetic_velocities.front();
  const Vec3 K0 = v0.charge * charge.mass + v0.fluxon * fluxon.mass;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const auto& d = traj.diagnostics[i];
    rep.max_accel_charge = std::max(rep.max_accel_charge, d.accel_charge);
    rep.max_accel_fluxon = std::max(rep.max_accel_fluxon, d.accel_fluxon);
    rep.max_third_law_residual = std::max(rep.max_third_law_residual, d.third_law_residual);
    const double dH = std::abs(d.energy - H0);
    rep.energy_drift = std::max(rep.energy_drift, H0 != 0.0 ? dH / std::abs(H0) : dH);
    const auto& v = traj.kinetic_velocities[i];
    rep.momentum_drift =
        std::max(rep.momentum_drift, norm(v.charge * charge.mass + v.fluxon * fluxon.mass - K0));
    const auto& s = traj.states[i];
    FluxonState at = fluxon;
    at.position = s.R;
    const Vec3 Pi = field_momentum_tube(charge.charge, at, s.r, k);
    rep.max_canonical_residual =
        std::max(rep.max_canonical_residual, norm(s.p - v.charge * charge.mass - Pi) +
                                                 norm(s.P - v.fluxon * fluxon.mass + Pi));
  }
  return rep;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,rx,ry,Rx,Ry,px,py,Px,Py,H\n" << std::setprecision(17);
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const auto& s = traj.states[i];
    const double H = i < traj.diagnostics.size() ? traj.diagnostics[i].energy : 0.0;
    out << s.t << ',' << s.r.x << ',' << s.r.y << ',' << s.R.x << ',' << s.R.y << ',' << s.p.x
        << ',' << s.p.y << ',' << s.P.x << ',' << s.P.y << ',' << H << '\n';
  }
}

}  // namespace fluxlab
