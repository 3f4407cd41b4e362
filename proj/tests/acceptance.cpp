// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion-number]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fluxlab/constants.hpp"
#include "fluxlab/dynamics.hpp"
#include "fluxlab/em_kernel.hpp"
#include "fluxlab/errors.hpp"
#include "fluxlab/interaction.hpp"
#include "fluxlab/phase.hpp"
#include "fluxlab/shielding.hpp"
#include "oracles.hpp"

using namespace fluxlab;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
double rel(const Vec3& a, const Vec3& b) { return norm(a - b) / norm(b); }

LoopPath random_loop(std::mt19937_64& rng, const Vec3& around, int kind) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vec3 shift{(u(rng) - 0.5) * 0.2, (u(rng) - 0.5) * 0.2, 0};
  const Vec3 c = around + shift;
  switch (kind % 4) {
    case 0:
      return circle_loop(c, 0.5 + 3.0 * u(rng), 64 + static_cast<int>(200 * u(rng)));
    case 1:
      return ellipse_loop(c, 1.0 + 4.0 * u(rng), 0.5 + 0.4 * u(rng), 6.0 * u(rng), 120);
    case 2:
      return square_loop(c, 0.5 + 2.0 * u(rng), 6.0 * u(rng));
    default: {
      std::vector<double> radii(5 + static_cast<int>(40 * u(rng)));
      for (auto& r : radii) r = 0.4 + 3.0 * u(rng);
      return star_loop(c, radii);
    }
  }
}

// 1. phase quantum over randomized loops
Outcome criterion1() {
  const auto& k = codata();
  const double flux = 2.5e-7;
  const Vec3 R{0.0, 0.0, 0};
  const auto provider = point_fluxon_momentum(k.e_charge, flux, R, k);
  const double want = k.e_charge * flux / (k.hbar * k.c);
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto loop = random_loop(rng, R, i);
    if (winding_number(loop, R) != 1) return {false, "loop " + std::to_string(i) + " does not wind once"};
    worst = std::max(worst, rel(ab_phase(loop, provider, k), want));
  }
  const double q = phase_quantum(k.e_charge, k.flux_quantum(), k);
  const double q_err = std::abs(q - oracle::pi);
  const double loop_pi =
      ab_phase(circle_loop(R, 1.0, 256), point_fluxon_momentum(k.e_charge, k.flux_quantum(), R, k), k);
  const bool ok = worst <= 1e-6 && q_err <= 4.0 * std::numeric_limits<double>::epsilon() * oracle::pi &&
                  rel(loop_pi, oracle::pi) <= 1e-9;
  return {ok, "50 loops max rel err " + fmt(worst) + "; flux quantum phase - pi = " + fmt(q - oracle::pi) +
                  "; loop integral rel err " + fmt(rel(loop_pi, oracle::pi))};
}

// 2. numeric field momentum vs closed form, monotone under s -> s/2
Outcome criterion2() {
  const auto& k = codata();
  const double rho = 1.0;
  const ChargeState q{{rho, 0, 0}, {}, k.e_charge, k.m_electron};
  const FluxonState f{{0, 0, 0}, {}, k.flux_quantum(), 1.0, 0.0, TubeProfile::GaussianTube};
  const std::vector<double> fractions{0.04, 0.02, 0.01};
  const auto study = overlap_convergence(q, f, fractions, 16, k);
  const double at_001 = study.points.back().relative_error;
  bool monotone = true;
  std::string seq;
  for (std::size_t i = 0; i < study.points.size(); ++i) {
    seq += (i ? " -> " : "") + fmt(study.points[i].relative_error);
    if (i > 0 && !(study.points[i].relative_error < study.points[i - 1].relative_error)) monotone = false;
  }
  std::ostringstream diff;
  diff.precision(3);
  for (std::size_t i = 1; i < study.points.size(); ++i) {
    diff << (i > 1 ? ", " : "")
         << study.points[i].relative_error - study.points[i - 1].relative_error;
  }
  const bool within = at_001 < 1e-3;
  return {within && monotone, std::string("s=0.01 rho rel err ") + fmt(at_001) +
                                  (within ? " (< 1e-3 ok)" : " (>= 1e-3)") + "; s=0.04,0.02,0.01: " + seq +
                                  "; successive changes " + diff.str() +
                                  (monotone ? " (monotone)" : " (NOT monotone: axial truncation dominates)")};
}

// 3. dual-form Lagrangian and common-velocity invariance
Outcome criterion3() {
  const auto& k = unit_constants();
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  const ChargeState base_q{{0.8, 0.6, 0}, {}, 1.0, 1.0};
  const FluxonState base_f{{0, 0, 0}, {}, 1.0, 1.0, 0.01, TubeProfile::GaussianTube};
  double worst_dual = 0.0, worst_closed_shift = 0.0, worst_numeric_shift = 0.0;
  for (int i = 0; i < 20; ++i) {
    ChargeState q = base_q;
    FluxonState f = base_f;
    q.velocity = {u(rng), u(rng), 0};
    f.velocity = {u(rng), u(rng), 0};
    const Vec3 w{u(rng), u(rng), 0};
    const double cl = interaction_lagrangian(q, f, LagrangianMethod::ClosedForm, k).value;
    const double num = interaction_lagrangian(q, f, LagrangianMethod::NumericOverlap, k).value;
    worst_dual = std::max(worst_dual, rel(num, cl));
    ChargeState q2 = q;
    FluxonState f2 = f;
    q2.velocity = q.velocity + w;
    f2.velocity = f.velocity + w;
    const double cl2 = interaction_lagrangian(q2, f2, LagrangianMethod::ClosedForm, k).value;
    const double num2 = interaction_lagrangian(q2, f2, LagrangianMethod::NumericOverlap, k).value;
    worst_closed_shift = std::max(worst_closed_shift, rel(cl2, cl));
    worst_numeric_shift = std::max(worst_numeric_shift, rel(num2, num));
  }
  const bool ok = worst_dual <= 1e-3 && worst_closed_shift <= 1e-12 && worst_numeric_shift <= 1e-9;
  return {ok, "20 velocity pairs: numeric vs closed max rel " + fmt(worst_dual) +
                  "; common-velocity shift closed " + fmt(worst_closed_shift) + ", numeric " +
                  fmt(worst_numeric_shift)};
}

// 4. force-free flyby under RK4 refinement
Outcome criterion4() {
  const auto& k = unit_constants();
  const double b = 0.5;
  const ChargeState q{{-3.0, b, 0}, {0.1, 0, 0}, 1.0, 1.0};
  const FluxonState f{{0, 0, 0}, {0, 0, 0}, 2.0, 3.0};
  const auto init = canonical_state(q, f, k);
  std::vector<double> acc, mom, canon;
  for (double dt : {1.0, 0.5, 0.25, 0.125}) {
    const auto traj = simulate(init, 60.0, dt, q, f, Integrator::RK4, {}, k);
    const auto rep = force_diagnostics(traj, q, f, k);
    acc.push_back(rep.max_accel_charge);
    mom.push_back(rep.momentum_drift);
    // canonical relation against an independent Pi
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      const auto& s = traj.states[i];
      const Vec3 Pi = oracle::pi_closed(q.charge, f.flux, k.c, s.r, s.R);
      worst = std::max(worst, norm(s.p - traj.kinetic_velocities[i].charge * q.mass - Pi) / norm(Pi));
    }
    canon.push_back(worst);
  }
  bool order = true;
  std::string ratios;
  for (std::size_t i = 1; i < acc.size(); ++i) {
    const double r = acc[i - 1] / acc[i];
    ratios += (i > 1 ? ", " : "") + fmt(r);
    order &= r > 12.0;  // 16 for a clean fourth order
  }
  const double p_scale = q.mass * norm(q.velocity);
  double mom_worst = 0.0, canon_worst = 0.0;
  for (double m : mom) mom_worst = std::max(mom_worst, m / p_scale);
  for (double c : canon) canon_worst = std::max(canon_worst, c);
  // conserved "to the same order": bounded by the acceleration residual at every dt
  bool mom_ok = true;
  for (std::size_t i = 0; i < mom.size(); ++i) mom_ok &= mom[i] <= std::max(acc[i] * 60.0 * q.mass, 1e-14 * p_scale);
  const bool ok = order && mom_ok && canon_worst <= 1e-12;
  return {ok, "max|r''| " + fmt(acc.front()) + " -> " + fmt(acc.back()) + ", halving ratios " + ratios +
                  "; momentum drift/|p| " + fmt(mom_worst) + "; max |p - m rdot - Pi|/|Pi| " + fmt(canon_worst)};
}

// 5. cage cancellation, induced and quantized charge
Outcome criterion5() {
  const auto& k = codata();
  std::mt19937_64 rng(5005);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_res = 0.0, worst_ind = 0.0, worst_q = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double R = 0.05 + 10.0 * u(rng);
    const CageScenario s{k.e_charge, R * (1.01 + 9.0 * u(rng)), R, (u(rng) - 0.5) * 1e4,
                         (u(rng) - 0.5) * 1e-4, static_cast<int>(u(rng) * 1e4)};
    const auto t = cage_interaction_terms(s, k);
    worst_res = std::max(worst_res, std::abs(t.residual) / std::abs(t.L_eF));
    worst_ind = std::max(worst_ind, rel(total_induced_charge(s).value, -s.e));
    const double want = 2.0 * s.n_pairs * s.e;
    const double got = total_surface_charge(s).value;
    worst_q = std::max(worst_q, s.n_pairs ? rel(got, want) : std::abs(got) / s.e);
  }
  const bool ok = worst_res < 1e-10 && worst_ind <= 1e-10 && worst_q <= 1e-10;
  return {ok, "100 cages: |L_eF + L_sF|/|L_eF| max " + fmt(worst_res) + "; induced charge rel " +
                  fmt(worst_ind) + "; 2ne rel " + fmt(worst_q)};
}

// 6. adiabaticity numbers
Outcome criterion6() {
  const double thr = adiabatic_threshold(1e-6, 1.5e-3);
  const auto kin = electron_kinematics(3e-12);
  const auto verdict = classify_shielding({1e-6, 1.5e-3, 3e-12, std::nullopt});
  const bool ok = rel(thr, 3.6e5) <= 0.02 && rel(kin.kinetic_energy_eV, 150e3) <= 0.05 &&
                  verdict.classification == ShieldingClass::Leaky;
  return {ok, "threshold " + fmt(thr) + " m/s; KE(3 pm) " + fmt(kin.kinetic_energy_eV) + " eV; v_e " +
                  fmt(kin.v_e) + " m/s (gamma v " + fmt(kin.gamma_v) + "); Tonomura " +
                  to_string(verdict.classification) + ", margin " + fmt(verdict.margin)};
}

// 7. boost invariance of the scalar density
Outcome criterion7() {
  std::mt19937_64 rng(7007);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> mag(0.0, 0.9);
  auto rv = [&] { return Vec3{u(rng), u(rng), u(rng)}; };
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const FieldSample f1{rv(), rv()}, f2{rv(), rv()};
    Vec3 d;
    do d = rv();
    while (norm(d) < 1e-3 || norm(d) > 1.0);
    const Vec3 beta = d / norm(d) * mag(rng);
    const double s0 = scalar_density(f1, f2);
    const double s1 = scalar_density(boost_fields(f1, beta), boost_fields(f2, beta));
    // normalised by the size of the terms that cancel, not by |s0|
    const double scale = (norm(f1.B) * norm(f2.B) + norm(f1.E) * norm(f2.E)) / (4.0 * oracle::pi);
    worst = std::max(worst, std::abs(s1 - s0) / scale);
  }
  return {worst <= 1e-9, "1000 boosts |beta| <= 0.9: max rel err " + fmt(worst)};
}

// 8. Type I / Type II equivalence
Outcome criterion8() {
  const auto& k = codata();
  const double flux = 3e-7;
  const Vec3 charge_at{0.3, -0.4, 0};
  const Vec3 fluxon_at{0, 0, 0};
  std::mt19937_64 rng(8008);
  double worst_phase = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto loop = random_loop(rng, fluxon_at, i);
    const double type1 = ab_phase(loop, point_fluxon_momentum(k.e_charge, flux, fluxon_at, k), k);
    std::vector<Vec3> path;
    for (const auto& v : loop.vertices()) path.push_back(charge_at - (v - fluxon_at));
    const double type2 = ab_phase(LoopPath(path), fluxon_loop_momentum(k.e_charge, flux, charge_at, k), k);
    worst_phase = std::max(worst_phase, rel(type2, type1));
  }

  // trajectories: charge moving past a resting fluxon, and the fluxon moving
  // past a resting charge with the opposite velocity
  const auto& u = unit_constants();
  const ChargeState q1{{-3.0, 0.5, 0}, {0.1, 0.02, 0}, 1.0, 1.0};
  const FluxonState f1{{0, 0, 0}, {0, 0, 0}, 2.0, 3.0};
  const ChargeState q2{{0, 0, 0}, {0, 0, 0}, 1.0, 1.0};
  const FluxonState f2{{3.0, -0.5, 0}, {-0.1, -0.02, 0}, 2.0, 3.0};
  const auto t1 = simulate(canonical_state(q1, f1, u), 60.0, 0.1, q1, f1, Integrator::RK4, {}, u);
  const auto t2 = simulate(canonical_state(q2, f2, u), 60.0, 0.1, q2, f2, Integrator::RK4, {}, u);
  // relabelled run: roles and masses swapped, r' = R, R' = r, p' = P, P' = p
  ChargeState q3 = q1;
  FluxonState f3 = f1;
  q3.mass = f1.mass;
  f3.mass = q1.mass;
  const auto c1 = canonical_state(q1, f1, u);
  const auto t3 = simulate({c1.R, c1.r, c1.P, c1.p}, 60.0, 0.1, q3, f3, Integrator::RK4, {}, u);
  double worst_traj = 0.0;
  for (std::size_t i = 0; i < t1.states.size(); ++i) {
    const Vec3 d1 = t1.states[i].r - t1.states[i].R;
    const Vec3 d2 = t2.states[i].r - t2.states[i].R;
    const Vec3 d3 = t3.states[i].R - t3.states[i].r;
    worst_traj = std::max({worst_traj, norm(d1 - d2) / norm(d1), norm(d1 - d3) / norm(d1)});
  }
  const bool ok = worst_phase <= 1e-6 && worst_traj <= 1e-6;
  return {ok, "20 loops phase rel diff " + fmt(worst_phase) + "; relative trajectories max rel diff " +
                  fmt(worst_traj)};
}

// 9. distributed flux Stokes check
Outcome criterion9() {
  const auto& k = codata();
  const double total = 5e-7;
  const auto disk = uniform_disk_distribution({0, 0, 0}, 1.0, total, 10000);
  const auto provider = distributed_momentum(k.e_charge, disk, k);
  std::mt19937_64 rng(9009);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int partial = 0, redrawn = 0;
  for (int i = 0; i < 8; ++i) {
    // half the loops stay outside the disk, half cut through it; a loop whose
    // edge grazes a sample (inside its exclusion disk) is redrawn
    for (;;) {
      std::vector<double> radii(6 + static_cast<int>(10 * u(rng)));
      for (auto& r : radii) r = i % 2 ? 0.5 + 1.2 * u(rng) : 1.2 + 1.5 * u(rng);
      const Vec3 c{(u(rng) - 0.5) * 0.3, (u(rng) - 0.5) * 0.3, 0};
      const auto loop = star_loop(c, radii);
      double phase = 0.0;
      try {
        phase = ab_phase(loop, provider, k);
      } catch (const SingularityError&) {
        ++redrawn;
        continue;
      }
      const double enclosed = enclosed_flux(loop, disk);
      if (std::abs(enclosed - total) > 1e-6 * total) ++partial;
      worst = std::max(worst, rel(k.hbar * phase, k.e_charge / k.c * enclosed));
      break;
    }
  }
  return {worst <= 1e-4, std::to_string(disk.samples().size()) + " samples, 8 loops (" +
                             std::to_string(partial) + " partial, " + std::to_string(redrawn) +
                             " redrawn): max rel err " + fmt(worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AB phase quantum", criterion1},
      {"field-momentum oracle", criterion2},
      {"dual-form Lagrangian", criterion3},
      {"force-free dynamics", criterion4},
      {"cage cancellation", criterion5},
      {"adiabaticity numbers", criterion6},
      {"Lorentz-scalar invariance", criterion7},
      {"frame equivalence", criterion8},
      {"distributed flux", criterion9},
  };
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (only && n != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %s: %s -- %s [%.1fs]\n", n, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures ? 1 : 0;
}
