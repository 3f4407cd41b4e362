#include <cmath>
#include <random>

#include "doctest.h"
#include "fluxlab/errors.hpp"
#include "fluxlab/interaction.hpp"
#include "fluxlab/shielding.hpp"
#include "oracles.hpp"

using namespace fluxlab;
using doctest::Approx;

namespace {

CageScenario random_cage(std::mt19937_64& rng, double e) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double R = 0.1 + 5.0 * u(rng);
  const double a = R * (1.05 + 4.0 * u(rng));
  const double omega = (u(rng) - 0.5) * 2e3;
  const double flux = (u(rng) - 0.5) * 1e-5;
  const int n = static_cast<int>(u(rng) * 1000);
  return {e, a, R, omega, flux, n};
}

}  // namespace

TEST_CASE("cage scenario invariants") {
  CHECK_THROWS_AS(CageScenario({1.0, 1.0, 1.0, 1.0, 1.0, 0}).validate(), InvalidArgument);
  CHECK_THROWS_AS(CageScenario({1.0, 2.0, -1.0, 1.0, 1.0, 0}).validate(), InvalidArgument);
  CHECK_NOTHROW(CageScenario({1.0, 2.0, 1.0, 1.0, 1.0, 0}).validate());
}

TEST_CASE("induced surface density") {
  const CageScenario s{1.0, 2.0, 1.0, 1.0, 1.0, 0};
  CHECK(induced_surface_density(s, 0.0) / induced_surface_density(s, oracle::pi) ==
        Approx(9.0));
  for (double phi = 0.0; phi < 6.3; phi += 0.1) CHECK(induced_surface_density(s, phi) < 0.0);
  // independent total by Simpson
  const double total = oracle::simpson(
      [&](double p) { return induced_surface_density(s, p) * s.R_cage; }, 0.0, 2.0 * oracle::pi, 4000);
  CHECK(total == Approx(-1.0).epsilon(1e-10));
  CHECK(total_induced_charge(s).value == Approx(-1.0).epsilon(1e-12));

  const CageScenario far{1.0, 1e6, 1.0, 1.0, 1.0, 0};
  for (double phi : {0.0, 1.0, 3.0}) {
    CHECK(induced_surface_density(far, phi) == Approx(-1.0 / (2.0 * oracle::pi)).epsilon(1e-5));
  }
}

TEST_CASE("image current") {
  CageScenario s{1.0, 3.0, 1.0, 0.0, 1.0, 0};
  CHECK(image_current(s, 0.4) == 0.0);
  s.omega = 2.0;
  // counterclockwise electron, clockwise (negative) image current
  CHECK(image_current(s, 0.4) < 0.0);
  CHECK(image_current(s, 0.4) == Approx(s.R_cage * s.omega * induced_surface_density(s, 0.4)));
  CHECK(mean_image_current(s).value == Approx(-s.e * s.omega / (2.0 * oracle::pi)).epsilon(1e-12));
}

TEST_CASE("cage cancellation example") {
  const auto& k = codata();
  const CageScenario s{k.e_charge, 2.0, 1.0, 1.0, 1.0, 0};
  const auto t = cage_interaction_terms(s, k);
  CHECK(t.L_eF == Approx(k.e_charge * 1.0 * 1.0 / (2.0 * oracle::pi * k.c)).epsilon(1e-14));
  CHECK(std::abs(t.residual) / std::abs(t.L_eF) < 1e-10);

  // L_eF from the vector potential directly: (e/c) rdot . A at (a, 0)
  const Vec3 A = vector_potential_symmetric(1.0, {0, 0, 0}, {2.0, 0, 0});
  CHECK(t.L_eF == Approx(k.e_charge / k.c * dot(Vec3{0, 2.0, 0}, A)).epsilon(1e-14));

  CageScenario zero = s;
  zero.flux = 0.0;
  const auto z = cage_interaction_terms(zero, k);
  CHECK(z.L_eF == 0.0);
  CHECK(z.L_sF == 0.0);

  CageScenario fast = s;
  fast.omega = 2.0;
  CHECK(cage_interaction_terms(fast, k).L_eF == Approx(2.0 * t.L_eF).epsilon(1e-14));
}

TEST_CASE("cancellation, Gauss and quantization over 100 random geometries") {
  const auto& k = codata();
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 100; ++i) {
    const auto s = random_cage(rng, k.e_charge);
    const auto t = cage_interaction_terms(s, k);
    if (t.L_eF != 0.0) CHECK(std::abs(t.residual) / std::abs(t.L_eF) < 1e-10);
    CHECK(total_induced_charge(s).value == Approx(-s.e).epsilon(1e-10));
    const double want = 2.0 * s.n_pairs * s.e;
    const double got = total_surface_charge(s).value;
    if (s.n_pairs == 0) {
      CHECK(std::abs(got) < 1e-10 * s.e);
    } else {
      CHECK(got == Approx(want).epsilon(1e-10));
    }
  }
}

TEST_CASE("quantized surface charge") {
  for (int n : {0, 1, 5}) {
    const CageScenario s{1.0, 2.5, 1.0, 1.0, 1.0, n};
    const double total = oracle::simpson(
        [&](double p) { return quantized_surface_charge(s, p) * s.R_cage; }, 0.0, 2.0 * oracle::pi, 4000);
    CHECK(total == Approx(2.0 * n).epsilon(1e-9).scale(1.0));
    CHECK(background_surface_density(s) == Approx((2 * n + 1) / (2.0 * oracle::pi)));
    CHECK(quantized_surface_charge(s, 0.3) - induced_surface_density(s, 0.3) ==
          Approx(background_surface_density(s)));
  }
}

TEST_CASE("residual vanishes in flux derivative") {
  const auto& k = codata();
  const CageScenario a{k.e_charge, 3.0, 2.0, 5.0, 1.0, 2};
  CageScenario b = a;
  b.flux = 1.0 + 1e-3;
  const double d = (cage_interaction_terms(b, k).residual - cage_interaction_terms(a, k).residual) / 1e-3;
  CHECK(std::abs(d) < 1e-10 * std::abs(cage_interaction_terms(a, k).L_eF));
}

TEST_CASE("adiabatic threshold and transient time") {
  const double thr = adiabatic_threshold(1e-6, 1.5e-3);
  CHECK(thr == Approx(3.6e5).epsilon(0.02));
  CHECK(adiabatic_threshold(2e-6, 1.5e-3) == Approx(2.0 * thr));
  CHECK(adiabatic_threshold(1e-6, 3.0e-3) == Approx(2.0 * thr));
  CHECK(adiabatic_threshold(2e-6, 1.5e-3) == Approx(7.3e5).epsilon(0.02));

  const auto si = SiConstants::from(codata());
  const double h_over_gap = si.h / (1.5e-3 * si.J_per_eV);
  ShieldDesign at{1e-6, 1.5e-3, std::nullopt, 3.63e5};
  CHECK(transient_time(at) == Approx(2.76e-12).epsilon(0.01));
  at.v_e_m_per_s = thr;
  // gamma - 1 ~ 7e-7 at this speed
  CHECK(transient_time(at) == Approx(h_over_gap).epsilon(1e-6));
  ShieldDesign twice = at;
  twice.d_m = 2e-6;
  CHECK(transient_time(twice) == Approx(2.0 * transient_time(at)));
}

TEST_CASE("electron kinematics") {
  const auto kin = electron_kinematics(3e-12);
  CHECK(kin.kinetic_energy_eV == Approx(150e3).epsilon(0.05));
  CHECK(kin.kinetic_energy_eV == Approx(1.46e5).epsilon(0.01));
  CHECK(kin.v_e == Approx(1.90e8).epsilon(0.01));
  // independent inversion: gamma v = h/(m lambda)
  const auto si = SiConstants::from(codata());
  const double gv = si.h / (si.m_e * 3e-12);
  CHECK(kin.gamma_v == Approx(gv).epsilon(1e-12));
  CHECK(kin.v_e == Approx(gv / std::sqrt(1.0 + gv * gv / (si.c * si.c))).epsilon(1e-12));

  const auto slow = electron_kinematics(1.0);
  CHECK(slow.gamma == Approx(1.0).epsilon(1e-15));
  CHECK(slow.v_e < 1e-3);

  const auto back = electron_kinematics_from_velocity(kin.v_e);
  CHECK(back.gamma == Approx(kin.gamma).epsilon(1e-12));
  CHECK_THROWS_AS(electron_kinematics(-1.0), InvalidArgument);
}

TEST_CASE("classification") {
  const ShieldDesign tonomura{1e-6, 1.5e-3, 3e-12, std::nullopt};
  const auto v = classify_shielding(tonomura);
  CHECK(v.classification == ShieldingClass::Leaky);
  CHECK(v.margin < 1e-2);
  const ShieldDesign slow{1e-6, 1.5e-3, std::nullopt, 1e5};
  CHECK(classify_shielding(slow).classification == ShieldingClass::Shielded);
  CHECK(classify(3.0, 3.0).classification == ShieldingClass::Leaky);
  CHECK(classify(2.999, 3.0).classification == ShieldingClass::Shielded);
  CHECK(to_string(ShieldingClass::Leaky) == "Leaky");
}

TEST_CASE("classification is monotone") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const ShieldDesign base{1e-7 + 1e-5 * u(rng), 1e-4 + 3e-3 * u(rng), std::nullopt, 1e3 + 1e6 * u(rng)};
    const double m = classify_shielding(base).margin;
    ShieldDesign d = base;
    d.d_m *= 1.5;
    CHECK(classify_shielding(d).margin > m);
    d = base;
    d.gap_eV *= 1.5;
    CHECK(classify_shielding(d).margin > m);
    d = base;
    *d.v_e_m_per_s *= 1.5;
    CHECK(classify_shielding(d).margin < m);
    if (classify_shielding(base).classification == ShieldingClass::Shielded) {
      d = base;
      d.d_m *= 2.0;
      CHECK(classify_shielding(d).classification == ShieldingClass::Shielded);
    }
  }
}

TEST_CASE("shield design JSON") {
  const auto j = nlohmann::json::parse(R"({"d_m": 1e-6, "gap_eV": 1.5e-3, "lambda_m": 3e-12})");
  const auto d = shield_design_from_json(j);
  CHECK(d.wavelength_m.has_value());
  CHECK(shield_design_from_json(to_json(d)).d_m == d.d_m);
  const auto r = to_json(shield_report(d));
  for (const char* key : {"delta_t_s", "threshold_m_per_s", "gamma_v", "classification", "margin"}) {
    CHECK(r.contains(key));
  }
  CHECK(r["classification"] == "Leaky");
  CHECK_THROWS_AS(shield_design_from_json(nlohmann::json::parse(R"({"d_m": 1e-6, "gap_eV": 1e-3})")),
                  InvalidArgument);
  CHECK_THROWS_AS(shield_design_from_json(nlohmann::json::parse(
                      R"({"d_m": 1e-6, "gap_eV": 1e-3, "lambda_m": 1e-12, "v_e_m_per_s": 1e5})")),
                  InvalidArgument);
  CHECK_THROWS_AS(shield_design_from_json(nlohmann::json::parse(
                      R"({"d_m": -1e-6, "gap_eV": 1e-3, "lambda_m": 1e-12})")),
                  InvalidArgument);
}
