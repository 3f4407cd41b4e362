#include "fluxlab/shielding.hpp"

#include <cmath>

#include "fluxlab/errors.hpp"
#include "fluxlab/interaction.hpp"
#include "fluxlab/quadrature.hpp"

namespace fluxlab {
namespace {

constexpr double kSurfaceRelTol = 1e-14;

template <class F>
SurfaceIntegral surface_loop(F&& f, double abs_scale) {
  const auto r = quad::periodic_trapezoid(f, kSurfaceRelTol, 1e-16 * abs_scale);
  return {r.value, r.error, r.points};
}

}  // namespace

void CageScenario::validate() const {
  for (double v : {e, a, R_cage, omega, flux}) {
    if (!std::isfinite(v)) throw InvalidArgument("cage scenario values must be finite");
  }
  if (!(R_cage > 0.0)) throw InvalidArgument("cage radius must be positive");
  if (!(a > R_cage)) throw InvalidArgument("electron orbit must lie outside the cage (a > R)");
  if (n_pairs < 0) throw InvalidArgument("Cooper-pair count must be non-negative");
}

double induced_surface_density(const CageScenario& s, double phi) {
  const double a = s.a;
  const double R = s.R_cage;
  return -(s.e / (2.0 * pi * R)) * (a * a - R * R) / (a * a + R * R - 2.0 * a * R * std::cos(phi));
}

double image_current(const CageScenario& s, double phi) {
  return s.R_cage * s.omega * induced_surface_density(s, phi);
}

double background_surface_density(const CageScenario& s) {
  return (2.0 * s.n_pairs + 1.0) * s.e / (2.0 * pi * s.R_cage);
}

double quantized_surface_charge(const CageScenario& s, double phi) {
  return background_surface_density(s) + induced_surface_density(s, phi);
}

SurfaceIntegral total_induced_charge(const CageScenario& s) {
  s.validate();
  return surface_loop([&](double phi) { return induced_surface_density(s, phi) * s.R_cage; },
                      std::abs(s.e));
}

SurfaceIntegral total_surface_charge(const CageScenario& s) {
  s.validate();
  return surface_loop([&](double phi) { return quantized_surface_charge(s, phi) * s.R_cage; },
                      std::abs(s.e) * (2.0 * s.n_pairs + 1.0));
}

SurfaceIntegral mean_image_current(const CageScenario& s) {
  s.validate();
  auto r = surface_loop([&](double phi) { return image_current(s, phi); },
                        std::abs(s.e * s.omega));
  r.value /= 2.0 * pi;
  r.error /= 2.0 * pi;
  return r;
}

CageTerms cage_interaction_terms(const CageScenario& s, const PhysicalConstants& k) {
  s.validate();
  const Vec3 centre{};
  const Vec3 electron{s.a, 0.0};
  const Vec3 electron_velocity = azimuthal_unit(electron) * (s.a * s.omega);
  const double L_eF = s.e / k.c * dot(electron_velocity, vector_potential_symmetric(s.flux, centre, electron));

  const auto surface = surface_loop(
      [&](double phi) {
        const Vec3 x{s.R_cage * std::cos(phi), s.R_cage * std::sin(phi)};
        const Vec3 j = azimuthal_unit(x) * image_current(s, phi);
        return dot(j, vector_potential_symmetric(s.flux, centre, x)) * s.R_cage;
      },
      std::abs(s.e * s.omega * s.flux));
  const double L_sF = surface.value / k.c;
  return {L_eF, L_sF, L_eF + L_sF, surface.error / k.c, surface.points};
}

void ShieldDesign::validate(const PhysicalConstants& k) const {
  if (!(d_m > 0.0) || !std::isfinite(d_m)) throw InvalidArgument("d_m must be positive");
  if (!(gap_eV > 0.0) || !std::isfinite(gap_eV)) throw InvalidArgument("gap_eV must be positive");
  if (wavelength_m.has_value() == v_e_m_per_s.has_value()) {
    throw InvalidArgument("exactly one of lambda_m and v_e_m_per_s must be given");
  }
  if (wavelength_m && !(*wavelength_m > 0.0 && std::isfinite(*wavelength_m))) {
    throw InvalidArgument("lambda_m must be positive");
  }
  if (v_e_m_per_s) {
    const double c = SiConstants::from(k).c;
    if (!(*v_e_m_per_s > 0.0 && *v_e_m_per_s < c)) {
      throw InvalidArgument("v_e_m_per_s must lie in (0, c)");
    }
  }
}

ElectronKinematics electron_kinematics(double wavelength_m, const PhysicalConstants& k) {
  if (!(wavelength_m > 0.0)) throw InvalidArgument("wavelength must be positive");
  const auto si = SiConstants::from(k);
  const double p = si.h / wavelength_m;
  const double x = p / (si.m_e * si.c);  // gamma beta
  const double gamma = std::sqrt(1.0 + x * x);
  const double v = si.c * x / gamma;
  const double rest = si.m_e * si.c * si.c;
  return {v, gamma, rest * x * x / (gamma + 1.0) / si.J_per_eV, gamma * v};
}

ElectronKinematics electron_kinematics_from_velocity(double v, const PhysicalConstants& k) {
  const auto si = SiConstants::from(k);
  if (!(v >= 0.0 && v < si.c)) throw InvalidArgument("velocity must lie in [0, c)");
  const double beta = v / si.c;
  const double gamma = 1.0 / std::sqrt((1.0 - beta) * (1.0 + beta));
  const double x2 = gamma * gamma * beta * beta;
  return {v, gamma, si.m_e * si.c * si.c * x2 / (gamma + 1.0) / si.J_per_eV, gamma * v};
}

ElectronKinematics resolve_kinematics(const ShieldDesign& design, const PhysicalConstants& k) {
  design.validate(k);
  return design.wavelength_m ? electron_kinematics(*design.wavelength_m, k)
                             : electron_kinematics_from_velocity(*design.v_e_m_per_s, k);
}

double transient_time(const ShieldDesign& design, const PhysicalConstants& k) {
  return design.d_m / resolve_kinematics(design, k).gamma_v;
}

double adiabatic_threshold(double d_m, double gap_eV, const PhysicalConstants& k) {
  if (!(d_m > 0.0) || !(gap_eV > 0.0)) throw InvalidArgument("d and gap must be positive");
  const auto si = SiConstants::from(k);
  return d_m * gap_eV * si.J_per_eV / si.h;
}

ShieldingVerdict classify(double gamma_v, double threshold) {
  return {gamma_v < threshold ? ShieldingClass::Shielded : ShieldingClass::Leaky,
          threshold / gamma_v};
}

ShieldingVerdict classify_shielding(const ShieldDesign& design, const PhysicalConstants& k) {
  return classify(resolve_kinematics(design, k).gamma_v,
                  adiabatic_threshold(design.d_m, design.gap_eV, k));
}

std::string to_string(ShieldingClass c) {
  return c == ShieldingClass::Shielded ? "Shielded" : "Leaky";
}

ShieldReport shield_report(const ShieldDesign& design, const PhysicalConstants& k) {
  const auto kin = resolve_kinematics(design, k);
  const double threshold = adiabatic_threshold(design.d_m, design.gap_eV, k);
  return {design.d_m / kin.gamma_v, threshold, kin.gamma_v, classify(kin.gamma_v, threshold), kin};
}

ShieldDesign shield_design_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("shield design must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "d_m" && key != "gap_eV" && key != "lambda_m" && key != "v_e_m_per_s") {
      throw InvalidArgument("unknown shield design key: " + key);
    }
    if (!value.is_number()) throw InvalidArgument("shield design key " + key + " must be a number");
  }
  for (const char* key : {"d_m", "gap_eV"}) {
    if (!j.contains(key)) throw InvalidArgument(std::string("missing shield design key: ") + key);
  }
  ShieldDesign d{j.at("d_m").get<double>(), j.at("gap_eV").get<double>(), std::nullopt,
                 std::nullopt};
  if (j.contains("lambda_m")) d.wavelength_m = j.at("lambda_m").get<double>();
  if (j.contains("v_e_m_per_s")) d.v_e_m_per_s = j.at("v_e_m_per_s").get<double>();
  d.validate();
  return d;
}

nlohmann::json to_json(const ShieldDesign& design) {
  nlohmann::json j{{"d_m", design.d_m}, {"gap_eV", design.gap_eV}};
  if (design.wavelength_m) j["lambda_m"] = *design.wavelength_m;
  if (design.v_e_m_per_s) j["v_e_m_per_s"] = *design.v_e_m_per_s;
  return j;
}

nlohmann::json to_json(const ShieldReport& report) {
  return {{"delta_t_s", report.delta_t_s},
          {"threshold_m_per_s", report.threshold_m_per_s},
          {"gamma_v", report.gamma_v},
          {"classification", to_string(report.verdict.classification)},
          {"margin", report.verdict.margin}};
}

}  // namespace fluxlab
