#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "fluxlab/constants.hpp"
#include "json.hpp"

namespace fluxlab {

// Electron on a circular orbit of radius a around an ideal hollow conductor
// of radius R_cage that confines the flux. Gaussian units.
struct CageScenario {
  double e;       // statC
  double a;       // cm, orbit radius
  double R_cage;  // cm
  double omega;   // rad/s, counterclockwise positive
  double flux;    // maxwell
  int n_pairs = 0;

  // Requires a > R_cage > 0, finite values and n_pairs >= 0.
  void validate() const;
};

// phi is measured on the cage from the direction of the electron.
// delta_sigma = -(e/2 pi R)(a^2 - R^2)/(a^2 + R^2 - 2 a R cos phi), statC/cm.
double induced_surface_density(const CageScenario& s, double phi);

// Azimuthal component of j_c = R omega delta_sigma phi_hat.
double image_current(const CageScenario& s, double phi);

// sigma_0 = (2n + 1) e / (2 pi R).
double background_surface_density(const CageScenario& s);

// sigma_0 + delta_sigma.
double quantized_surface_charge(const CageScenario& s, double phi);

struct SurfaceIntegral {
  double value;
  double error;
  std::size_t points;
};

// Loop integrals over the cage surface by the periodic trapezoid rule.
SurfaceIntegral total_induced_charge(const CageScenario& s);   // -> -e
SurfaceIntegral total_surface_charge(const CageScenario& s);   // -> 2 n e
SurfaceIntegral mean_image_current(const CageScenario& s);     // (1/2pi) loop j_c dphi -> -e omega/2pi

struct CageTerms {
  double L_eF;      // (e/c) rdot.A at the electron, erg
  double L_sF;      // (1/c) loop j_c.A over the cage surface, erg
  double residual;  // L_eF + L_sF
  double quadrature_error;
  std::size_t quadrature_points;
};

CageTerms cage_interaction_terms(const CageScenario& s, const PhysicalConstants& k = codata());

// Shield design in SI units. Exactly one of wavelength or velocity is set.
struct ShieldDesign {
  double d_m;
  double gap_eV;
  std::optional<double> wavelength_m;
  std::optional<double> v_e_m_per_s;

  void validate(const PhysicalConstants& k = codata()) const;
};

struct ElectronKinematics {
  double v_e;                // m/s
  double gamma;
  double kinetic_energy_eV;
  double gamma_v;            // m/s
};

// Relativistic de Broglie inversion of lambda = h/(gamma m v).
ElectronKinematics electron_kinematics(double wavelength_m, const PhysicalConstants& k = codata());
ElectronKinematics electron_kinematics_from_velocity(double v_m_per_s,
                                                     const PhysicalConstants& k = codata());
ElectronKinematics resolve_kinematics(const ShieldDesign& design,
                                      const PhysicalConstants& k = codata());

// d / (gamma v_e), seconds.
double transient_time(const ShieldDesign& design, const PhysicalConstants& k = codata());

// d Delta / h, the bound on gamma v_e in m/s.
double adiabatic_threshold(double d_m, double gap_eV, const PhysicalConstants& k = codata());

enum class ShieldingClass { Shielded, Leaky };

struct ShieldingVerdict {
  ShieldingClass classification;
  double margin;  // threshold / (gamma v_e)
};

// Shielded only when gamma_v < threshold strictly.
ShieldingVerdict classify(double gamma_v, double threshold);
ShieldingVerdict classify_shielding(const ShieldDesign& design,
                                    const PhysicalConstants& k = codata());

std::string to_string(ShieldingClass c);

struct ShieldReport {
  double delta_t_s;
  double threshold_m_per_s;
  double gamma_v;
  ShieldingVerdict verdict;
  ElectronKinematics kinematics;
};

ShieldReport shield_report(const ShieldDesign& design, const PhysicalConstants& k = codata());

// Keys d_m, gap_eV and one of lambda_m / v_e_m_per_s. Throws InvalidArgument.
ShieldDesign shield_design_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ShieldDesign& design);
// {delta_t_s, threshold_m_per_s, gamma_v, classification, margin}
nlohmann::json to_json(const ShieldReport& report);

}  // namespace fluxlab
