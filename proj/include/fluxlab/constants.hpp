#pragma once

#include <numbers>

namespace fluxlab {

// Gaussian-CGS constants. The CODATA table lives in codata() and nowhere
// else; tests and tools read values from here instead of repeating literals.
struct PhysicalConstants {
  double c;           // cm/s
  double h;           // erg s
  double hbar;        // erg s
  double e_charge;    // statC
  double m_electron;  // g
  double erg_per_eV;  // erg

  // hc/2e in maxwell (G cm^2).
  constexpr double flux_quantum() const { return h * c / (2.0 * e_charge); }

  // Builds a table with hbar = h/2pi. Throws InvalidArgument unless every
  // entry is finite and strictly positive.
  static PhysicalConstants make(double c, double h, double e_charge, double m_electron,
                                double erg_per_eV);
};

// CODATA 2018 (exact SI-defined h, c, e; e in statC via e_SI * 10 c_SI).
const PhysicalConstants& codata();

// c = 1, hbar = 1, e = 1, m = 1, 1 eV = 1 erg. Handy for order-one test problems.
const PhysicalConstants& unit_constants();

// SI view of the same table, for the shielding calculator.
struct SiConstants {
  double c;         // m/s
  double h;         // J s
  double m_e;       // kg
  double J_per_eV;  // J

  static SiConstants from(const PhysicalConstants& k) {
    return {k.c * 1e-2, k.h * 1e-7, k.m_electron * 1e-3, k.erg_per_eV * 1e-7};
  }
};

inline constexpr double pi = std::numbers::pi;

}  // namespace fluxlab
