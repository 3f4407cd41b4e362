#include "fluxlab/constants.hpp"

#include <cmath>

#include "fluxlab/errors.hpp"

namespace fluxlab {

PhysicalConstants PhysicalConstants::make(double c, double h, double e_charge,
                                          double m_electron, double erg_per_eV) {
  for (double v : {c, h, e_charge, m_electron, erg_per_eV}) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw InvalidArgument("physical constants must be finite and positive");
    }
  }
  return {c, h, h / (2.0 * pi), e_charge, m_electron, erg_per_eV};
}

const PhysicalConstants& codata() {
  static const PhysicalConstants k = PhysicalConstants::make(
      2.99792458e10,         // c
      6.62607015e-27,        // h
      4.803204712570263e-10, // e = 1.602176634e-19 C * 2.99792458e9
      9.1093837015e-28,      // m_e
      1.602176634e-12);      // erg per eV
  return k;
}

const PhysicalConstants& unit_constants() {
  static const PhysicalConstants k = PhysicalConstants::make(1.0, 2.0 * pi, 1.0, 1.0, 1.0);
  return k;
}

}  // namespace fluxlab
