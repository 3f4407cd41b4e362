#include "fluxlab/em_kernel.hpp"

#include <cmath>
#include <string>

#include "fluxlab/errors.hpp"

namespace fluxlab {
namespace {

void check_planar(const Vec3& v, const char* what) {
  if (!is_finite(v)) throw InvalidArgument(std::string(what) + " has non-finite components");
  if (v.z != 0.0) throw InvalidArgument(std::string(what) + " must lie in the z = 0 plane");
}

}  // namespace

void validate(const ChargeState& charge, const PhysicalConstants& k) {
  check_planar(charge.position, "charge position");
  check_planar(charge.velocity, "charge velocity");
  if (!(norm(charge.velocity) < k.c)) throw InvalidArgument("charge speed must be below c");
  if (!(charge.mass > 0.0)) throw InvalidArgument("charge mass must be positive");
  if (!std::isfinite(charge.charge)) throw InvalidArgument("charge must be finite");
}

void validate(const FluxonState& fluxon, const PhysicalConstants& k) {
  check_planar(fluxon.position, "fluxon position");
  check_planar(fluxon.velocity, "fluxon velocity");
  if (!(norm(fluxon.velocity) < k.c)) throw InvalidArgument("fluxon speed must be below c");
  if (!(fluxon.mass > 0.0)) throw InvalidArgument("fluxon mass must be positive");
  if (!std::isfinite(fluxon.flux)) throw InvalidArgument("flux must be finite");
  if (!(fluxon.tube_radius >= 0.0) || !std::isfinite(fluxon.tube_radius)) {
    throw InvalidArgument("tube radius must be finite and non-negative");
  }
  if (fluxon.tube_radius == 0.0 && fluxon.profile != TubeProfile::PointLimit) {
    throw InvalidArgument("zero tube radius requires the PointLimit profile");
  }
}

FieldSample charge_fields(const ChargeState& charge, const Vec3& x, const PhysicalConstants& k) {
  const Vec3 d = x - charge.position;
  const double r2 = norm2(d);
  if (r2 == 0.0) throw SingularityError("charge field evaluated at the source point");
  const double r = std::sqrt(r2);
  const Vec3 E = d * (charge.charge / (r2 * r));
  return {E, cross(charge.velocity, E) / k.c};
}

double tube_field(const FluxonState& fluxon, double rho) {
  const double w = fluxon.tube_radius;
  switch (fluxon.profile) {
    case TubeProfile::PointLimit:
      return 0.0;
    case TubeProfile::UniformDisk:
      return rho <= w ? fluxon.flux / (pi * w * w) : 0.0;
    case TubeProfile::GaussianTube:
      return fluxon.flux / (2.0 * pi * w * w) * std::exp(-rho * rho / (2.0 * w * w));
  }
  return 0.0;
}

double enclosed_tube_flux(const FluxonState& fluxon, double rho) {
  const double w = fluxon.tube_radius;
  switch (fluxon.profile) {
    case TubeProfile::PointLimit:
      return fluxon.flux;
    case TubeProfile::UniformDisk:
      return rho >= w ? fluxon.flux : fluxon.flux * (rho * rho) / (w * w);
    case TubeProfile::GaussianTube:
      return -fluxon.flux * std::expm1(-rho * rho / (2.0 * w * w));
  }
  return fluxon.flux;
}

FieldSample fluxon_fields(const FluxonState& fluxon, const Vec3& x, const PhysicalConstants& k) {
  const double rho = std::hypot(x.x - fluxon.position.x, x.y - fluxon.position.y);
  if (fluxon.profile == TubeProfile::PointLimit) {
    if (rho == 0.0) throw SingularityError("point fluxon field evaluated on its axis");
    return {};
  }
  const Vec3 B{0.0, 0.0, tube_field(fluxon, rho)};
  return {-cross(fluxon.velocity, B) / k.c, B};
}

double scalar_density(const FieldSample& f1, const FieldSample& f2) {
  return (dot(f1.B, f2.B) - dot(f1.E, f2.E)) / (4.0 * pi);
}

FieldSample boost_fields(const FieldSample& f, const Vec3& beta) {
  const double b2 = norm2(beta);
  if (!(b2 < 1.0) || !is_finite(beta)) throw InvalidArgument("boost requires |beta| < 1");
  if (b2 == 0.0) return f;
  const double gamma = 1.0 / std::sqrt(1.0 - b2);
  // Split into components along and across beta.
  const Vec3 n = beta / std::sqrt(b2);
  const Vec3 E_par = n * dot(f.E, n);
  const Vec3 B_par = n * dot(f.B, n);
  const Vec3 E_t = f.E + cross(beta, f.B);
  const Vec3 B_t = f.B - cross(beta, f.E);
  return {E_par + (E_t - n * dot(E_t, n)) * gamma, B_par + (B_t - n * dot(B_t, n)) * gamma};
}

FieldTensor field_tensor(const FieldSample& f) {
  const auto& E = f.E;
  const auto& B = f.B;
  return {{{0.0, -E.x, -E.y, -E.z},
           {E.x, 0.0, -B.z, B.y},
           {E.y, B.z, 0.0, -B.x},
           {E.z, -B.y, B.x, 0.0}}};
}

double tensor_contraction(const FieldTensor& f1, const FieldTensor& f2) {
  static constexpr std::array<double, 4> metric{1.0, -1.0, -1.0, -1.0};
  double sum = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = 0; nu < 4; ++nu) {
      sum += metric[mu] * metric[nu] * f1[mu][nu] * f2[mu][nu];
    }
  }
  return sum;
}

}  // namespace fluxlab
