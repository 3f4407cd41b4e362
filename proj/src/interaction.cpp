#include "fluxlab/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "fluxlab/errors.hpp"
#include "overlap_quadrature.hpp"

namespace fluxlab {
namespace {

// Truncation estimates above this fraction of |Pi| are refused.
constexpr double kMaxTruncationRelError = 1e-2;

constexpr double kSimpsonTol = 1e-9;
constexpr double kSimpsonCoarseTol = 1e-6;

void require_finite_tube(const ChargeState& q, const FluxonState& f) {
  if (f.profile == TubeProfile::PointLimit) {
    throw InvalidArgument("numeric overlap needs a finite tube profile");
  }
  const double rho = std::hypot(q.position.x - f.position.x, q.position.y - f.position.y);
  if (!(rho > f.tube_radius / 10.0)) {
    throw InvalidArgument("charge must sit more than tube_radius/10 off the tube axis");
  }
}

struct ErrorBudget {
  double truncation;
  double cutoff;
};

// Error bounds per unit of e Phi/(2 pi c), before multiplying by the
// velocity factor for the Lagrangian.
ErrorBudget overlap_error_budget(const ChargeState& q, const FluxonState& f,
                                 const QuadratureSpec& spec, const detail::OverlapGeometry& g,
                                 const PhysicalConstants& k) {
  const double prefactor = std::abs(q.charge) / (2.0 * pi * k.c);
  const double scale = prefactor * std::abs(f.flux) / g.rho_charge;

  // Axial: the Coulomb z-integral truncated at Z keeps Z/sqrt(d^2 + Z^2) of
  // its value; d is at most the charge distance plus the tube extent.
  const double extent = f.profile == TubeProfile::GaussianTube ? 3.0 * f.tube_radius
                                                               : f.tube_radius;
  const double d_max = g.rho_charge + std::min(extent, g.rho_max);
  const double Z = spec.z_extent;
  const double axial = 1.0 - Z / std::hypot(d_max, Z);

  // Transverse: flux left outside rho_max.
  double outside = 0.0;
  if (f.profile == TubeProfile::GaussianTube) {
    outside = std::exp(-g.rho_max * g.rho_max / (2.0 * f.tube_radius * f.tube_radius));
  } else if (g.rho_max < f.tube_radius) {
    outside = 1.0 - (g.rho_max * g.rho_max) / (f.tube_radius * f.tube_radius);
  }

  // Excluded disk of radius a: the odd kernel cancels the constant part of
  // B, leaving |grad B| * pi a^2 / 2 per unit length along z, times 2.
  const double a = spec.inner_cutoff;
  double cutoff = 0.0;
  if (a > 0.0) {
    if (f.profile == TubeProfile::GaussianTube) {
      const double grad = std::abs(tube_field(f, g.rho_charge)) * g.rho_charge /
                          (f.tube_radius * f.tube_radius);
      cutoff = prefactor * grad * pi * a * a;
    } else if (std::abs(g.rho_charge - f.tube_radius) < a) {
      cutoff = prefactor * std::abs(tube_field(f, 0.0)) * 2.0 * a;
    }
  }
  return {scale * (axial + outside), cutoff};
}

void check_truncation(const ErrorBudget& budget, double scale) {
  if (budget.truncation + budget.cutoff > kMaxTruncationRelError * scale) {
    std::ostringstream msg;
    msg << "overlap quadrature truncation too tight: estimated error "
        << budget.truncation + budget.cutoff << " against magnitude " << scale;
    throw NonConvergenceError(msg.str(), budget.truncation + budget.cutoff);
  }
}

int coarse_points(int n) { return std::max(4, n / 2); }

template <class T, class F>
std::pair<T, double> integrate_with_estimate(const ChargeState& q, const FluxonState& f,
                                             const QuadratureSpec& spec,
                                             const detail::OverlapGeometry& g, F&& integrand) {
  const T fine = detail::integrate_overlap<T>(q, f, spec, g, spec.points_per_dim, kSimpsonTol,
                                              integrand);
  const T coarse = detail::integrate_overlap<T>(q, f, spec, g, coarse_points(spec.points_per_dim),
                                                kSimpsonCoarseTol, integrand);
  return {fine, quad::magnitude(fine - coarse)};
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
  }
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  return s;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(inner_cutoff >= 0.0 && inner_cutoff < outer_radius)) {
    throw InvalidArgument("quadrature requires 0 <= inner_cutoff < outer_radius");
  }
  if (!(z_extent > 0.0)) throw InvalidArgument("quadrature z_extent must be positive");
  if (points_per_dim < 8) throw InvalidArgument("quadrature needs at least 8 points per dim");
}

QuadratureSpec default_quadrature(const ChargeState& charge, const FluxonState& fluxon) {
  const double sep = std::hypot(charge.position.x - fluxon.position.x,
                                charge.position.y - fluxon.position.y);
  return {fluxon.tube_radius / 100.0, 100.0 * sep, 100.0 * sep, 16, QuadratureRule::GaussLegendre};
}

FluxDistribution::FluxDistribution(std::vector<FluxSample> samples,
                                   std::optional<double> declared_total)
    : samples_(std::move(samples)), total_flux_(0.0) {
  double magnitude = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!(s.area > 0.0)) {
      throw InvalidArgument("flux sample " + std::to_string(i) + " has non-positive area");
    }
    if (!is_finite(s.position) || !std::isfinite(s.Bz) || s.position.z != 0.0) {
      throw InvalidArgument("flux sample " + std::to_string(i) + " is not a finite planar point");
    }
    total_flux_ += s.Bz * s.area;
    magnitude += std::abs(s.Bz * s.area);
  }
  if (declared_total &&
      std::abs(*declared_total - total_flux_) > 1e-12 * std::max(magnitude, 1e-300)) {
    throw InvalidArgument("declared total flux disagrees with the sample sum");
  }
}

Vec3 FluxDistribution::centroid() const {
  Vec3 weighted;
  double w = 0.0;
  for (const auto& s : samples_) {
    weighted += s.position * (s.Bz * s.area);
    w += s.Bz * s.area;
  }
  if (w != 0.0) return weighted / w;
  Vec3 c;
  double a = 0.0;
  for (const auto& s : samples_) {
    c += s.position * s.area;
    a += s.area;
  }
  return a > 0.0 ? c / a : Vec3{};
}

double FluxDistribution::min_spacing() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : samples_) m = std::min(m, std::sqrt(s.area));
  return m;
}

FluxDistribution read_flux_distribution_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("flux distribution CSV is empty");
  const auto header = split_csv_line(strip(line));
  const std::vector<std::string> expected{"x_cm", "y_cm", "Bz_G", "area_cm2"};
  std::vector<std::string> got;
  for (const auto& h : header) got.push_back(strip(h));
  if (got != expected) {
    throw InvalidArgument("flux distribution CSV header must be 'x_cm,y_cm,Bz_G,area_cm2'");
  }
  std::vector<FluxSample> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 4) {
      throw InvalidArgument("line " + std::to_string(line_no) + ": expected 4 columns");
    }
    samples.push_back({{parse_number(strip(cells[0]), line_no), parse_number(strip(cells[1]), line_no)},
                       parse_number(strip(cells[2]), line_no),
                       parse_number(strip(cells[3]), line_no)});
  }
  return FluxDistribution(std::move(samples));
}

FluxDistribution read_flux_distribution_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open flux distribution file: " + path);
  return read_flux_distribution_csv(in);
}

void write_flux_distribution_csv(std::ostream& out, const FluxDistribution& dist) {
  out << "x_cm,y_cm,Bz_G,area_cm2\n" << std::setprecision(17);
  for (const auto& s : dist.samples()) {
    out << s.position.x << ',' << s.position.y << ',' << s.Bz << ',' << s.area << '\n';
  }
}

FluxDistribution uniform_disk_distribution(const Vec3& center, double radius, double total_flux,
                                           int sample_count) {
  if (!(radius > 0.0) || sample_count < 1) {
    throw InvalidArgument("disk distribution needs a positive radius and sample count");
  }
  // Rings of equal width; ring j gets a share (2j + 1)/rings^2 of the cells,
  // rounded by largest remainder so the total is exact.
  const int rings = std::clamp(static_cast<int>(std::lround(std::sqrt(sample_count / pi))), 1,
                               sample_count);
  std::vector<int> cells(rings);
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (int j = 0; j < rings; ++j) {
    const double share = static_cast<double>(sample_count) * (2 * j + 1) / (double(rings) * rings);
    cells[j] = std::max(1, static_cast<int>(std::floor(share)));
    assigned += cells[j];
    remainders.push_back({share - std::floor(share), j});
  }
  std::sort(remainders.begin(), remainders.end(), std::greater<>());
  for (std::size_t i = 0; assigned < sample_count; i = (i + 1) % remainders.size()) {
    ++cells[remainders[i].second];
    ++assigned;
  }
  for (int j = rings - 1; assigned > sample_count; j = j == 0 ? rings - 1 : j - 1) {
    if (cells[j] > 1) {
      --cells[j];
      --assigned;
    }
  }

  const double dr = radius / rings;
  const double Bz = total_flux / (pi * radius * radius);
  std::vector<FluxSample> samples;
  samples.reserve(sample_count);
  for (int j = 0; j < rings; ++j) {
    const double r1 = j * dr;
    const double r2 = (j + 1) * dr;
    const double area = pi * (r2 * r2 - r1 * r1) / cells[j];
    const double r_mid = j == 0 && cells[j] == 1 ? 0.0 : std::sqrt(0.5 * (r1 * r1 + r2 * r2));
    for (int i = 0; i < cells[j]; ++i) {
      const double th = 2.0 * pi * (i + 0.5 * (j % 2)) / cells[j];
      samples.push_back({center + Vec3{r_mid * std::cos(th), r_mid * std::sin(th)}, Bz, area});
    }
  }
  return FluxDistribution(std::move(samples));
}

Vec3 field_momentum_closed(double e, double flux, const Vec3& r, const Vec3& R,
                           const PhysicalConstants& k) {
  const Vec3 d = r - R;
  const double rho = std::hypot(d.x, d.y);
  if (rho == 0.0) throw SingularityError("field momentum evaluated at coincident points");
  return azimuthal_unit(d) * (e * flux / (2.0 * pi * k.c * rho));
}

Vec3 field_momentum_tube(double e, const FluxonState& fluxon, const Vec3& r,
                         const PhysicalConstants& k) {
  const Vec3 d = r - fluxon.position;
  const double rho = std::hypot(d.x, d.y);
  if (rho == 0.0) throw SingularityError("field momentum evaluated on the tube axis");
  return azimuthal_unit(d) * (e * enclosed_tube_flux(fluxon, rho) / (2.0 * pi * k.c * rho));
}

MomentumResult field_momentum_numeric(const ChargeState& charge, const FluxonState& fluxon,
                                      const QuadratureSpec& quad, const PhysicalConstants& k) {
  validate(charge, k);
  validate(fluxon, k);
  quad.validate();
  require_finite_tube(charge, fluxon);

  const auto geometry = detail::overlap_geometry(charge, fluxon, quad);
  const auto budget = overlap_error_budget(charge, fluxon, quad, geometry, k);
  const double scale =
      std::abs(charge.charge * fluxon.flux) / (2.0 * pi * k.c * geometry.rho_charge);
  check_truncation(budget, scale);

  const double prefactor = 1.0 / (4.0 * pi * k.c);
  const auto [value, qerr] = integrate_with_estimate<Vec3>(
      charge, fluxon, quad, geometry, [&](const Vec3& x) {
        return cross(charge_fields(charge, x, k).E, fluxon_fields(fluxon, x, k).B) * prefactor;
      });
  return {value, budget.truncation, budget.cutoff, qerr};
}

Vec3 field_momentum_distributed(double e, const FluxDistribution& dist, const Vec3& r,
                                const PhysicalConstants& k) {
  Vec3 sum;
  const auto& samples = dist.samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vec3 d = r - samples[i].position;
    const double rho2 = d.x * d.x + d.y * d.y;
    if (rho2 == 0.0) {
      throw SingularityError("field momentum evaluated on flux sample " + std::to_string(i));
    }
    // phi_hat / rho = (z_hat x d) / rho^2
    const double w = samples[i].Bz * samples[i].area / rho2;
    sum.x -= w * d.y;
    sum.y += w * d.x;
  }
  return sum * (e / (2.0 * pi * k.c));
}

Vec3 vector_potential_symmetric(double flux, const Vec3& R, const Vec3& x) {
  const Vec3 d = x - R;
  const double rho = std::hypot(d.x, d.y);
  if (rho == 0.0) throw SingularityError("vector potential evaluated on the flux line");
  return azimuthal_unit(d) * (flux / (2.0 * pi * rho));
}

LagrangianResult interaction_lagrangian(const ChargeState& charge, const FluxonState& fluxon,
                                        LagrangianMethod method, const PhysicalConstants& k) {
  if (method == LagrangianMethod::ClosedForm) {
    validate(charge, k);
    validate(fluxon, k);
    const Vec3 Pi = field_momentum_closed(charge.charge, fluxon.flux, charge.position,
                                          fluxon.position, k);
    return {dot(charge.velocity - fluxon.velocity, Pi), 0.0};
  }
  return interaction_lagrangian(charge, fluxon, method, default_quadrature(charge, fluxon), k);
}

LagrangianResult interaction_lagrangian(const ChargeState& charge, const FluxonState& fluxon,
                                        LagrangianMethod method, const QuadratureSpec& quad,
                                        const PhysicalConstants& k) {
  if (method == LagrangianMethod::ClosedForm) {
    return interaction_lagrangian(charge, fluxon, method, k);
  }
  validate(charge, k);
  validate(fluxon, k);
  quad.validate();
  require_finite_tube(charge, fluxon);

  const auto geometry = detail::overlap_geometry(charge, fluxon, quad);
  const auto budget = overlap_error_budget(charge, fluxon, quad, geometry, k);
  const double scale =
      std::abs(charge.charge * fluxon.flux) / (2.0 * pi * k.c * geometry.rho_charge);
  check_truncation(budget, scale);

  const auto [value, qerr] =
      integrate_with_estimate<double>(charge, fluxon, quad, geometry, [&](const Vec3& x) {
        return scalar_density(charge_fields(charge, x, k), fluxon_fields(fluxon, x, k));
      });
  const double speed = norm(charge.velocity - fluxon.velocity);
  return {value, (budget.truncation + budget.cutoff) * speed + qerr};
}

ConvergenceStudy overlap_convergence(const ChargeState& charge, const FluxonState& fluxon,
                                     std::span<const double> tube_fractions, int points_per_dim,
                                     const PhysicalConstants& k) {
  if (tube_fractions.empty()) throw InvalidArgument("convergence study needs tube fractions");
  const double sep = std::hypot(charge.position.x - fluxon.position.x,
                                charge.position.y - fluxon.position.y);
  ConvergenceStudy study;
  study.closed = field_momentum_closed(charge.charge, fluxon.flux, charge.position,
                                       fluxon.position, k);
  const double ref = norm(study.closed);
  for (double fraction : tube_fractions) {
    FluxonState tube = fluxon;
    tube.tube_radius = fraction * sep;
    if (tube.profile == TubeProfile::PointLimit) tube.profile = TubeProfile::GaussianTube;
    QuadratureSpec spec = default_quadrature(charge, tube);
    spec.points_per_dim = points_per_dim;
    const auto numeric = field_momentum_numeric(charge, tube, spec, k);
    study.points.push_back({tube.tube_radius, numeric, norm(numeric.value - study.closed) / ref});
  }
  if (study.points.size() >= 2) {
    const auto& a = study.points[study.points.size() - 2];
    const auto& b = study.points.back();
    const double ratio2 = (a.tube_radius / b.tube_radius) * (a.tube_radius / b.tube_radius);
    study.richardson = (b.numeric.value * ratio2 - a.numeric.value) / (ratio2 - 1.0);
  } else {
    study.richardson = study.points.back().numeric.value;
  }
  study.richardson_relative_error = norm(study.richardson - study.closed) / ref;
  return study;
}

}  // namespace fluxlab
