#include "fluxlab/phase.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "fluxlab/errors.hpp"
#include "fluxlab/quadrature.hpp"

namespace fluxlab {
namespace {

constexpr double kLineRelTol = 1e-8;
constexpr int kMaxBisections = 20;
constexpr int kLineNodes = 10;

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = norm2(ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

struct Piece {
  double lo;
  double hi;
  int depth;
};

double edge_integral(const Vec3& a, const Vec3& b, int pieces, const MomentumProvider& field,
                     const quad::GaussRule& gl) {
  const Vec3 ab = b - a;
  auto integrand = [&](double s) { return dot(field.momentum(a + ab * s), ab); };
  auto magnitude = [&](double s) { return std::abs(dot(field.momentum(a + ab * s), ab)); };

  double total = 0.0;
  std::vector<Piece> stack;
  for (int i = pieces - 1; i >= 0; --i) {
    stack.push_back({static_cast<double>(i) / pieces, static_cast<double>(i + 1) / pieces, 0});
  }
  while (!stack.empty()) {
    const Piece p = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (p.lo + p.hi);
    const double whole = quad::gauss<double>(gl, integrand, p.lo, p.hi);
    const double left = quad::gauss<double>(gl, integrand, p.lo, mid);
    const double right = quad::gauss<double>(gl, integrand, mid, p.hi);
    const double halves = left + right;
    const double scale = std::max(std::abs(halves), quad::gauss<double>(gl, magnitude, p.lo, p.hi));
    const double diff = std::abs(halves - whole);
    if (diff <= kLineRelTol * scale || diff <= 1e-15 * std::abs(whole) + 1e-300) {
      total += halves;
      continue;
    }
    if (p.depth + 1 > kMaxBisections) {
      throw NonConvergenceError("line quadrature did not converge after 20 bisections", diff);
    }
    stack.push_back({mid, p.hi, p.depth + 1});
    stack.push_back({p.lo, mid, p.depth + 1});
  }
  return total;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  return s;
}

}  // namespace

LoopPath::LoopPath(std::vector<Vec3> vertices, bool closed, int refinement)
    : vertices_(std::move(vertices)), closed_(closed), refinement_(refinement) {
  if (vertices_.size() > 1 && vertices_.front() == vertices_.back()) vertices_.pop_back();
  if (vertices_.size() < 3) throw InvalidArgument("loop needs at least three distinct vertices");
  if (refinement_ < 1) throw InvalidArgument("loop refinement must be at least 1");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!is_finite(vertices_[i]) || vertices_[i].z != 0.0) {
      throw InvalidArgument("loop vertex " + std::to_string(i) + " is not a finite planar point");
    }
  }
  for (std::size_t i = 0; i < edge_count(); ++i) {
    if (edge_start(i) == edge_end(i)) {
      throw InvalidArgument("loop has repeated consecutive vertices at index " + std::to_string(i));
    }
  }
}

LoopPath circle_loop(const Vec3& center, double radius, int vertices, int turns) {
  if (!(radius > 0.0) || vertices < 3 || turns == 0) {
    throw InvalidArgument("circle needs a positive radius, >= 3 vertices and nonzero turns");
  }
  const int total = vertices * std::abs(turns);
  const double dir = turns > 0 ? 1.0 : -1.0;
  std::vector<Vec3> v;
  v.reserve(total);
  for (int i = 0; i < total; ++i) {
    const double th = dir * 2.0 * pi * (i % vertices) / vertices;
    v.push_back(center + Vec3{radius * std::cos(th), radius * std::sin(th)});
  }
  return LoopPath(std::move(v));
}

LoopPath ellipse_loop(const Vec3& center, double semi_major, double semi_minor, double rotation,
                      int vertices) {
  if (!(semi_major > 0.0) || !(semi_minor > 0.0) || vertices < 3) {
    throw InvalidArgument("ellipse needs positive semi-axes and >= 3 vertices");
  }
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  std::vector<Vec3> v;
  for (int i = 0; i < vertices; ++i) {
    const double th = 2.0 * pi * i / vertices;
    const double x = semi_major * std::cos(th);
    const double y = semi_minor * std::sin(th);
    v.push_back(center + Vec3{c * x - s * y, s * x + c * y});
  }
  return LoopPath(std::move(v));
}

LoopPath square_loop(const Vec3& center, double half_side, double rotation) {
  if (!(half_side > 0.0)) throw InvalidArgument("square needs a positive half side");
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  std::vector<Vec3> v;
  for (const auto& [x, y] : {std::pair{1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}, {-1.0, -1.0}}) {
    v.push_back(center + Vec3{half_side * (c * x - s * y), half_side * (s * x + c * y)});
  }
  return LoopPath(std::move(v));
}

LoopPath star_loop(const Vec3& center, std::span<const double> radii) {
  const std::size_t n = radii.size();
  std::vector<Vec3> v;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(radii[i] > 0.0)) throw InvalidArgument("star loop radii must be positive");
    const double th = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
    v.push_back(center + Vec3{radii[i] * std::cos(th), radii[i] * std::sin(th)});
  }
  return LoopPath(std::move(v));
}

LoopPath concatenate(const LoopPath& a, const LoopPath& b) {
  if (!a.closed() || !b.closed()) throw InvalidArgument("only closed loops can be concatenated");
  std::vector<Vec3> v = a.vertices();
  const Vec3 a0 = a.vertices().front();
  const Vec3 b0 = b.vertices().front();
  if (a0 != b0) v.push_back(a0);
  v.insert(v.end(), b.vertices().begin(), b.vertices().end());
  if (a0 != b0) v.push_back(b0);
  return LoopPath(std::move(v), true, std::max(a.refinement(), b.refinement()));
}

LoopPath read_loop_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip(line) != "x_cm,y_cm") {
    throw InvalidArgument("loop CSV header must be 'x_cm,y_cm'");
  }
  std::vector<Vec3> v;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw InvalidArgument("loop CSV line " + std::to_string(line_no) + ": expected 2 columns");
    }
    try {
      std::size_t ux = 0, uy = 0;
      const std::string xs = strip(line.substr(0, comma));
      const std::string ys = strip(line.substr(comma + 1));
      const double x = std::stod(xs, &ux);
      const double y = std::stod(ys, &uy);
      if (ux != xs.size() || uy != ys.size()) throw std::invalid_argument(line);
      v.push_back({x, y});
    } catch (const std::logic_error&) {
      throw InvalidArgument("loop CSV line " + std::to_string(line_no) + ": not a number");
    }
  }
  return LoopPath(std::move(v));
}

LoopPath read_loop_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open loop file: " + path);
  return read_loop_csv(in);
}

MomentumProvider point_fluxon_momentum(double e, double flux, const Vec3& R,
                                       const PhysicalConstants& k) {
  return {[=, c = k](const Vec3& x) { return field_momentum_closed(e, flux, x, R, c); }, {R}, 0.0};
}

MomentumProvider distributed_momentum(double e, const FluxDistribution& dist,
                                      const PhysicalConstants& k, double exclusion_radius) {
  MomentumProvider p;
  p.momentum = [e, dist, c = k](const Vec3& x) { return field_momentum_distributed(e, dist, x, c); };
  for (const auto& s : dist.samples()) p.singular_points.push_back(s.position);
  p.exclusion_radius = exclusion_radius >= 0.0 ? exclusion_radius : 0.01 * dist.min_spacing();
  return p;
}

MomentumProvider fluxon_loop_momentum(double e, double flux, const Vec3& charge_position,
                                      const PhysicalConstants& k) {
  return {[=, c = k](const Vec3& x) {
            return -field_momentum_closed(e, flux, charge_position, x, c);
          },
          {charge_position},
          0.0};
}

double ab_phase(const LoopPath& loop, const MomentumProvider& pi_field,
                const PhysicalConstants& k) {
  if (!loop.closed()) throw InvalidArgument("AB phase needs a closed loop");
  for (std::size_t e = 0; e < loop.edge_count(); ++e) {
    for (std::size_t s = 0; s < pi_field.singular_points.size(); ++s) {
      const double d = point_segment_distance(pi_field.singular_points[s], loop.edge_start(e),
                                              loop.edge_end(e));
      if (d <= pi_field.exclusion_radius) {
        throw SingularityError("loop edge " + std::to_string(e) +
                               " enters the exclusion around singular point " + std::to_string(s));
      }
    }
  }
  const auto gl = quad::gauss_legendre(kLineNodes);
  double sum = 0.0;
  for (std::size_t e = 0; e < loop.edge_count(); ++e) {
    sum += edge_integral(loop.edge_start(e), loop.edge_end(e), loop.refinement(), pi_field, gl);
  }
  return sum / k.hbar;
}

double phase_quantum(double e, double flux, const PhysicalConstants& k) {
  return e * flux / (k.hbar * k.c);
}

int winding_number(const LoopPath& loop, const Vec3& point) {
  if (!loop.closed()) throw InvalidArgument("winding number needs a closed loop");
  double angle = 0.0;
  for (std::size_t i = 0; i < loop.edge_count(); ++i) {
    const Vec3 a = loop.edge_start(i) - point;
    const Vec3 b = loop.edge_end(i) - point;
    const double len = norm(b - a);
    if (point_segment_distance(point, loop.edge_start(i), loop.edge_end(i)) <= 1e-12 * len) {
      throw AmbiguityError("point lies on loop edge " + std::to_string(i));
    }
    angle += std::atan2(a.x * b.y - a.y * b.x, a.x * b.x + a.y * b.y);
  }
  return static_cast<int>(std::lround(angle / (2.0 * pi)));
}

double enclosed_flux(const LoopPath& loop, const FluxDistribution& dist) {
  double flux = 0.0;
  for (const auto& s : dist.samples()) flux += winding_number(loop, s.position) * s.Bz * s.area;
  return flux;
}

double fringe_shift(double phase) {
  const double turns = phase / (2.0 * pi);
  double frac = turns - std::floor(turns);
  if (frac >= 1.0) frac = 0.0;
  return frac;
}

}  // namespace fluxlab
