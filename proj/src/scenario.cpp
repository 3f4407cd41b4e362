#include "fluxlab/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "fluxlab/dynamics.hpp"
#include "fluxlab/em_kernel.hpp"
#include "fluxlab/errors.hpp"
#include "fluxlab/interaction.hpp"
#include "fluxlab/phase.hpp"
#include "fluxlab/shielding.hpp"

namespace fluxlab {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

enum class ParamType {
  Number,
  Positive,
  NonNegative,
  Fraction,  // [0, 1)
  Integer,
  NonNegativeInteger,
  PositiveInteger,
  String,
  Vec2,
  PositiveArray,
};

struct ParamSpec {
  std::string name;
  ParamType type;
  bool required;
  json fallback = nullptr;  // filled in when absent and not required
  std::vector<std::string> choices = {};
};

const std::map<ScenarioKind, std::vector<ParamSpec>>& schemas() {
  static const std::map<ScenarioKind, std::vector<ParamSpec>> table = {
      {ScenarioKind::LoopPhase,
       {{"constants", ParamType::String, false, "codata", {"codata", "unit"}},
        {"charge_statC", ParamType::Number, false},
        {"flux_Mx", ParamType::Number, false},
        {"flux_quanta", ParamType::Number, false},
        {"flux_csv", ParamType::String, false},
        {"fluxon_xy_cm", ParamType::Vec2, false, json::array({0.0, 0.0})},
        {"loop_csv", ParamType::String, false},
        {"circle_radius_cm", ParamType::Positive, false},
        {"center_xy_cm", ParamType::Vec2, false, json::array({0.0, 0.0})},
        {"vertices", ParamType::PositiveInteger, false, 256},
        {"turns", ParamType::Integer, false, 1}}},
      {ScenarioKind::TwoBodyDynamics,
       {{"constants", ParamType::String, false, "codata", {"codata", "unit"}},
        {"charge_statC", ParamType::Number, false},
        {"flux_Mx", ParamType::Number, true},
        {"mass_charge_g", ParamType::Positive, false},
        {"mass_fluxon_g", ParamType::Positive, true},
        {"r0_cm", ParamType::Vec2, true},
        {"R0_cm", ParamType::Vec2, false, json::array({0.0, 0.0})},
        {"v_charge_cm_per_s", ParamType::Vec2, true},
        {"v_fluxon_cm_per_s", ParamType::Vec2, false, json::array({0.0, 0.0})},
        {"duration_s", ParamType::Positive, true},
        {"dt_s", ParamType::Positive, false},
        {"integrator", ParamType::String, false, "rk4", {"rk4", "stormer_verlet"}},
        {"profile", ParamType::String, false, "point", {"point", "uniform_disk", "gaussian"}},
        {"tube_radius_cm", ParamType::NonNegative, false, 0.0},
        {"exclusion_radius_cm", ParamType::NonNegative, false, 0.0},
        {"max_energy_drift", ParamType::Positive, false, 1e-3},
        {"csv_stride", ParamType::PositiveInteger, false, 1}}},
      {ScenarioKind::CageCancellation,
       {{"constants", ParamType::String, false, "codata", {"codata", "unit"}},
        {"e_statC", ParamType::Number, false},
        {"a_cm", ParamType::Positive, true},
        {"R_cm", ParamType::Positive, true},
        {"omega_rad_per_s", ParamType::Number, true},
        {"flux_Mx", ParamType::Number, true},
        {"n_pairs", ParamType::NonNegativeInteger, false, 0}}},
      {ScenarioKind::ShieldDesign,
       {{"d_m", ParamType::Positive, true},
        {"gap_eV", ParamType::Positive, true},
        {"lambda_m", ParamType::Positive, false},
        {"v_e_m_per_s", ParamType::Positive, false}}},
      {ScenarioKind::CovarianceCheck,
       {{"cases", ParamType::PositiveInteger, false, 1000},
        {"beta_max", ParamType::Fraction, false, 0.9}}},
      {ScenarioKind::OverlapConvergence,
       {{"constants", ParamType::String, false, "codata", {"codata", "unit"}},
        {"charge_statC", ParamType::Number, false},
        {"flux_Mx", ParamType::Number, true},
        {"separation_cm", ParamType::Positive, true},
        {"profile", ParamType::String, false, "gaussian", {"gaussian", "uniform_disk"}},
        {"tube_fractions", ParamType::PositiveArray, false, json::array({0.04, 0.02, 0.01})},
        {"points_per_dim", ParamType::PositiveInteger, false, 16}}},
  };
  return table;
}

const std::map<std::string, ScenarioKind>& kind_names() {
  static const std::map<std::string, ScenarioKind> names = {
      {"loop_phase", ScenarioKind::LoopPhase},
      {"two_body_dynamics", ScenarioKind::TwoBodyDynamics},
      {"cage_cancellation", ScenarioKind::CageCancellation},
      {"shield_design", ScenarioKind::ShieldDesign},
      {"covariance_check", ScenarioKind::CovarianceCheck},
      {"overlap_convergence", ScenarioKind::OverlapConvergence},
  };
  return names;
}

// Line of the first `"key"` at or after `from`; falls back to `fallback_line`.
int line_of_key(std::string_view text, std::string_view key, std::size_t from, int fallback_line) {
  const std::string needle = "\"" + std::string(key) + "\"";
  const auto pos = text.find(needle, from);
  if (pos == std::string_view::npos) return fallback_line;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

int line_at(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

std::string type_problem(const json& v, ParamType type) {
  auto finite_number = [&] { return v.is_number() && std::isfinite(v.get<double>()); };
  switch (type) {
    case ParamType::Number:
      return finite_number() ? "" : "must be a finite number";
    case ParamType::Positive:
      if (!finite_number()) return "must be a finite number";
      return v.get<double>() > 0.0 ? "" : "must be positive (invariant violation)";
    case ParamType::NonNegative:
      if (!finite_number()) return "must be a finite number";
      return v.get<double>() >= 0.0 ? "" : "must be non-negative (invariant violation)";
    case ParamType::Fraction:
      if (!finite_number()) return "must be a finite number";
      return v.get<double>() >= 0.0 && v.get<double>() < 1.0 ? "" : "must lie in [0, 1)";
    case ParamType::Integer:
      return v.is_number_integer() ? "" : "must be an integer";
    case ParamType::NonNegativeInteger:
      if (!v.is_number_integer()) return "must be an integer";
      return v.get<long long>() >= 0 ? "" : "must be non-negative (invariant violation)";
    case ParamType::PositiveInteger:
      if (!v.is_number_integer()) return "must be an integer";
      return v.get<long long>() > 0 ? "" : "must be positive (invariant violation)";
    case ParamType::String:
      return v.is_string() ? "" : "must be a string";
    case ParamType::Vec2:
      if (!v.is_array() || v.size() != 2) return "must be an array of two numbers";
      for (const auto& x : v) {
        if (!x.is_number() || !std::isfinite(x.get<double>())) return "must be an array of two numbers";
      }
      return "";
    case ParamType::PositiveArray:
      if (!v.is_array() || v.empty()) return "must be a non-empty array of positive numbers";
      for (const auto& x : v) {
        if (!x.is_number() || !(x.get<double>() > 0.0)) {
          return "must be a non-empty array of positive numbers";
        }
      }
      return "";
  }
  return "";
}

const PhysicalConstants& constants_for(const json& params) {
  if (params.contains("constants") && params.at("constants") == "unit") return unit_constants();
  return codata();
}

int count_present(const json& params, std::initializer_list<const char*> keys) {
  int n = 0;
  for (const char* k : keys) n += params.contains(k) ? 1 : 0;
  return n;
}

// Cross-key rules and constants-dependent defaults.
void check_kind_rules(ScenarioKind kind, json& params, const std::function<void(std::string, std::string)>& fail) {
  const auto& k = constants_for(params);
  switch (kind) {
    case ScenarioKind::LoopPhase: {
      if (count_present(params, {"flux_Mx", "flux_quanta", "flux_csv"}) != 1) {
        fail("flux_Mx", "exactly one of flux_Mx, flux_quanta, flux_csv is required");
      }
      if (count_present(params, {"loop_csv", "circle_radius_cm"}) != 1) {
        fail("loop_csv", "exactly one of loop_csv, circle_radius_cm is required");
      }
      if (params.contains("vertices") && params["vertices"].is_number_integer() &&
          params["vertices"].get<long long>() < 3) {
        fail("vertices", "must be at least 3");
      }
      if (params.contains("turns") && params["turns"].is_number_integer() &&
          params["turns"].get<long long>() == 0) {
        fail("turns", "must be nonzero");
      }
      if (!params.contains("charge_statC")) params["charge_statC"] = k.e_charge;
      break;
    }
    case ScenarioKind::TwoBodyDynamics: {
      if (!params.contains("charge_statC")) params["charge_statC"] = k.e_charge;
      if (!params.contains("mass_charge_g")) params["mass_charge_g"] = k.m_electron;
      const bool tube = params.value("profile", "point") != "point";
      const double w = params.value("tube_radius_cm", 0.0);
      if (tube && !(w > 0.0)) fail("tube_radius_cm", "must be positive for a finite tube profile");
      if (!tube && w != 0.0) fail("tube_radius_cm", "must be zero for the point profile");
      for (const char* key : {"v_charge_cm_per_s", "v_fluxon_cm_per_s"}) {
        if (params.contains(key) && type_problem(params[key], ParamType::Vec2).empty()) {
          const double v = std::hypot(params[key][0].get<double>(), params[key][1].get<double>());
          if (!(v < k.c)) fail(key, "speed must be below c (invariant violation)");
        }
      }
      break;
    }
    case ScenarioKind::CageCancellation: {
      if (!params.contains("e_statC")) params["e_statC"] = k.e_charge;
      if (params.contains("a_cm") && params.contains("R_cm") && params["a_cm"].is_number() &&
          params["R_cm"].is_number() && !(params["a_cm"].get<double>() > params["R_cm"].get<double>())) {
        fail("a_cm", "must exceed R_cm (electron outside the cage; invariant violation)");
      }
      break;
    }
    case ScenarioKind::ShieldDesign: {
      if (count_present(params, {"lambda_m", "v_e_m_per_s"}) != 1) {
        fail("lambda_m", "exactly one of lambda_m, v_e_m_per_s is required");
      }
      if (params.contains("v_e_m_per_s") && params["v_e_m_per_s"].is_number() &&
          !(params["v_e_m_per_s"].get<double>() < SiConstants::from(k).c)) {
        fail("v_e_m_per_s", "must be below c (invariant violation)");
      }
      break;
    }
    case ScenarioKind::CovarianceCheck:
      break;
    case ScenarioKind::OverlapConvergence: {
      if (!params.contains("charge_statC")) params["charge_statC"] = k.e_charge;
      if (params.contains("points_per_dim") && params["points_per_dim"].is_number_integer() &&
          params["points_per_dim"].get<long long>() < 8) {
        fail("points_per_dim", "must be at least 8");
      }
      break;
    }
  }
}

Vec3 vec2(const json& v) { return {v[0].get<double>(), v[1].get<double>()}; }

json vec_json(const Vec3& v) { return json::array({v.x, v.y}); }

std::string resolve(const ScenarioConfig& c, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? p.string() : (fs::path(c.base_dir) / p).lexically_normal().string();
}

LoopPath loop_from(const ScenarioConfig& c) {
  const auto& p = c.parameters;
  if (p.contains("loop_csv")) return read_loop_csv(resolve(c, p["loop_csv"].get<std::string>()));
  return circle_loop(vec2(p["center_xy_cm"]), p["circle_radius_cm"].get<double>(),
                     p["vertices"].get<int>(), p["turns"].get<int>());
}

json run_loop_phase(const ScenarioConfig& c) {
  const auto& p = c.parameters;
  const auto& k = constants_for(p);
  const double e = p["charge_statC"].get<double>();
  const LoopPath loop = loop_from(c);
  json out;
  if (p.contains("flux_csv")) {
    const auto dist = read_flux_distribution_csv(resolve(c, p["flux_csv"].get<std::string>()));
    const double phase = ab_phase(loop, distributed_momentum(e, dist, k), k);
    const double enclosed = enclosed_flux(loop, dist);
    out["phase_rad"] = phase;
    out["winding"] = winding_number(loop, dist.centroid());
    out["enclosed_flux_Mx"] = enclosed;
    out["fringe_shift"] = fringe_shift(phase);
    out["stokes_phase_rad"] = phase_quantum(e, enclosed, k);
  } else {
    const double flux = p.contains("flux_Mx") ? p["flux_Mx"].get<double>()
                                               : p["flux_quanta"].get<double>() * k.flux_quantum();
    const Vec3 R = vec2(p["fluxon_xy_cm"]);
    const double phase = ab_phase(loop, point_fluxon_momentum(e, flux, R, k), k);
    const int winding = winding_number(loop, R);
    out["phase_rad"] = phase;
    out["winding"] = winding;
    out["enclosed_flux_Mx"] = winding * flux;
    out["fringe_shift"] = fringe_shift(phase);
    out["stokes_phase_rad"] = winding * phase_quantum(e, flux, k);
  }
  return out;
}

TubeProfile profile_named(const std::string& name) {
  if (name == "uniform_disk") return TubeProfile::UniformDisk;
  if (name == "gaussian") return TubeProfile::GaussianTube;
  return TubeProfile::PointLimit;
}

json run_dynamics(const ScenarioConfig& c, std::string& csv) {
  const auto& p = c.parameters;
  const auto& k = constants_for(p);
  const ChargeState charge{vec2(p["r0_cm"]), vec2(p["v_charge_cm_per_s"]),
                           p["charge_statC"].get<double>(), p["mass_charge_g"].get<double>()};
  const FluxonState fluxon{vec2(p["R0_cm"]), vec2(p["v_fluxon_cm_per_s"]), p["flux_Mx"].get<double>(),
                           p["mass_fluxon_g"].get<double>(), p["tube_radius_cm"].get<double>(),
                           profile_named(p["profile"].get<std::string>())};
  const auto initial = canonical_state(charge, fluxon, k);
  const double dt = p.contains("dt_s") ? p["dt_s"].get<double>()
                                       : default_time_step(initial, charge, fluxon, k);
  const Integrator integrator =
      p["integrator"] == "stormer_verlet" ? Integrator::StormerVerlet : Integrator::RK4;
  const auto traj = simulate(initial, p["duration_s"].get<double>(), dt, charge, fluxon, integrator,
                             {p["exclusion_radius_cm"].get<double>(), p["max_energy_drift"].get<double>()}, k);
  const auto rep = force_diagnostics(traj, charge, fluxon, k);

  Trajectory sampled;
  const std::size_t stride = p["csv_stride"].get<std::size_t>();
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    if (i % stride == 0 || i + 1 == traj.states.size()) {
      sampled.states.push_back(traj.states[i]);
      sampled.diagnostics.push_back(traj.diagnostics[i]);
    }
  }
  std::ostringstream os;
  write_trajectory_csv(os, sampled);
  csv = os.str();

  const auto& last = traj.states.back();
  const auto v_end = traj.kinetic_velocities.back();
  return {{"steps", traj.states.size() - 1},
          {"dt_s_used", traj.states[1].t - traj.states[0].t},
          {"max_accel_charge_cm_per_s2", rep.max_accel_charge},
          {"max_accel_fluxon_cm_per_s2", rep.max_accel_fluxon},
          {"max_third_law_residual_dyn", rep.max_third_law_residual},
          {"energy_drift_rel", rep.energy_drift},
          {"kinetic_momentum_drift_g_cm_per_s", rep.momentum_drift},
          {"max_canonical_residual_g_cm_per_s", rep.max_canonical_residual},
          {"final_r_cm", vec_json(last.r)},
          {"final_R_cm", vec_json(last.R)},
          {"final_v_charge_cm_per_s", vec_json(v_end.charge)},
          {"final_v_fluxon_cm_per_s", vec_json(v_end.fluxon)},
          {"initial_H_erg", traj.diagnostics.front().energy},
          {"final_H_erg", traj.diagnostics.back().energy}};
}

json run_cage(const ScenarioConfig& c) {
  const auto& p = c.parameters;
  const auto& k = constants_for(p);
  const CageScenario s{p["e_statC"].get<double>(), p["a_cm"].get<double>(), p["R_cm"].get<double>(),
                       p["omega_rad_per_s"].get<double>(), p["flux_Mx"].get<double>(),
                       p["n_pairs"].get<int>()};
  const auto terms = cage_interaction_terms(s, k);
  const auto induced = total_induced_charge(s);
  const auto surface = total_surface_charge(s);
  return {{"L_eF_erg", terms.L_eF},
          {"L_sF_erg", terms.L_sF},
          {"residual_erg", terms.residual},
          {"relative_residual", terms.L_eF != 0.0 ? std::abs(terms.residual / terms.L_eF) : 0.0},
          {"quadrature_points", terms.quadrature_points},
          {"induced_charge_statC", induced.value},
          {"total_surface_charge_statC", surface.value},
          {"expected_surface_charge_statC", 2.0 * s.n_pairs * s.e}};
}

json run_shield(const ScenarioConfig& c) {
  const auto design = shield_design_from_json(c.parameters);
  const auto rep = shield_report(design);
  json out = to_json(rep);
  out["v_e_m_per_s"] = rep.kinematics.v_e;
  out["gamma"] = rep.kinematics.gamma;
  out["kinetic_energy_eV"] = rep.kinematics.kinetic_energy_eV;
  return out;
}

json run_covariance(const ScenarioConfig& c) {
  const auto& p = c.parameters;
  const int cases = p["cases"].get<int>();
  const double beta_max = p["beta_max"].get<double>();
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  auto random_vec = [&] { return Vec3{unit(rng), unit(rng), unit(rng)}; };
  double worst = 0.0;
  double worst_tensor = 0.0;
  for (int i = 0; i < cases; ++i) {
    const FieldSample f1{random_vec(), random_vec()};
    const FieldSample f2{random_vec(), random_vec()};
    Vec3 dir;
    do dir = random_vec();
    while (norm(dir) < 1e-3 || norm(dir) > 1.0);
    const Vec3 beta = dir / norm(dir) * (beta_max * frac(rng));
    const double before = scalar_density(f1, f2);
    const double after = scalar_density(boost_fields(f1, beta), boost_fields(f2, beta));
    const double scale = (norm(f1.B) * norm(f2.B) + norm(f1.E) * norm(f2.E)) / (4.0 * pi);
    worst = std::max(worst, std::abs(after - before) / scale);
    const double tensor = tensor_contraction(field_tensor(f1), field_tensor(f2)) / (8.0 * pi);
    worst_tensor = std::max(worst_tensor, std::abs(tensor - before) / scale);
  }
  return {{"cases", cases},
          {"max_relative_error", worst},
          {"max_tensor_identity_error", worst_tensor},
          {"passed", worst <= 1e-9}};
}

json run_overlap(const ScenarioConfig& c) {
  const auto& p = c.parameters;
  const auto& k = constants_for(p);
  const double sep = p["separation_cm"].get<double>();
  const ChargeState charge{{sep, 0.0}, {}, p["charge_statC"].get<double>(), 1.0};
  const FluxonState fluxon{{}, {}, p["flux_Mx"].get<double>(), 1.0, 0.0,
                           profile_named(p["profile"].get<std::string>())};
  const auto fractions = p["tube_fractions"].get<std::vector<double>>();
  const auto study = overlap_convergence(charge, fluxon, fractions, p["points_per_dim"].get<int>(), k);
  json points = json::array();
  bool monotone = true;
  for (std::size_t i = 0; i < study.points.size(); ++i) {
    const auto& pt = study.points[i];
    if (i > 0 && !(pt.relative_error < study.points[i - 1].relative_error)) monotone = false;
    points.push_back({{"tube_radius_cm", pt.tube_radius},
                      {"Pi_numeric_g_cm_per_s", vec_json(pt.numeric.value)},
                      {"relative_error", pt.relative_error},
                      {"error_estimate_g_cm_per_s", pt.numeric.error_estimate()}});
  }
  return {{"Pi_closed_g_cm_per_s", vec_json(study.closed)},
          {"points", points},
          {"monotone_improvement", monotone},
          {"richardson_g_cm_per_s", vec_json(study.richardson)},
          {"richardson_relative_error", study.richardson_relative_error}};
}

json tolerances_for(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::LoopPhase:
      return {{"line_quadrature_rel", 1e-8}, {"max_bisections", 20}};
    case ScenarioKind::TwoBodyDynamics:
      return {{"stormer_verlet_fixed_point", "4 ulp"}};
    case ScenarioKind::CageCancellation:
      return {{"surface_trapezoid_rel", 1e-14}};
    case ScenarioKind::ShieldDesign:
      return {{"classification", "Shielded iff gamma_v < threshold"}};
    case ScenarioKind::CovarianceCheck:
      return {{"max_relative_error", 1e-9}};
    case ScenarioKind::OverlapConvergence:
      return {{"max_truncation_rel", 1e-2}, {"cutoff_over_tube_radius", 1e-2},
              {"truncation_over_separation", 100.0}};
  }
  return json::object();
}

void print_errors(std::ostream& err, const std::string& source, const std::vector<ValidationError>& errors) {
  for (const auto& e : errors) err << source << ':' << e.line << ": " << e.message << '\n';
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  for (const auto& [name, k] : kind_names()) {
    if (k == kind) return name;
  }
  return "unknown";
}

ValidationResult validate_config(std::string_view text, std::string base_dir) {
  ValidationResult result;
  auto fail = [&](int line, std::string msg) { result.errors.push_back({line, std::move(msg)}); };

  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(line_at(text, e.byte > 0 ? e.byte - 1 : 0), std::string("JSON parse error: ") + e.what());
    return result;
  }
  if (!doc.is_object()) {
    fail(1, "config must be a JSON object");
    return result;
  }

  for (const auto& [key, value] : doc.items()) {
    if (key != "kind" && key != "parameters" && key != "output_path" && key != "seed") {
      fail(line_of_key(text, key, 0, 1), "unknown key '" + key + "'");
    }
  }

  ScenarioConfig config{};
  config.base_dir = std::move(base_dir);
  std::optional<ScenarioKind> kind;
  if (!doc.contains("kind")) {
    fail(1, "missing required key 'kind'");
  } else if (!doc["kind"].is_string() || !kind_names().contains(doc["kind"].get<std::string>())) {
    fail(line_of_key(text, "kind", 0, 1),
         "'kind' must be one of loop_phase, two_body_dynamics, cage_cancellation, shield_design, "
         "covariance_check, overlap_convergence");
  } else {
    kind = kind_names().at(doc["kind"].get<std::string>());
  }

  if (!doc.contains("output_path")) {
    fail(1, "missing required key 'output_path'");
  } else if (!doc["output_path"].is_string() || doc["output_path"].get<std::string>().empty()) {
    fail(line_of_key(text, "output_path", 0, 1), "'output_path' must be a non-empty string");
  } else {
    config.output_path = doc["output_path"].get<std::string>();
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      fail(line_of_key(text, "seed", 0, 1), "'seed' must be a non-negative integer");
    } else {
      config.seed = doc["seed"].get<std::uint64_t>();
    }
  }

  const std::size_t params_pos = text.find("\"parameters\"");
  const int params_line = line_of_key(text, "parameters", 0, 1);
  json params = json::object();
  if (!doc.contains("parameters")) {
    fail(1, "missing required key 'parameters'");
  } else if (!doc["parameters"].is_object()) {
    fail(params_line, "'parameters' must be an object");
  } else {
    params = doc["parameters"];
  }

  if (kind && params.is_object()) {
    const std::size_t from = params_pos == std::string_view::npos ? 0 : params_pos;
    auto key_fail = [&](const std::string& key, const std::string& msg) {
      const int line = params.contains(key) ? line_of_key(text, key, from, params_line) : params_line;
      fail(line, key + ": " + msg);
    };
    const auto& schema = schemas().at(*kind);
    for (const auto& [key, value] : params.items()) {
      const auto it = std::find_if(schema.begin(), schema.end(),
                                   [&](const ParamSpec& s) { return s.name == key; });
      if (it == schema.end()) {
        key_fail(key, "unknown parameter for kind " + to_string(*kind));
        continue;
      }
      if (const auto problem = type_problem(value, it->type); !problem.empty()) {
        key_fail(key, problem);
      } else if (!it->choices.empty() &&
                 std::find(it->choices.begin(), it->choices.end(), value.get<std::string>()) ==
                     it->choices.end()) {
        std::string list;
        for (const auto& ch : it->choices) list += (list.empty() ? "" : ", ") + ch;
        key_fail(key, "must be one of " + list);
      }
    }
    for (const auto& spec : schema) {
      if (params.contains(spec.name)) continue;
      if (spec.required) {
        fail(params_line, "missing required parameter '" + spec.name + "'");
      } else if (!spec.fallback.is_null()) {
        params[spec.name] = spec.fallback;
      }
    }
    const std::size_t before = result.errors.size();
    if (before == 0) check_kind_rules(*kind, params, key_fail);
  }

  if (result.errors.empty()) {
    config.kind = *kind;
    config.parameters = std::move(params);
    result.config = std::move(config);
  }
  return result;
}

json to_json(const ScenarioConfig& config) {
  return {{"kind", to_string(config.kind)},
          {"parameters", config.parameters},
          {"output_path", config.output_path},
          {"seed", config.seed}};
}

std::string serialize(const ScenarioConfig& config) { return to_json(config).dump(2) + "\n"; }

ScenarioOutput run_scenario(const ScenarioConfig& config) {
  ScenarioOutput out;
  json results;
  switch (config.kind) {
    case ScenarioKind::LoopPhase:
      results = run_loop_phase(config);
      break;
    case ScenarioKind::TwoBodyDynamics:
      results = run_dynamics(config, out.trajectory_csv);
      break;
    case ScenarioKind::CageCancellation:
      results = run_cage(config);
      break;
    case ScenarioKind::ShieldDesign:
      results = run_shield(config);
      break;
    case ScenarioKind::CovarianceCheck:
      results = run_covariance(config);
      break;
    case ScenarioKind::OverlapConvergence:
      results = run_overlap(config);
      break;
  }
  out.report = {{"fluxlab_version", kVersion},
                {"kind", to_string(config.kind)},
                {"input", to_json(config)},
                {"tolerances", tolerances_for(config.kind)},
                {"results", results}};
  if (config.kind == ScenarioKind::TwoBodyDynamics) {
    out.report["tolerances"]["max_energy_drift"] = config.parameters["max_energy_drift"];
  }
  return out;
}

std::string trajectory_path(const std::string& report_path) {
  fs::path p(report_path);
  const auto stem = p.stem().string();
  return (p.parent_path() / (stem + "_trajectory.csv")).string();
}

json constants_json(const PhysicalConstants& k) {
  return {{"c_cm_per_s", k.c},
          {"h_erg_s", k.h},
          {"hbar_erg_s", k.hbar},
          {"e_statC", k.e_charge},
          {"m_electron_g", k.m_electron},
          {"erg_per_eV", k.erg_per_eV},
          {"flux_quantum_Mx", k.flux_quantum()}};
}

int validate_config_file(const std::string& path, std::ostream& out, std::ostream& err) {
  const auto text = read_file(path);
  if (!text) {
    err << path << ": cannot read config file\n";
    return kExitValidation;
  }
  const auto result = validate_config(*text, fs::path(path).parent_path().string());
  if (!result.config) {
    print_errors(err, path, result.errors);
    return kExitValidation;
  }
  out << serialize(*result.config);
  return kExitOk;
}

int run_config_file(const std::string& path, std::ostream& out, std::ostream& err) {
  const auto text = read_file(path);
  if (!text) {
    err << path << ": cannot read config file\n";
    return kExitValidation;
  }
  auto dir = fs::path(path).parent_path().string();
  if (dir.empty()) dir = ".";
  const auto result = validate_config(*text, dir);
  if (!result.config) {
    print_errors(err, path, result.errors);
    return kExitValidation;
  }
  const auto& config = *result.config;
  ScenarioOutput output;
  try {
    output = run_scenario(config);
  } catch (const InvalidArgument& e) {
    err << path << ":1: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NonConvergenceError& e) {
    err << path << ": numeric failure: " << e.what() << " (estimated error " << e.estimated_error()
        << ")\n";
    return kExitNumeric;
  } catch (const Error& e) {
    err << path << ": numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }

  const fs::path report_path = fs::path(config.output_path).is_absolute()
                                   ? fs::path(config.output_path)
                                   : fs::path(dir) / config.output_path;
  std::ofstream report(report_path, std::ios::binary);
  if (!report) {
    err << report_path.string() << ": cannot write report\n";
    return kExitIo;
  }
  report << output.report.dump(2) << '\n';
  out << "wrote " << report_path.string() << '\n';
  if (config.kind == ScenarioKind::TwoBodyDynamics) {
    const auto csv_path = trajectory_path(report_path.string());
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) {
      err << csv_path << ": cannot write trajectory\n";
      return kExitIo;
    }
    csv << output.trajectory_csv;
    out << "wrote " << csv_path << '\n';
  }
  return kExitOk;
}

}  // namespace fluxlab
