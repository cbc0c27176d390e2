#include "fowt/config.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "fowt/error.hpp"
#include "json.hpp"

namespace fowt::workflow {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Infinite limits are stored as null.
json finite_or_null(double v) { return std::isinf(v) ? json(nullptr) : json(v); }
/// A null in a patch removes the key during merging, so absence also means unbounded.
double number_or_inf(const json& parent, const char* key) {
  return !parent.contains(key) || parent.at(key).is_null() ? kInf : parent.at(key).get<double>();
}

json interval_json(const spectral::Interval& i) { return json::array({i.lo, i.hi}); }
spectral::Interval interval_from(const json& j, const std::string& key) {
  require(j.is_array() && j.size() == 2, ErrorKind::Config, key + " must be a [lo, hi] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

json constraints_json(const design::ConstraintConfig& c) {
  return {{"gamma_f", c.gamma_f},
          {"gamma_m", c.gamma_m},
          {"gamma_n", c.gamma_n},
          {"gamma_d", c.gamma_d},
          {"f1_band_land_hz", interval_json(c.f1_band_land)},
          {"dt_ratio_band", interval_json(c.dt_ratio_band)},
          {"taper_band", interval_json(c.taper_band)},
          {"fatigue_limit", c.fatigue_limit}};
}

design::ConstraintConfig constraints_from(const json& j) {
  design::ConstraintConfig c;
  c.gamma_f = j.at("gamma_f").get<double>();
  c.gamma_m = j.at("gamma_m").get<double>();
  c.gamma_n = j.at("gamma_n").get<double>();
  c.gamma_d = j.at("gamma_d").get<double>();
  c.f1_band_land = interval_from(j.at("f1_band_land_hz"), "f1_band_land_hz");
  c.dt_ratio_band = interval_from(j.at("dt_ratio_band"), "dt_ratio_band");
  c.taper_band = interval_from(j.at("taper_band"), "taper_band");
  c.fatigue_limit = j.at("fatigue_limit").get<double>();
  return c;
}

json to_json(const ProjectConfig& c) {
  json j;
  const auto& p = c.plan;
  j["sampling"] = {{"n_u", p.n_u},
                   {"n_hs", p.n_hs},
                   {"n_tp", p.n_tp},
                   {"n_seeds", p.n_seeds},
                   {"v_in_ms", p.v_in},
                   {"v_out_ms", p.v_out},
                   {"turbulent", p.turbulent},
                   {"iec_class", env::to_string(p.iec_class)},
                   {"m_ww_fixed_rad", p.m_ww_fixed}};
  j["wind_model"] = {{"alpha_ms", c.wind.alpha}, {"beta", c.wind.beta}, {"delta", c.wind.delta}};

  const auto& s = c.simulation;
  const auto& sp = s.surrogate;
  j["simulation"] = {{"duration_s", s.duration},
                     {"dt_s", s.dt},
                     {"trim_s", s.trim},
                     {"seed", s.seed},
                     {"n_stations", s.n_stations},
                     {"surrogate",
                      {{"damping_ratio", sp.damping_ratio},
                       {"mode_frequency_hz", sp.mode_frequency},
                       {"tower_base_elevation_m", sp.tower_base_elevation},
                       {"aero_moment_arm_m", sp.aero_moment_arm},
                       {"kaimal_length_m", sp.kaimal_length},
                       {"rotor_averaging", sp.rotor_averaging},
                       {"rpm_filter_time_s", sp.rpm_filter_time},
                       {"harmonic_1p", sp.harmonic_1p},
                       {"harmonic_3p", sp.harmonic_3p},
                       {"column_diameter_m", sp.column_diameter},
                       {"column_draft_m", sp.column_draft},
                       {"inertia_coefficient", sp.inertia_coefficient},
                       {"wave_lever_m", sp.wave_lever},
                       {"pitch_stiffness_nm_per_rad", sp.pitch_stiffness},
                       {"pitch_inertia_kgm2", sp.pitch_inertia},
                       {"heave_stiffness_n_per_m", sp.heave_stiffness},
                       {"heave_response_ratio", sp.heave_response_ratio},
                       {"regular_waves", sp.regular_waves}}}};

  const auto& r = c.rotor;
  json curve = json::array();
  for (const auto& [u, ct] : r.thrust_coefficient_curve) curve.push_back({u, ct});
  j["rotor"] = {{"rated_power_w", r.rated_power},
                {"rotor_diameter_m", r.rotor_diameter},
                {"hub_height_m", r.hub_height},
                {"rna_mass_kg", r.rna_mass},
                {"cut_in_ms", r.cut_in},
                {"rated_speed_ms", r.rated_speed},
                {"cut_out_ms", r.cut_out},
                {"min_rpm", r.min_rpm},
                {"max_rpm", r.max_rpm},
                {"ct_below_rated", r.ct_below_rated},
                {"thrust_coefficient_curve", curve}};

  const auto& pl = c.platform;
  json comps = json::array();
  for (const auto& m : pl.component_masses_and_offsets)
    comps.push_back({{"name", m.name}, {"mass_kg", m.mass}, {"x_m", m.x}});
  j["platform"] = {{"column_distance_m", pl.column_distance_L},
                   {"column_diameter_m", pl.column_diameter},
                   {"initial_platform_mass_kg", pl.initial_platform_mass},
                   {"water_density_kgm3", pl.water_density},
                   {"z_hub_m", pl.z_hub},
                   {"z_struct_m", pl.z_struct},
                   {"shaft_tilt_rad", pl.shaft_tilt_theta},
                   {"column_capacity_kg", finite_or_null(pl.column_capacity)},
                   {"components", comps},
                   {"ballast_safety_factor", c.ballast_safety_factor}};

  const auto& m = c.material;
  j["tower"] = {{"reference_geometry", c.reference_geometry_path},
                {"material",
                 {{"density_kgm3", m.density},
                  {"youngs_modulus_pa", m.youngs_modulus},
                  {"shear_modulus_pa", m.shear_modulus},
                  {"poisson", m.poisson},
                  {"yield_strength_pa", m.yield_strength}}},
                {"rna_mass_kg", c.rna.mass},
                {"rna_com_offset_m", c.rna.com_offset},
                {"top_force_n", c.loads.force},
                {"top_moment_nm", c.loads.moment},
                {"buckling_knockdown", c.structural.buckling.knockdown},
                {"elements_per_section", c.structural.frequency.elements_per_section},
                {"inverse_r_i", c.structural.frequency.inverse_r_i},
                {"cost_rate_per_kg", c.structural.cost_rate}};

  const auto& sn = c.sn_curve;
  j["sn_curve"] = {{"log10_a1", sn.log10_a1},
                   {"m1", sn.m1},
                   {"log10_a2", sn.log10_a2},
                   {"m2", sn.m2},
                   {"n_transition", finite_or_null(sn.n_transition)},
                   {"thickness_exponent_k", sn.thickness_exponent_k},
                   {"t_ref_m", sn.t_ref}};
  j["estimator"] = {{"m", c.estimator.m}, {"k", c.estimator.k}, {"t_ref_m", c.estimator.t_ref}};
  j["psd"] = {{"segment_length", c.psd.segment_length},
              {"f_range_hz", interval_json(c.psd.f_range)},
              {"station", c.psd.station}};

  json cycles = json::array();
  for (const auto& cc : c.cycle_constraints) cycles.push_back(constraints_json(cc));
  j["optimizer"] = {{"fd_step", c.optimizer.fd_step},
                    {"tol", c.optimizer.tol},
                    {"max_iter", c.optimizer.max_iter},
                    {"bounds",
                     {{"d_min_m", c.bounds.d_min},
                      {"d_max_m", c.bounds.d_max},
                      {"t_min_m", c.bounds.t_min},
                      {"t_max_m", c.bounds.t_max}}},
                    {"cycles", cycles}};
  j["workflow"] = {{"lifetime_s", c.lifetime},
                   {"event_duration_s", c.event_duration},
                   {"max_cycles", c.max_cycles},
                   {"reuse_reference_mode", c.reuse_reference_mode},
                   {"damage_limit", c.damage_limit},
                   {"max_relative_error", c.max_relative_error},
                   {"output_dir", c.output_dir},
                   {"jobs", c.jobs}};
  return j;
}

ProjectConfig from_json(const json& j) {
  ProjectConfig c;
  const auto& sa = j.at("sampling");
  c.plan.n_u = sa.at("n_u").get<int>();
  c.plan.n_hs = sa.at("n_hs").get<int>();
  c.plan.n_tp = sa.at("n_tp").get<int>();
  c.plan.n_seeds = sa.at("n_seeds").get<int>();
  c.plan.v_in = sa.at("v_in_ms").get<double>();
  c.plan.v_out = sa.at("v_out_ms").get<double>();
  c.plan.turbulent = sa.at("turbulent").get<bool>();
  c.plan.iec_class = env::parse_iec_class(sa.at("iec_class").get<std::string>());
  c.plan.m_ww_fixed = sa.at("m_ww_fixed_rad").get<double>();
  const auto& wm = j.at("wind_model");
  c.wind.alpha = wm.at("alpha_ms").get<double>();
  c.wind.beta = wm.at("beta").get<double>();
  c.wind.delta = wm.at("delta").get<double>();

  const auto& si = j.at("simulation");
  auto& s = c.simulation;
  s.duration = si.at("duration_s").get<double>();
  s.dt = si.at("dt_s").get<double>();
  s.trim = si.at("trim_s").get<double>();
  s.seed = si.at("seed").get<std::uint64_t>();
  s.n_stations = si.at("n_stations").get<int>();
  const auto& su = si.at("surrogate");
  auto& sp = s.surrogate;
  sp.damping_ratio = su.at("damping_ratio").get<double>();
  sp.mode_frequency = su.at("mode_frequency_hz").get<double>();
  sp.tower_base_elevation = su.at("tower_base_elevation_m").get<double>();
  sp.aero_moment_arm = su.at("aero_moment_arm_m").get<double>();
  sp.kaimal_length = su.at("kaimal_length_m").get<double>();
  sp.rotor_averaging = su.at("rotor_averaging").get<double>();
  sp.rpm_filter_time = su.at("rpm_filter_time_s").get<double>();
  sp.harmonic_1p = su.at("harmonic_1p").get<double>();
  sp.harmonic_3p = su.at("harmonic_3p").get<double>();
  sp.column_diameter = su.at("column_diameter_m").get<double>();
  sp.column_draft = su.at("column_draft_m").get<double>();
  sp.inertia_coefficient = su.at("inertia_coefficient").get<double>();
  sp.wave_lever = su.at("wave_lever_m").get<double>();
  sp.pitch_stiffness = su.at("pitch_stiffness_nm_per_rad").get<double>();
  sp.pitch_inertia = su.at("pitch_inertia_kgm2").get<double>();
  sp.heave_stiffness = su.at("heave_stiffness_n_per_m").get<double>();
  sp.heave_response_ratio = su.at("heave_response_ratio").get<double>();
  sp.regular_waves = su.at("regular_waves").get<bool>();

  const auto& ro = j.at("rotor");
  auto& r = c.rotor;
  r.rated_power = ro.at("rated_power_w").get<double>();
  r.rotor_diameter = ro.at("rotor_diameter_m").get<double>();
  r.hub_height = ro.at("hub_height_m").get<double>();
  r.rna_mass = ro.at("rna_mass_kg").get<double>();
  r.cut_in = ro.at("cut_in_ms").get<double>();
  r.rated_speed = ro.at("rated_speed_ms").get<double>();
  r.cut_out = ro.at("cut_out_ms").get<double>();
  r.min_rpm = ro.at("min_rpm").get<double>();
  r.max_rpm = ro.at("max_rpm").get<double>();
  r.ct_below_rated = ro.at("ct_below_rated").get<double>();
  r.thrust_coefficient_curve.clear();
  for (const auto& row : ro.at("thrust_coefficient_curve")) {
    require(row.is_array() && row.size() == 2, ErrorKind::Config,
            "thrust_coefficient_curve rows must be [u_ms, ct] pairs");
    r.thrust_coefficient_curve.emplace_back(row[0].get<double>(), row[1].get<double>());
  }

  const auto& pj = j.at("platform");
  auto& pl = c.platform;
  pl.column_distance_L = pj.at("column_distance_m").get<double>();
  pl.column_diameter = pj.at("column_diameter_m").get<double>();
  pl.initial_platform_mass = pj.at("initial_platform_mass_kg").get<double>();
  pl.water_density = pj.at("water_density_kgm3").get<double>();
  pl.z_hub = pj.at("z_hub_m").get<double>();
  pl.z_struct = pj.at("z_struct_m").get<double>();
  pl.shaft_tilt_theta = pj.at("shaft_tilt_rad").get<double>();
  pl.column_capacity = number_or_inf(pj, "column_capacity_kg");
  pl.component_masses_and_offsets.clear();
  for (const auto& m : pj.at("components"))
    pl.component_masses_and_offsets.push_back(
        {m.at("name").get<std::string>(), m.at("mass_kg").get<double>(), m.at("x_m").get<double>()});
  c.ballast_safety_factor = pj.at("ballast_safety_factor").get<double>();

  const auto& tw = j.at("tower");
  c.reference_geometry_path = tw.at("reference_geometry").get<std::string>();
  const auto& ma = tw.at("material");
  c.material.density = ma.at("density_kgm3").get<double>();
  c.material.youngs_modulus = ma.at("youngs_modulus_pa").get<double>();
  c.material.shear_modulus = ma.at("shear_modulus_pa").get<double>();
  c.material.poisson = ma.at("poisson").get<double>();
  c.material.yield_strength = ma.at("yield_strength_pa").get<double>();
  c.rna.mass = tw.at("rna_mass_kg").get<double>();
  c.rna.com_offset = tw.at("rna_com_offset_m").get<std::array<double, 3>>();
  c.loads.force = tw.at("top_force_n").get<std::array<double, 3>>();
  c.loads.moment = tw.at("top_moment_nm").get<std::array<double, 3>>();
  c.structural.buckling.knockdown = tw.at("buckling_knockdown").get<double>();
  c.structural.frequency.elements_per_section = tw.at("elements_per_section").get<int>();
  c.structural.frequency.inverse_r_i = tw.at("inverse_r_i").get<double>();
  c.structural.cost_rate = tw.at("cost_rate_per_kg").get<double>();

  const auto& sn = j.at("sn_curve");
  c.sn_curve.log10_a1 = sn.at("log10_a1").get<double>();
  c.sn_curve.m1 = sn.at("m1").get<double>();
  c.sn_curve.log10_a2 = sn.at("log10_a2").get<double>();
  c.sn_curve.m2 = sn.at("m2").get<double>();
  c.sn_curve.n_transition = number_or_inf(sn, "n_transition");
  c.sn_curve.thickness_exponent_k = sn.at("thickness_exponent_k").get<double>();
  c.sn_curve.t_ref = sn.at("t_ref_m").get<double>();

  const auto& es = j.at("estimator");
  c.estimator.m = es.at("m").get<double>();
  c.estimator.k = es.at("k").get<double>();
  c.estimator.t_ref = es.at("t_ref_m").get<double>();

  const auto& ps = j.at("psd");
  c.psd.segment_length = ps.at("segment_length").get<int>();
  c.psd.f_range = interval_from(ps.at("f_range_hz"), "f_range_hz");
  c.psd.station = ps.at("station").get<int>();

  const auto& op = j.at("optimizer");
  c.optimizer.fd_step = op.at("fd_step").get<double>();
  c.optimizer.tol = op.at("tol").get<double>();
  c.optimizer.max_iter = op.at("max_iter").get<int>();
  const auto& bo = op.at("bounds");
  c.bounds.d_min = bo.at("d_min_m").get<double>();
  c.bounds.d_max = bo.at("d_max_m").get<double>();
  c.bounds.t_min = bo.at("t_min_m").get<double>();
  c.bounds.t_max = bo.at("t_max_m").get<double>();
  c.cycle_constraints.clear();
  for (const auto& cc : op.at("cycles")) c.cycle_constraints.push_back(constraints_from(cc));

  const auto& wf = j.at("workflow");
  c.lifetime = wf.at("lifetime_s").get<double>();
  c.event_duration = wf.at("event_duration_s").get<double>();
  c.max_cycles = wf.at("max_cycles").get<int>();
  c.reuse_reference_mode = wf.at("reuse_reference_mode").get<bool>();
  c.damage_limit = wf.at("damage_limit").get<double>();
  c.max_relative_error = wf.at("max_relative_error").get<double>();
  c.output_dir = wf.at("output_dir").get<std::string>();
  c.jobs = wf.at("jobs").get<int>();
  return c;
}

// Rejects keys that the defaults do not know about.
void check_keys(const json& given, const json& known, const std::string& path) {
  if (!given.is_object() || !known.is_object()) return;
  for (const auto& [key, value] : given.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    require(known.contains(key), ErrorKind::Config, "unknown configuration key '" + where + "'");
    check_keys(value, known.at(key), where);
  }
}

// Array entries of objects are completed from a template entry.
json complete_entries(const json& given, const json& entry_template, const std::string& path) {
  json out = json::array();
  for (const auto& e : given) {
    check_keys(e, entry_template, path + "[]");
    json full = entry_template;
    full.merge_patch(e);
    out.push_back(full);
  }
  return out;
}

}  // namespace

void ProjectConfig::validate() const {
  plan.validate();
  wind.validate();
  simulation.validate();
  rotor.validate();
  platform.validate();
  material.validate();
  sn_curve.validate();
  require(std::abs(rna.mass - rotor.rna_mass) <= 1e-9 * rotor.rna_mass, ErrorKind::Config,
          "tower.rna_mass_kg and rotor.rna_mass_kg disagree");
  require(ballast_safety_factor > 0.0, ErrorKind::Config, "ballast safety factor must be positive");
  require(lifetime > 0.0, ErrorKind::Config, "lifetime LT must be positive");
  require(event_duration > 0.0, ErrorKind::Config, "event duration must be positive");
  require(max_cycles >= 1, ErrorKind::Config, "max_cycles must be >= 1");
  require(damage_limit > 0.0 && max_relative_error > 0.0, ErrorKind::Config,
          "validation thresholds must be positive");
  require(jobs >= 1, ErrorKind::Config, "jobs must be >= 1");
  require(optimizer.fd_step > 0.0 && optimizer.tol > 0.0 && optimizer.max_iter >= 1, ErrorKind::Config,
          "optimizer settings need fd_step > 0, tol > 0, max_iter >= 1");
  require(bounds.d_min > 0.0 && bounds.d_max > bounds.d_min && bounds.t_min > 0.0 &&
              bounds.t_max > bounds.t_min,
          ErrorKind::Config, "design bounds must be positive, nonempty intervals");
  require(!cycle_constraints.empty(), ErrorKind::Config, "at least one cycle constraint set is required");
  for (const auto& c : cycle_constraints) c.validate();
  require(psd.segment_length >= 8, ErrorKind::Config, "PSD segment length must be >= 8");
  require(psd.station >= 0 && psd.station < simulation.n_stations, ErrorKind::Config,
          "PSD station outside the simulated stations");
  require(psd.f_range.hi > psd.f_range.lo, ErrorKind::Config, "PSD frequency range must be nonempty");
  if (!reference_geometry_path.empty())
    require(std::filesystem::exists(reference_geometry_path), ErrorKind::Config,
            "reference geometry '" + reference_geometry_path + "' does not exist");
}

const design::ConstraintConfig& ProjectConfig::constraints_for(int cycle) const {
  require(cycle >= 1, ErrorKind::Index, "cycles are numbered from 1");
  require(!cycle_constraints.empty(), ErrorKind::Config, "no cycle constraint sets configured");
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(cycle), cycle_constraints.size()) - 1;
  return cycle_constraints[i];
}

tower::TowerGeometry ProjectConfig::reference_geometry() const {
  return reference_geometry_path.empty() ? tower::reference_geometry()
                                         : tower::load_geometry(reference_geometry_path);
}

ProjectConfig case_study_config() { return ProjectConfig{}; }

ProjectConfig desk_scale_config() {
  ProjectConfig c;
  c.plan.n_u = 5;
  c.plan.n_seeds = 2;
  c.plan.n_hs = 3;
  c.plan.n_tp = 3;
  return c;
}

ProjectConfig parse_config(std::istream& is, const std::string& base_dir) {
  json given;
  try {
    given = json::parse(is);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("configuration is not valid JSON: ") + e.what());
  }
  require(given.is_object(), ErrorKind::Config, "configuration root must be an object");
  const json defaults = to_json(ProjectConfig{});
  check_keys(given, defaults, "");

  json full = defaults;
  json patch = given;
  if (patch.contains("optimizer") && patch["optimizer"].contains("cycles"))
    patch["optimizer"]["cycles"] =
        complete_entries(patch["optimizer"]["cycles"], defaults["optimizer"]["cycles"][0], "optimizer.cycles");
  if (patch.contains("platform") && patch["platform"].contains("components"))
    patch["platform"]["components"] = complete_entries(
        patch["platform"]["components"], json{{"name", ""}, {"mass_kg", 0.0}, {"x_m", 0.0}},
        "platform.components");
  full.merge_patch(patch);

  ProjectConfig c;
  try {
    c = from_json(full);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("configuration value has the wrong type: ") + e.what());
  }
  if (!c.reference_geometry_path.empty() && std::filesystem::path(c.reference_geometry_path).is_relative())
    c.reference_geometry_path = (std::filesystem::path(base_dir) / c.reference_geometry_path).string();
  c.validate();
  return c;
}

ProjectConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open configuration '" + path + "'");
  return parse_config(in, std::filesystem::path(path).parent_path().string());
}

void write_config(std::ostream& os, const ProjectConfig& config) { os << to_json(config).dump(2) << '\n'; }

std::string config_hash(const ProjectConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<std::size_t>(i)] = hex[h & 0xf];
  return s;
}

}  // namespace fowt::workflow
