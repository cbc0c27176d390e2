#include "fowt/workflow.hpp"

#include <fftw3.h>

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "fowt/csv.hpp"
#include "fowt/error.hpp"
#include "fowt/parallel.hpp"
#include "fowt/response_provider.hpp"
#include "json.hpp"

#ifndef FOWT_VERSION
#define FOWT_VERSION "unversioned"
#endif

namespace fowt::workflow {

using nlohmann::json;
namespace fs = std::filesystem;

// Validation -----------------------------------------------------------------

ValidationReport validate(const fatigue::SectionDamageProfile& hi_fi,
                          const fatigue::SectionDamageProfile& estimated, double limit,
                          double max_error_allowed, int cycle) {
  require(hi_fi.damage.size() == estimated.damage.size(), ErrorKind::Consistency,
          "hi-fi profile has " + std::to_string(hi_fi.damage.size()) + " sections, estimate has " +
              std::to_string(estimated.damage.size()));
  require(!hi_fi.damage.empty(), ErrorKind::Input, "damage profiles are empty");
  require(limit > 0.0 && max_error_allowed > 0.0, ErrorKind::Config, "validation thresholds must be positive");

  ValidationReport r;
  r.cycle = cycle;
  r.limit = limit;
  r.max_error_allowed = max_error_allowed;
  r.section_midpoints = hi_fi.section_midpoints;
  r.hi_fi = hi_fi.damage;
  r.estimated = estimated.damage;
  r.relative_error.assign(r.hi_fi.size(), 0.0);

  std::size_t defined = 0;
  double sum = 0.0, sum_abs = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < r.hi_fi.size(); ++i) {
    const double h = r.hi_fi[i], e = r.estimated[i];
    r.max_damage = std::max(r.max_damage, h);
    if (h == 0.0) {
      if (e != 0.0) r.undefined_sections.push_back(i);
      if (e != 0.0) continue;
    }
    const double err = h == 0.0 ? 0.0 : (e - h) / h;
    r.relative_error[i] = err;
    sum += err;
    sum_abs += std::abs(err);
    r.min_error = first ? err : std::min(r.min_error, err);
    r.max_error = first ? err : std::max(r.max_error, err);
    r.max_abs_error = std::max(r.max_abs_error, std::abs(err));
    first = false;
    ++defined;
  }
  if (defined > 0) {
    r.mean_error = sum / static_cast<double>(defined);
    r.mean_abs_error = sum_abs / static_cast<double>(defined);
  }
  r.criterion_1 = r.max_damage <= limit;
  r.criterion_2 = r.undefined_sections.empty() && r.max_abs_error < max_error_allowed;
  return r;
}

void write_validation_json(std::ostream& os, const ValidationReport& r) {
  json j{{"cycle", r.cycle},
         {"limit", r.limit},
         {"max_error_allowed", r.max_error_allowed},
         {"max_damage", r.max_damage},
         {"mean_error", r.mean_error},
         {"min_error", r.min_error},
         {"max_error", r.max_error},
         {"max_abs_error", r.max_abs_error},
         {"mean_abs_error", r.mean_abs_error},
         {"criterion_1", r.criterion_1},
         {"criterion_2", r.criterion_2},
         {"undefined_sections", r.undefined_sections}};
  json sections = json::array();
  for (std::size_t i = 0; i < r.hi_fi.size(); ++i)
    sections.push_back({{"index", i + 1},
                        {"z_mid_m", i < r.section_midpoints.size() ? r.section_midpoints[i] : 0.0},
                        {"hi_fi", r.hi_fi[i]},
                        {"estimated", r.estimated[i]},
                        {"relative_error", r.relative_error[i]}});
  j["sections"] = sections;
  os << j.dump(2) << '\n';
}

// Stages ---------------------------------------------------------------------

std::vector<OperatingPoint> operating_points(const ProjectConfig& config,
                                             const std::vector<double>& wind_centers,
                                             const tower::TowerGeometry& tower) {
  response::SimulationConfig sim = config.simulation;
  const auto short_run = response::SimulationConfig::calibration();
  sim.duration = short_run.duration;
  sim.trim = short_run.trim;

  double weight_moment = 0.0;
  for (const auto& c : config.platform.component_masses_and_offsets) weight_moment += c.mass * c.x;
  weight_moment *= kGravity;

  std::vector<OperatingPoint> out(wind_centers.size());
  parallel_for(wind_centers.size(), config.jobs, [&](std::size_t i) {
    env::EnvironmentalState s;
    s.u = wind_centers[i];
    const auto rec = response::simulate_response(s, tower, config.rotor, sim, true);
    OperatingPoint& p = out[i];
    p.u = s.u;
    p.mean_thrust = rec.mean_thrust;
    p.mean_rotor_moment = rec.mean_rotor_moment;
    p.mean_rpm = rec.mean_rotor_speed;
    p.harmonics = spectral::rotor_harmonics(p.mean_rpm);
    p.structural_moment = platform::structural_moment(config.platform, p.mean_thrust, p.mean_rotor_moment);
    p.ballast = platform::pitch_ballast(p.structural_moment, config.platform, config.ballast_safety_factor);
    p.pitch_moment_offset = p.ballast.ballast_moment + weight_moment;
  });
  return out;
}

void write_operating_points_csv(std::ostream& os, const std::vector<OperatingPoint>& points) {
  os << "u_ms,mean_thrust_n,mean_rotor_moment_nm,mean_rpm,f_1p_hz,f_3p_hz,f_6p_hz,f_9p_hz,"
        "m_struct_nm,target_columns,n_columns,water_mass_per_column_kg,water_height_m\n";
  for (const auto& p : points)
    os << csv::format(p.u) << ',' << csv::format(p.mean_thrust) << ',' << csv::format(p.mean_rotor_moment)
       << ',' << csv::format(p.mean_rpm) << ',' << csv::format(p.harmonics.f_1p) << ','
       << csv::format(p.harmonics.f_3p) << ',' << csv::format(p.harmonics.f_6p) << ','
       << csv::format(p.harmonics.f_9p) << ',' << csv::format(p.structural_moment) << ','
       << platform::to_string(p.ballast.target_columns) << ',' << p.ballast.n_columns << ','
       << csv::format(p.ballast.water_mass_per_column) << ',' << csv::format(p.ballast.water_height) << '\n';
}

std::vector<std::string> state_file_names(const std::vector<env::EnvironmentalState>& states,
                                          const std::string& design_label) {
  std::vector<std::string> names;
  names.reserve(states.size());
  char buf[32];
  for (const auto& s : states) {
    std::snprintf(buf, sizeof buf, "state_%05d.csv", s.id);
    names.push_back(design_label + "/" + buf);
  }
  return names;
}

namespace {

const OperatingPoint& point_for(const std::vector<OperatingPoint>& points, double u) {
  for (const auto& p : points)
    if (p.u == u) return p;
  throw Error(ErrorKind::Consistency, "no operating point for wind bin " + csv::format(u) + " m/s");
}

}  // namespace

DesignAnalysis analyze_design(const ProjectConfig& config,
                              const std::vector<env::EnvironmentalState>& states,
                              const std::vector<OperatingPoint>& points,
                              const tower::TowerGeometry& geometry, const AnalysisOptions& options) {
  geometry.validate();
  DesignAnalysis a;
  a.geometry = geometry;
  a.mode_frequency = options.mode_frequency > 0.0
                         ? options.mode_frequency
                         : response::mode_frequency(geometry, config.rotor, config.simulation);

  std::vector<env::EnvironmentalState> sorted = states;
  std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  const auto names = state_file_names(sorted, options.record_label);
  if (!options.record_dir.empty())
    fs::create_directories(fs::path(options.record_dir) / options.record_label);

  a.events.resize(sorted.size());
  if (options.psd) a.psds.resize(sorted.size());
  parallel_for(sorted.size(), config.jobs, [&](std::size_t i) {
    const auto& s = sorted[i];
    response::SimulationConfig sim = config.simulation;
    sim.surrogate.mode_frequency = a.mode_frequency;
    sim.surrogate.pitch_moment_offset = point_for(points, s.u).pitch_moment_offset;
    sim.surrogate.excess_mass = options.excess_mass;
    const auto rec = response::simulate_response(s, geometry, config.rotor, sim);
    a.events[i] = {s.id, fatigue::event_damage(rec, geometry, config.sn_curve, sim.trim)};
    if (options.psd) {
      const auto& ch = rec.fore_aft_moment[static_cast<std::size_t>(config.psd.station)];
      const auto first = static_cast<std::ptrdiff_t>(std::min(ch.size(), static_cast<std::size_t>(std::llround(sim.trim / sim.dt))));
      const std::vector<double> tail(ch.begin() + first, ch.end());
      const int seg = std::min<int>(config.psd.segment_length, static_cast<int>(tail.size()));
      a.psds[i] = {s.u, spectral::welch_psd(tail, 1.0 / sim.dt, seg)};
    }
    if (!options.record_dir.empty()) {
      const auto path = fs::path(options.record_dir) / names[i];
      std::ofstream out(path);
      require(static_cast<bool>(out), ErrorKind::Io, "cannot write response record " + path.string());
      response::write_response_csv(out, rec);
    }
  });
  a.damage = fatigue::lifetime_damage(a.events, sorted, config.lifetime, config.event_duration,
                                      geometry.midpoint_z());
  return a;
}

spectral::PsdHeatmap heatmap(const ProjectConfig& config, const DesignAnalysis& analysis,
                             const std::vector<OperatingPoint>& points) {
  require(!analysis.psds.empty(), ErrorKind::Input, "design analysis carries no PSDs");
  std::vector<std::pair<double, spectral::HarmonicSet>> harmonics;
  for (const auto& p : points) harmonics.emplace_back(p.u, p.harmonics);
  return spectral::aggregate_heatmap(analysis.psds, harmonics, config.psd.f_range,
                                     {config.plan.v_in, config.plan.v_out});
}

design::OptimizationResult optimize_cycle(const ProjectConfig& config, const tower::TowerGeometry& reference,
                                          const estimator::CalibrationSet& calibration, int cycle) {
  design::DesignContext ctx;
  ctx.material = config.material;
  ctx.rna = config.rna;
  ctx.loads = config.loads;
  ctx.structural = config.structural;
  ctx.calibration = calibration;
  ctx.constraints = config.constraints_for(cycle);
  ctx.heights = reference.h;
  design::OptimizerSettings s = config.optimizer;
  s.jobs = config.jobs;
  return design::optimize(design::DesignVector::from_geometry(reference, config.bounds), ctx, s);
}

// Export ---------------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> versions() {
  return {{"fowt", FOWT_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"fftw", fftw_version},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

void write_manifest(std::ostream& os, const std::string& hash, const std::vector<StageRecord>& stages,
                    const ProjectConfig& config, const std::string& timestamp) {
  json st = json::array();
  for (const auto& s : stages) {
    json e{{"name", s.name}, {"status", s.status}, {"outputs", s.outputs}};
    if (!s.message.empty()) e["message"] = s.message;
    st.push_back(e);
  }
  json ver;
  for (const auto& [k, v] : versions()) ver[k] = v;
  json notes = json::array();
  if (config.reuse_reference_mode)
    notes.push_back("response provider reuses the reference tower mode frequency in every cycle");
  json j{{"config_hash", hash}, {"stages", st}, {"versions", ver}, {"notes", notes}, {"timestamp", timestamp}};
  os << j.dump(2) << '\n';
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Exporter {
 public:
  explicit Exporter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  template <class Writer>
  void write(const std::string& stage, const std::string& name, Writer&& writer) {
    const auto path = dir_ / name;
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorKind::Io, "cannot open artifact " + path.string());
    writer(out);
    out.flush();
    require(static_cast<bool>(out), ErrorKind::Io, "failed writing artifact " + path.string());
    outputs_[stage].push_back(name);
  }

  std::vector<std::string> outputs(const std::string& stage) const {
    const auto it = outputs_.find(stage);
    return it == outputs_.end() ? std::vector<std::string>{} : it->second;
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::map<std::string, std::vector<std::string>> outputs_;
};

std::string cycle_tag(int k) { return "cycle" + std::to_string(k); }

}  // namespace

std::vector<StageRecord> export_results(const PipelineResult& r, const ProjectConfig& config,
                                        const std::string& out_dir) {
  Exporter ex(out_dir);
  ex.write("config", "config.json", [&](std::ostream& os) { write_config(os, config); });
  if (!r.states.empty())
    ex.write("sample", "states.csv", [&](std::ostream& os) { env::write_states_csv(os, r.states); });
  if (!r.points.empty())
    ex.write("operating_points", "operating_points.csv",
             [&](std::ostream& os) { write_operating_points_csv(os, r.points); });
  if (!r.reference.damage.damage.empty()) {
    ex.write("simulate_reference", "geometry_reference.csv",
             [&](std::ostream& os) { tower::write_geometry_csv(os, r.reference.geometry); });
    ex.write("simulate_reference", "damage_reference.csv",
             [&](std::ostream& os) { fatigue::write_damage_csv(os, r.reference.damage); });
  }
  if (r.reference_heatmap) {
    ex.write("psd_reference", "psd_heatmap.csv",
             [&](std::ostream& os) { spectral::write_heatmap_csv(os, *r.reference_heatmap); });
    ex.write("psd_reference", "psd_heatmap.json",
             [&](std::ostream& os) { spectral::write_heatmap_json(os, *r.reference_heatmap); });
  }
  for (const auto& c : r.cycles) {
    const auto tag = cycle_tag(c.cycle);
    if (!c.calibration.c.empty())
      ex.write(tag + ".calibrate", "calibration_" + tag + ".json",
               [&](std::ostream& os) { estimator::write_calibration_json(os, c.calibration); });
    if (!c.optimization.trace.entries.empty()) {
      ex.write(tag + ".optimize", "trace_" + tag + ".csv",
               [&](std::ostream& os) { design::write_trace_csv(os, c.optimization.trace); });
      ex.write(tag + ".optimize", "trace_" + tag + ".json",
               [&](std::ostream& os) { design::write_trace_json(os, c.optimization.trace); });
      ex.write(tag + ".optimize", "geometry_" + tag + ".csv",
               [&](std::ostream& os) { tower::write_geometry_csv(os, c.optimization.geometry); });
    }
    if (!c.validated.damage.damage.empty()) {
      ex.write(tag + ".resimulate", "damage_" + tag + "_validated.csv",
               [&](std::ostream& os) { fatigue::write_damage_csv(os, c.validated.damage); });
      ex.write(tag + ".resimulate", "damage_" + tag + "_estimated.csv",
               [&](std::ostream& os) { fatigue::write_damage_csv(os, c.estimated); });
    }
    if (!c.report.hi_fi.empty())
      ex.write(tag + ".validate", "validation_" + tag + ".json",
               [&](std::ostream& os) { write_validation_json(os, c.report); });
  }

  std::vector<StageRecord> stages = r.stages;
  if (stages.empty())
    for (const char* name : {"sample", "operating_points", "simulate_reference", "psd_reference", "cycles"})
      stages.push_back({name, "pending", {}, ""});
  for (auto& s : stages) s.outputs = ex.outputs(s.name);
  stages.insert(stages.begin(), StageRecord{"config", "ok", ex.outputs("config"), ""});

  const auto path = ex.dir() / "manifest.json";
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open artifact " + path.string());
  write_manifest(out, config_hash(config), stages, config, utc_timestamp());
  return stages;
}

// Pipeline -------------------------------------------------------------------

PipelineResult run_pipeline(const ProjectConfig& config, const std::string& out_dir, const ProgressFn& progress) {
  config.validate();
  PipelineResult r;
  auto note = [&](const std::string& msg) {
    if (progress) progress(msg);
  };
  auto persist = [&] {
    if (!out_dir.empty()) export_results(r, config, out_dir);
  };
  auto stage = [&](const std::string& name, const std::function<void()>& body) {
    note(name);
    r.stages.push_back({name, "pending", {}, ""});
    try {
      body();
    } catch (const std::exception& e) {
      r.stages.back().status = "failed";
      r.stages.back().message = e.what();
      try {
        persist();
      } catch (const std::exception&) {
        // The original failure is the one worth reporting.
      }
      const auto* fe = dynamic_cast<const Error*>(&e);
      const ErrorKind kind = fe ? fe->kind()
                                : (dynamic_cast<const fs::filesystem_error*>(&e) ? ErrorKind::Io
                                                                                 : ErrorKind::Numerical);
      throw Error(kind, "stage '" + name + "': " + e.what());
    }
    r.stages.back().status = "ok";
    persist();
  };

  const auto reference = config.reference_geometry();
  stage("sample", [&] { r.states = env::sample_states(config.plan, config.wind); });
  stage("operating_points",
        [&] { r.points = operating_points(config, env::wind_bin_centers(r.states), reference); });
  stage("simulate_reference", [&] {
    AnalysisOptions opt;
    opt.psd = true;
    r.reference = analyze_design(config, r.states, r.points, reference, opt);
    r.reference_mass = tower::tower_mass(reference, config.material, config.structural.cost_rate).mass;
  });
  stage("psd_reference", [&] { r.reference_heatmap = heatmap(config, r.reference, r.points); });

  const tower::TowerGeometry* calib_geometry = &reference;
  const fatigue::SectionDamageProfile* calib_damage = &r.reference.damage;
  std::string calib_source = "reference";
  r.cycles.reserve(static_cast<std::size_t>(config.max_cycles));
  for (int k = 1; k <= config.max_cycles; ++k) {
    const auto tag = cycle_tag(k);
    r.cycles.push_back(CycleResult{});
    CycleResult& c = r.cycles.back();
    c.cycle = k;
    c.gamma_d = config.constraints_for(k).gamma_d;
    c.calibration_source = calib_source;
    stage(tag + ".calibrate", [&] {
      c.calibration = estimator::calibrate(*calib_geometry, *calib_damage, config.estimator.m,
                                           config.estimator.k, config.estimator.t_ref);
    });
    stage(tag + ".optimize", [&] {
      c.optimization = optimize_cycle(config, reference, c.calibration, k);
      c.mass = c.optimization.final_eval.objective;
    });
    stage(tag + ".resimulate", [&] {
      const double delta = platform::heave_adjust(c.mass - r.reference_mass, config.platform.initial_platform_mass);
      c.platform_mass = config.platform.initial_platform_mass + delta;
      AnalysisOptions opt;
      opt.mode_frequency = config.reuse_reference_mode ? r.reference.mode_frequency : 0.0;
      c.validated = analyze_design(config, r.states, r.points, c.optimization.geometry, opt);
      c.estimated = estimator::predict(c.calibration, c.optimization.geometry);
    });
    stage(tag + ".validate", [&] {
      c.report = validate(c.validated.damage, c.estimated, config.damage_limit, config.max_relative_error, k);
    });
    if (c.report.passed()) {
      r.converged = true;
      break;
    }
    calib_geometry = &c.validated.geometry;
    calib_damage = &c.validated.damage;
    calib_source = tag;
  }
  persist();
  return r;
}

}  // namespace fowt::workflow
