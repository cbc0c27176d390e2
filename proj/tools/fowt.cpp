#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fowt/config.hpp"
#include "fowt/csv.hpp"
#include "fowt/error.hpp"
#include "fowt/fatigue_estimator.hpp"
#include "fowt/workflow.hpp"

namespace fs = std::filesystem;
using namespace fowt;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::string out_dir;
  int jobs = 0;
  int cycle = 1;
};

workflow::ProjectConfig load(const GlobalOptions& g) {
  auto c = g.config_path.empty() ? workflow::desk_scale_config() : workflow::load_config(g.config_path);
  if (!g.out_dir.empty()) c.output_dir = g.out_dir;
  if (g.jobs > 0) c.jobs = g.jobs;
  c.validate();
  return c;
}

fs::path out_file(const workflow::ProjectConfig& c, const std::string& name) {
  fs::create_directories(c.output_dir);
  return fs::path(c.output_dir) / name;
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  writer(out);
  std::cout << "wrote " << path.string() << '\n';
}

tower::TowerGeometry geometry_or_reference(const workflow::ProjectConfig& c, const std::string& path) {
  return path.empty() ? c.reference_geometry() : tower::load_geometry(path);
}

ResponseRecord read_record(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open response record " + path);
  return response::read_response_csv(in);
}

fatigue::SectionDamageProfile read_damage(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open damage profile " + path);
  return fatigue::read_damage_csv(in);
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

// Reference states, operating points and a simulated design: the shared front of several commands.
struct Simulated {
  std::vector<env::EnvironmentalState> states;
  std::vector<workflow::OperatingPoint> points;
  workflow::DesignAnalysis analysis;
};

Simulated simulate(const workflow::ProjectConfig& c, const tower::TowerGeometry& g,
                   const workflow::AnalysisOptions& opt) {
  Simulated s;
  s.states = env::sample_states(c.plan, c.wind);
  s.points = workflow::operating_points(c, env::wind_bin_centers(s.states), c.reference_geometry());
  s.analysis = workflow::analyze_design(c, s.states, s.points, g, opt);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fatigue-aware floating wind turbine tower design workflow"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config_path, "Project configuration JSON (default: desk-scale plan)");
  app.add_option("--out", g.out_dir, "Output directory (overrides workflow.output_dir)");
  app.add_option("--jobs", g.jobs, "Worker threads (overrides workflow.jobs)")->check(CLI::PositiveNumber);
  app.add_option("--cycle", g.cycle, "Optimization cycle index, selects gamma_d")->check(CLI::PositiveNumber);

  auto* sample = app.add_subcommand("sample", "Write the environmental state table");

  auto* sim = app.add_subcommand("simulate", "Simulate every state and write event and lifetime damages");
  std::string sim_geometry;
  bool sim_records = false;
  sim->add_option("--geometry", sim_geometry, "Tower geometry CSV (default: reference)");
  sim->add_flag("--records", sim_records, "Also write every response record");

  auto* psd = app.add_subcommand("psd", "PSD of one response record, or the heatmap of the reference design");
  std::string psd_input;
  int psd_station = -1;
  psd->add_option("--input", psd_input, "Response record CSV");
  psd->add_option("--station", psd_station, "Moment station index (default: config psd.station)");

  auto* fat = app.add_subcommand("fatigue", "Damage of one response record, or the lifetime profile of a design");
  std::string fat_input, fat_geometry;
  fat->add_option("--input", fat_input, "Response record CSV");
  fat->add_option("--geometry", fat_geometry, "Tower geometry CSV (default: reference)");

  auto* plat = app.add_subcommand("calibrate-platform", "Mean rotor loads and pitch ballast per wind bin");
  double delta_mass = 0.0;
  auto* delta_opt = plat->add_option("--delta-mass", delta_mass, "Tower mass change to compensate in heave [kg]");

  auto* optimize = app.add_subcommand("optimize", "Calibrate the estimator and optimize from the reference tower");
  std::string opt_damage, opt_geometry;
  optimize->add_option("--damage", opt_damage, "Hi-fi damage CSV of the calibration design (default: simulate it)");
  optimize->add_option("--calibration-geometry", opt_geometry, "Geometry the damage belongs to (default: reference)");

  auto* val = app.add_subcommand("validate", "Compare recomputed and estimated damage profiles");
  std::string hi_path, est_path;
  val->add_option("--hi-fi", hi_path, "Recomputed damage CSV")->required();
  val->add_option("--estimated", est_path, "Estimated damage CSV")->required();

  auto* pipeline = app.add_subcommand("pipeline", "Run the full design loop and export the artifact bundle");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto c = load(g);
    if (*sample) {
      const auto states = env::sample_states(c.plan, c.wind);
      double w = 0.0;
      for (const auto& s : states) w += s.weight;
      write_file(out_file(c, "states.csv"), [&](std::ostream& os) { env::write_states_csv(os, states); });
      std::cout << states.size() << " states, weight sum " << csv::format(w) << '\n';
    } else if (*sim) {
      workflow::AnalysisOptions o;
      if (sim_records) o.record_dir = out_file(c, "records").string();
      const auto geom = geometry_or_reference(c, sim_geometry);
      o.record_label = sim_geometry.empty() ? "reference" : fs::path(sim_geometry).stem().string();
      const auto s = simulate(c, geom, o);
      write_file(out_file(c, "event_damage.csv"), [&](std::ostream& os) {
        os << "id";
        for (std::size_t i = 1; i <= geom.sections(); ++i) os << ",d_" << i;
        os << '\n';
        for (const auto& [id, d] : s.analysis.events) {
          os << id;
          for (double v : d) os << ',' << csv::format(v);
          os << '\n';
        }
      });
      write_file(out_file(c, "damage.csv"), [&](std::ostream& os) { fatigue::write_damage_csv(os, s.analysis.damage); });
      std::cout << "max lifetime damage " << csv::format(max_of(s.analysis.damage.damage)) << '\n';
    } else if (*psd) {
      const int station = psd_station >= 0 ? psd_station : c.psd.station;
      if (!psd_input.empty()) {
        const auto rec = read_record(psd_input);
        require(station < static_cast<int>(rec.fore_aft_moment.size()), ErrorKind::Index,
                "station " + std::to_string(station) + " not present in the record");
        const double dt = rec.time.size() > 1 ? rec.time[1] - rec.time[0] : 0.0;
        require(dt > 0.0, ErrorKind::Input, "record time step must be positive");
        const auto& ch = rec.fore_aft_moment[static_cast<std::size_t>(station)];
        const auto est = spectral::welch_psd(ch, 1.0 / dt, std::min<int>(c.psd.segment_length, static_cast<int>(ch.size())));
        write_file(out_file(c, "psd.csv"), [&](std::ostream& os) { spectral::write_psd_csv(os, est); });
        std::cout << "peak " << csv::format(spectral::peak_frequency(est)) << " Hz\n";
      } else {
        auto cc = c;
        cc.psd.station = station;
        workflow::AnalysisOptions o;
        o.psd = true;
        const auto s = simulate(cc, cc.reference_geometry(), o);
        const auto hm = workflow::heatmap(cc, s.analysis, s.points);
        write_file(out_file(c, "psd_heatmap.csv"), [&](std::ostream& os) { spectral::write_heatmap_csv(os, hm); });
        write_file(out_file(c, "psd_heatmap.json"), [&](std::ostream& os) { spectral::write_heatmap_json(os, hm); });
      }
    } else if (*fat) {
      const auto geom = geometry_or_reference(c, fat_geometry);
      if (!fat_input.empty()) {
        const auto rec = read_record(fat_input);
        const auto d = fatigue::event_damage(rec, geom, c.sn_curve, c.simulation.trim);
        fatigue::SectionDamageProfile p{geom.midpoint_z(), d};
        write_file(out_file(c, "event_damage.csv"), [&](std::ostream& os) { fatigue::write_damage_csv(os, p); });
        const auto first = std::min(rec.time.size(), static_cast<std::size_t>(std::llround(c.simulation.trim / c.simulation.dt)));
        const std::vector<double> base(rec.fore_aft_moment[0].begin() + static_cast<std::ptrdiff_t>(first),
                                       rec.fore_aft_moment[0].end());
        write_file(out_file(c, "cycles_base.csv"),
                   [&](std::ostream& os) { fatigue::write_cycles_csv(os, fatigue::rainflow(base)); });
      } else {
        const auto s = simulate(c, geom, {});
        write_file(out_file(c, "damage.csv"), [&](std::ostream& os) { fatigue::write_damage_csv(os, s.analysis.damage); });
        std::cout << "max lifetime damage " << csv::format(max_of(s.analysis.damage.damage)) << '\n';
      }
    } else if (*plat) {
      const auto states = env::sample_states(c.plan, c.wind);
      const auto points = workflow::operating_points(c, env::wind_bin_centers(states), c.reference_geometry());
      write_file(out_file(c, "operating_points.csv"),
                 [&](std::ostream& os) { workflow::write_operating_points_csv(os, points); });
      if (delta_opt->count() > 0) {
        const double dm = platform::heave_adjust(delta_mass, c.platform.initial_platform_mass);
        std::cout << "heave adjustment " << csv::format(dm) << " kg, platform mass "
                  << csv::format(c.platform.initial_platform_mass + dm) << " kg\n";
      }
    } else if (*optimize) {
      const auto reference = c.reference_geometry();
      const auto calib_geom = geometry_or_reference(c, opt_geometry);
      const auto damage = opt_damage.empty() ? simulate(c, calib_geom, {}).analysis.damage : read_damage(opt_damage);
      const auto cal = estimator::calibrate(calib_geom, damage, c.estimator.m, c.estimator.k, c.estimator.t_ref);
      const auto res = workflow::optimize_cycle(c, reference, cal, g.cycle);
      const auto tag = "cycle" + std::to_string(g.cycle);
      write_file(out_file(c, "calibration_" + tag + ".json"), [&](std::ostream& os) { estimator::write_calibration_json(os, cal); });
      write_file(out_file(c, "trace_" + tag + ".csv"), [&](std::ostream& os) { design::write_trace_csv(os, res.trace); });
      write_file(out_file(c, "trace_" + tag + ".json"), [&](std::ostream& os) { design::write_trace_json(os, res.trace); });
      write_file(out_file(c, "geometry_" + tag + ".csv"), [&](std::ostream& os) { tower::write_geometry_csv(os, res.geometry); });
      write_file(out_file(c, "damage_" + tag + "_estimated.csv"),
                 [&](std::ostream& os) { fatigue::write_damage_csv(os, estimator::predict(cal, res.geometry)); });
      std::cout << opt::to_string(res.status) << " after " << res.iterations << " iterations, mass "
                << csv::format(res.final_eval.objective) << " kg, estimated max damage "
                << csv::format(max_of(res.final_eval.fatigue_damage)) << '\n';
      if (res.status == opt::SqpStatus::infeasible) return 2;
    } else if (*val) {
      const auto r = workflow::validate(read_damage(hi_path), read_damage(est_path), c.damage_limit,
                                        c.max_relative_error, g.cycle);
      write_file(out_file(c, "validation_cycle" + std::to_string(g.cycle) + ".json"),
                 [&](std::ostream& os) { workflow::write_validation_json(os, r); });
      std::cout << "criterion 1 (max damage " << csv::format(r.max_damage) << " <= " << csv::format(r.limit)
                << "): " << (r.criterion_1 ? "pass" : "fail") << '\n'
                << "criterion 2 (max |error| " << csv::format(r.max_abs_error) << " < "
                << csv::format(r.max_error_allowed) << "): " << (r.criterion_2 ? "pass" : "fail") << '\n'
                << "mean error " << csv::format(r.mean_error) << ", min " << csv::format(r.min_error) << ", max "
                << csv::format(r.max_error) << '\n';
      if (!r.undefined_sections.empty())
        std::cout << r.undefined_sections.size() << " sections have an undefined relative error\n";
      return r.passed() ? 0 : 3;
    } else if (*pipeline) {
      const auto r = workflow::run_pipeline(c, c.output_dir, [](const std::string& s) { std::cerr << "stage " << s << '\n'; });
      for (const auto& cy : r.cycles)
        std::cout << "cycle " << cy.cycle << ": gamma_d " << csv::format(cy.gamma_d) << ", mass "
                  << csv::format(cy.mass) << " kg, max damage " << csv::format(cy.report.max_damage)
                  << ", mean error " << csv::format(cy.report.mean_error) << ", criteria "
                  << (cy.report.criterion_1 ? "pass" : "fail") << '/' << (cy.report.criterion_2 ? "pass" : "fail")
                  << '\n';
      std::cout << (r.converged ? "converged" : "not converged within the cycle cap") << "; artifacts in "
                << c.output_dir << '\n';
      return r.converged ? 0 : 2;
    }
  } catch (const fowt::Error& e) {
    std::cerr << "fowt: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fowt: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
