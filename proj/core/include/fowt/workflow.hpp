#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fowt/config.hpp"
#include "fowt/design_optimizer.hpp"
#include "fowt/env_sampler.hpp"
#include "fowt/fatigue_analysis.hpp"
#include "fowt/fatigue_estimator.hpp"
#include "fowt/platform_calibration.hpp"
#include "fowt/spectral_analysis.hpp"
#include "fowt/tower_model.hpp"

namespace fowt::workflow {

// Validation -----------------------------------------------------------------

struct ValidationReport {
  int cycle = 0;
  std::vector<double> section_midpoints;  ///< [m]
  std::vector<double> hi_fi;              ///< recomputed damage
  std::vector<double> estimated;          ///< estimator prediction
  std::vector<double> relative_error;     ///< (estimated - hi_fi) / hi_fi, 0 where undefined
  std::vector<std::size_t> undefined_sections;  ///< hi_fi = 0 with a nonzero estimate
  double limit = 1.0;
  double max_error_allowed = 0.10;
  double max_damage = 0.0;
  double mean_error = 0.0;
  double min_error = 0.0;
  double max_error = 0.0;
  double max_abs_error = 0.0;
  double mean_abs_error = 0.0;
  bool criterion_1 = false;  ///< max hi-fi damage <= limit
  bool criterion_2 = false;  ///< max |relative error| < max_error_allowed, all sections defined

  bool passed() const { return criterion_1 && criterion_2; }
};

ValidationReport validate(const fatigue::SectionDamageProfile& hi_fi,
                          const fatigue::SectionDamageProfile& estimated, double limit = 1.0,
                          double max_error_allowed = 0.10, int cycle = 0);

void write_validation_json(std::ostream& os, const ValidationReport& report);

// Stages ---------------------------------------------------------------------

/// Mean rotor loads of one wind bin and the platform ballast that trims them.
struct OperatingPoint {
  double u = 0.0;                  ///< [m/s]
  double mean_thrust = 0.0;        ///< [N]
  double mean_rotor_moment = 0.0;  ///< [N m]
  double mean_rpm = 0.0;
  spectral::HarmonicSet harmonics;
  double structural_moment = 0.0;  ///< [N m]
  platform::BallastResult ballast;
  double pitch_moment_offset = 0.0;  ///< static moment handed to the response provider [N m]
};

/// Steady short runs per wind-bin center, then pitch calibration.
std::vector<OperatingPoint> operating_points(const ProjectConfig& config,
                                             const std::vector<double>& wind_centers,
                                             const tower::TowerGeometry& tower);

/// u,mean_thrust_n,mean_rotor_moment_nm,mean_rpm,f_1p_hz,f_3p_hz,f_6p_hz,f_9p_hz,
/// m_struct_nm,target_columns,n_columns,water_mass_per_column_kg,water_height_m
void write_operating_points_csv(std::ostream& os, const std::vector<OperatingPoint>& points);

struct DesignAnalysis {
  tower::TowerGeometry geometry;
  double mode_frequency = 0.0;  ///< used by the response provider [Hz]
  fatigue::EventDamages events;  ///< sorted by state id
  fatigue::SectionDamageProfile damage;
  std::vector<std::pair<double, spectral::PsdEstimate>> psds;  ///< (u, PSD) per state, id order
};

struct AnalysisOptions {
  bool psd = false;
  double mode_frequency = 0.0;   ///< 0 derives it from the geometry
  double excess_mass = 0.0;      ///< uncompensated platform mass change [kg]
  std::string record_dir;        ///< non-empty writes every response record there
  std::string record_label = "design";
};

/// Simulates every state on the worker pool, then reduces in id order.
DesignAnalysis analyze_design(const ProjectConfig& config,
                              const std::vector<env::EnvironmentalState>& states,
                              const std::vector<OperatingPoint>& points,
                              const tower::TowerGeometry& geometry, const AnalysisOptions& options = {});

spectral::PsdHeatmap heatmap(const ProjectConfig& config, const DesignAnalysis& analysis,
                             const std::vector<OperatingPoint>& points);

/// Per-state response file names of one design, e.g. reference/state_00001.csv.
std::vector<std::string> state_file_names(const std::vector<env::EnvironmentalState>& states,
                                          const std::string& design_label);

// Pipeline -------------------------------------------------------------------

struct CycleResult {
  int cycle = 0;
  double gamma_d = 1.0;
  std::string calibration_source;  ///< "reference" or "cycle<k>"
  estimator::CalibrationSet calibration;
  design::OptimizationResult optimization;
  double mass = 0.0;           ///< optimized tower mass [kg]
  double platform_mass = 0.0;  ///< after heave adjustment [kg]
  fatigue::SectionDamageProfile estimated;
  DesignAnalysis validated;
  ValidationReport report;
};

struct StageRecord {
  std::string name;
  std::string status;  ///< ok, failed, pending
  std::vector<std::string> outputs;
  std::string message;
};

struct PipelineResult {
  std::vector<env::EnvironmentalState> states;
  std::vector<OperatingPoint> points;
  DesignAnalysis reference;
  double reference_mass = 0.0;
  std::optional<spectral::PsdHeatmap> reference_heatmap;
  std::vector<CycleResult> cycles;
  bool converged = false;
  std::vector<StageRecord> stages;

  const CycleResult* final_cycle() const { return cycles.empty() ? nullptr : &cycles.back(); }
};

using ProgressFn = std::function<void(const std::string&)>;

/// Full loop. Artifacts are written to out_dir as each stage completes (empty
/// out_dir keeps everything in memory). A failing stage is recorded in the
/// manifest and rethrown with the stage name prefixed.
PipelineResult run_pipeline(const ProjectConfig& config, const std::string& out_dir = "",
                            const ProgressFn& progress = {});

/// Optimization of one cycle from the reference design.
design::OptimizationResult optimize_cycle(const ProjectConfig& config, const tower::TowerGeometry& reference,
                                          const estimator::CalibrationSet& calibration, int cycle);

/// Writes every artifact present in `result` and a manifest. An empty result
/// yields a manifest listing the stages as pending.
std::vector<StageRecord> export_results(const PipelineResult& result, const ProjectConfig& config,
                                        const std::string& out_dir);

/// {config_hash, stages:[{name,status,outputs[]}], versions, notes, timestamp}
void write_manifest(std::ostream& os, const std::string& config_hash,
                    const std::vector<StageRecord>& stages, const ProjectConfig& config,
                    const std::string& timestamp);

/// Library and dependency versions recorded in the manifest.
std::vector<std::pair<std::string, std::string>> versions();

}  // namespace fowt::workflow
