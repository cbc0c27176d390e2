#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fowt/design_optimizer.hpp"
#include "fowt/env_sampler.hpp"
#include "fowt/fatigue_analysis.hpp"
#include "fowt/platform_calibration.hpp"
#include "fowt/response_provider.hpp"
#include "fowt/spectral_analysis.hpp"
#include "fowt/tower_model.hpp"

namespace fowt::workflow {

struct PsdSettings {
  int segment_length = 4096;
  spectral::Interval f_range{0.0, 1.0};  ///< heatmap crop [Hz]
  int station = 0;                       ///< moment channel analysed
};

struct EstimatorSettings {
  double m = 4.0;
  double k = 0.20;
  double t_ref = 0.025;  ///< [m]
};

struct ProjectConfig {
  env::SamplingPlan plan;
  env::WindSpeedModel wind;
  response::SimulationConfig simulation;
  response::RotorModel rotor;
  platform::PlatformModel platform;
  double ballast_safety_factor = 1.0;

  std::string reference_geometry_path;  ///< empty uses the bundled reference tower
  tower::Material material;
  tower::RnaProperties rna;
  tower::TopLoads loads;
  tower::StructuralSettings structural;

  fatigue::SNCurve sn_curve;
  EstimatorSettings estimator;
  PsdSettings psd;

  design::DesignBounds bounds;
  design::OptimizerSettings optimizer;
  /// Entry k-1 applies to cycle k; the last entry repeats.
  std::vector<design::ConstraintConfig> cycle_constraints{design::ConstraintConfig{},
                                                          [] {
                                                            design::ConstraintConfig c;
                                                            c.gamma_d = 1.11;
                                                            return c;
                                                          }()};

  double lifetime = fatigue::kDesignLife;           ///< LT [s]
  double event_duration = fatigue::kEventDuration;  ///< t_event [s]
  int max_cycles = 5;
  bool reuse_reference_mode = true;  ///< keep the reference tower mode in later simulations
  double damage_limit = 1.0;
  double max_relative_error = 0.10;
  std::string output_dir = "out";
  int jobs = 1;

  void validate() const;
  const design::ConstraintConfig& constraints_for(int cycle) const;
  tower::TowerGeometry reference_geometry() const;
};

/// Case-study plan of 22 wind bins, 7 Hs, 7 Tp and 6 seeds.
ProjectConfig case_study_config();
/// 5 wind bins, 2 seeds and 3 x 3 sea states (90 events).
ProjectConfig desk_scale_config();

/// Keys absent from the file keep their defaults; unknown keys are rejected.
/// Relative geometry paths resolve against base_dir.
ProjectConfig parse_config(std::istream& is, const std::string& base_dir = ".");
ProjectConfig load_config(const std::string& path);
void write_config(std::ostream& os, const ProjectConfig& config);

/// Stable hex digest of the canonical configuration text.
std::string config_hash(const ProjectConfig& config);

}  // namespace fowt::workflow
