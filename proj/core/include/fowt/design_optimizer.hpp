#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fowt/fatigue_estimator.hpp"
#include "fowt/spectral_analysis.hpp"
#include "fowt/sqp.hpp"
#include "fowt/tower_model.hpp"

namespace fowt::design {

using spectral::Interval;

struct DesignBounds {
  double d_min = 6.0;     ///< [m]
  double d_max = 12.0;    ///< [m]
  double t_min = 0.0375;  ///< [m]
  double t_max = 0.15;    ///< [m]
};

/// [d_0..d_n, t_1..t_n] with per-entry bounds.
struct DesignVector {
  std::vector<double> values;
  std::vector<double> lower;
  std::vector<double> upper;

  static DesignVector from_geometry(const tower::TowerGeometry& geometry, const DesignBounds& bounds = {});
  /// Rebuilds a geometry using the given section heights.
  tower::TowerGeometry to_geometry(const std::vector<double>& heights) const;
  std::size_t sections() const { return (values.size() - 1) / 2; }
};

struct ConstraintConfig {
  double gamma_f = 1.35;
  double gamma_m = 1.3;
  double gamma_n = 1.0;
  double gamma_d = 1.0;
  Interval f1_band_land{0.25, 0.38};  ///< [Hz]
  Interval dt_ratio_band{80.0, 160.0};
  Interval taper_band{0.9, 1.0};
  double fatigue_limit = 1.0;

  void validate() const;
};

struct OptimizerSettings {
  double fd_step = 1e-4;
  double tol = 1e-3;
  int max_iter = 100;
  int jobs = 1;
};

struct DesignContext {
  tower::Material material;
  tower::RnaProperties rna;
  tower::TopLoads loads;
  tower::StructuralSettings structural;
  estimator::CalibrationSet calibration;
  ConstraintConfig constraints;
  std::vector<double> heights;  ///< frozen section heights [m]
};

/// Constraint families in their frozen order inside the constraint vector.
enum class ConstraintClass {
  stress,
  shell_buckling,
  global_buckling,
  frequency,
  fatigue,
  monotone_diameter,
  monotone_thickness,
  dt_ratio,
  taper,
};
inline constexpr int kConstraintClassCount = 9;
const char* to_string(ConstraintClass c);

/// Class of every entry of the constraint vector for n sections.
std::vector<ConstraintClass> constraint_layout(std::size_t n);

struct DesignEvaluation {
  double objective = 0.0;           ///< tower mass [kg]
  std::vector<double> constraints;  ///< g <= 0, order of constraint_layout()
  std::vector<double> fatigue_damage;  ///< estimator prediction, unfactored
};

DesignEvaluation evaluate(const DesignVector& x, const DesignContext& context);

struct TraceEntry {
  int iter = 0;
  double mass = 0.0;        ///< [kg]
  double damage_max = 0.0;
  double damage_min = 0.0;
  bool feasible = false;
  std::vector<bool> class_satisfied;  ///< per ConstraintClass
  std::vector<double> design;         ///< snapshot of x
};

struct OptimizationTrace {
  std::vector<TraceEntry> entries;
  /// Last trace index at which each class was violated, -1 if never.
  std::vector<int> last_violation() const;
};

struct OptimizationResult {
  DesignVector x_star;
  tower::TowerGeometry geometry;
  OptimizationTrace trace;
  opt::SqpStatus status = opt::SqpStatus::max_iterations;
  int iterations = 0;
  std::vector<std::size_t> violated;
  DesignEvaluation final_eval;
};

OptimizationResult optimize(const DesignVector& x0, const DesignContext& context,
                            const OptimizerSettings& settings = {});

/// iter,mass_kg,d_max,d_min,feasible
void write_trace_csv(std::ostream& os, const OptimizationTrace& trace);
/// One JSON object per iterate including the design snapshot and class flags.
void write_trace_json(std::ostream& os, const OptimizationTrace& trace);

}  // namespace fowt::design
