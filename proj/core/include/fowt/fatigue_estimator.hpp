#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fowt/fatigue_analysis.hpp"
#include "fowt/tower_model.hpp"

namespace fowt::estimator {

/// Per-section constants of the geometry-scaling damage surrogate
/// D = C r^{-2m} t^{-m} (t/t_ref)^{k m}.
struct CalibrationSet {
  std::vector<double> c;
  double m = 4.0;
  double k = 0.20;
  double t_ref = 0.025;  ///< [m]
  std::string calibration_geometry_hash;
};

/// Stable hex digest of the geometry arrays.
std::string geometry_hash(const tower::TowerGeometry& geometry);

CalibrationSet calibrate(const tower::TowerGeometry& geometry,
                         const fatigue::SectionDamageProfile& damages, double m = 4.0,
                         double k = 0.20, double t_ref = 0.025);

fatigue::SectionDamageProfile predict(const CalibrationSet& calibration,
                                      const tower::TowerGeometry& geometry);

/// JSON: {"m","k","t_ref","geometry_hash","sections":[{"index","c"}...]}
void write_calibration_json(std::ostream& os, const CalibrationSet& calibration);
CalibrationSet read_calibration_json(std::istream& is);

}  // namespace fowt::estimator
