#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "fowt/env_sampler.hpp"
#include "fowt/response_record.hpp"
#include "fowt/tower_model.hpp"

namespace fowt::response {

/// Parameters of the reduced-order load model. Defaults describe a 22 MW
/// semi-submersible turbine.
struct SurrogateParams {
  double damping_ratio = 0.03;           ///< first fore-aft mode, structural plus aerodynamic [-]
  double mode_frequency = 0.0;           ///< [Hz]; 0 derives f1_floating from the tower
  double tower_base_elevation = 15.0;    ///< above the still-water line [m]
  double aero_moment_arm = 14.2;         ///< rotor moment per unit thrust [m]
  double kaimal_length = 8.1 * 42.0;     ///< longitudinal integral scale [m]
  double rotor_averaging = 0.5;          ///< rotor-effective filter time = this * R / u [-]
  double rpm_filter_time = 10.0;         ///< [s]
  double harmonic_1p = 0.002;            ///< 1P thrust ripple relative to mean thrust [-]
  double harmonic_3p = 0.005;            ///< 3P thrust ripple relative to mean thrust [-]
  double column_diameter = 12.5;         ///< wave-loaded column [m]
  double column_draft = 20.0;            ///< [m]
  double inertia_coefficient = 2.0;      ///< Morison C_m [-]
  double wave_lever = 20.0;              ///< wave force arm about the pitch centre [m]
  double pitch_stiffness = 1.2e10;       ///< hydrostatic + mooring [N m/rad]
  double pitch_inertia = 3.0e10;         ///< platform pitch inertia incl. added mass [kg m^2]
  double heave_stiffness = 4.5e6;        ///< [N/m]
  double heave_response_ratio = 0.2;     ///< heave per unit surface elevation [-]
  double pitch_moment_offset = 0.0;      ///< static weight + ballast moment on the platform [N m]
  double excess_mass = 0.0;              ///< uncompensated mass change [kg]
  bool regular_waves = false;            ///< one wave component at 1/tp
};

struct SimulationConfig {
  double duration = 1000.0;  ///< [s]
  double dt = 0.05;          ///< [s]
  double trim = 400.0;       ///< [s]
  std::uint64_t seed = 0;
  int n_stations = 11;
  SurrogateParams surrogate;

  /// Short runs used to precompute mean rotor loads.
  static SimulationConfig calibration();
  void validate() const;
  std::size_t samples() const;
};

struct RotorModel {
  double rated_power = 22.0e6;     ///< [W]
  double rotor_diameter = 284.0;   ///< [m]
  double hub_height = 170.0;       ///< above the still-water line [m]
  double rna_mass = 1218.685e3;    ///< [kg]
  double cut_in = 3.0;             ///< [m/s]
  double rated_speed = 11.0;       ///< [m/s]
  double cut_out = 25.0;           ///< [m/s]
  double min_rpm = 1.807;
  double max_rpm = 7.061;
  double ct_below_rated = 0.8;
  /// Optional (u, Ct) table; empty uses the constant-then-inverse-square law.
  std::vector<std::pair<double, double>> thrust_coefficient_curve;

  void validate() const;
  double rotor_area() const;
  double thrust_coefficient(double u) const;
  /// 1/2 rho A Ct(u) u^2
  double thrust(double u) const;
  /// Linear from min_rpm at cut-in to max_rpm at rated, then constant.
  double rotor_speed(double u) const;
};

/// Point wind speed series with a Kaimal spectrum, mean u and standard deviation sigma_w.
std::vector<double> synth_wind_series(double u, double sigma_w, std::uint64_t seed,
                                      const SimulationConfig& config);

struct WaveSeries {
  std::vector<double> elevation;         ///< [m]
  std::vector<double> force;             ///< column inertia force [N]
  std::vector<double> pitch;             ///< wave-frequency platform pitch [rad]
  std::vector<double> pitch_acceleration;///< [rad/s^2]
};

/// Pierson-Moskowitz sea with significant height hs (4 sigma of the elevation).
WaveSeries synth_waves(double hs, double tp, std::uint64_t seed, const SimulationConfig& config);
std::vector<double> synth_wave_force(double hs, double tp, std::uint64_t seed,
                                     const SimulationConfig& config);

/// Seeds derived from the run seed and the state labels.
std::uint64_t wind_seed(const SimulationConfig& config, const env::EnvironmentalState& state);
std::uint64_t wave_seed(const SimulationConfig& config, const env::EnvironmentalState& state);

/// First floating fore-aft frequency used for the dynamic amplification.
double mode_frequency(const tower::TowerGeometry& tower, const RotorModel& rotor,
                      const SimulationConfig& config);

ResponseRecord simulate_response(const env::EnvironmentalState& state,
                                 const tower::TowerGeometry& tower, const RotorModel& rotor,
                                 const SimulationConfig& config, bool steady = false);

/// time_s,rotor_rpm,pitch_rad,heave_m,m_fa_<z>...
void write_response_csv(std::ostream& os, const ResponseRecord& record);
ResponseRecord read_response_csv(std::istream& is);

}  // namespace fowt::response
