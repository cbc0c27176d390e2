#pragma once

#include <limits>
#include <string>
#include <vector>

namespace fowt::platform {

struct ComponentMass {
  std::string name;
  double mass = 0.0;  ///< [kg]
  double x = 0.0;     ///< downwind offset from the tower axis [m]
};

struct PlatformModel {
  double column_distance_L = 51.75;        ///< [m]
  double column_diameter = 12.5;           ///< [m]
  double initial_platform_mass = 1.7e7;    ///< [kg]
  double water_density = 1025.0;           ///< [kg/m^3]
  double z_hub = 170.0;                    ///< [m]
  double z_struct = 0.0;                   ///< moment reference height [m]
  double shaft_tilt_theta = 0.10471975511965977;  ///< [rad]
  double column_capacity = std::numeric_limits<double>::infinity();  ///< water per column [kg]
  std::vector<ComponentMass> component_masses_and_offsets{
      {"nacelle", 849.685e3, -1.5}, {"hub", 120.0e3, -12.0}, {"blades", 249.0e3, -12.6}};

  void validate() const;
  /// x of the component named "hub", 0 if absent.
  double x_hub() const;
};

enum class TargetColumns { upwind, port_and_starboard, none };
const char* to_string(TargetColumns target);

struct BallastResult {
  TargetColumns target_columns = TargetColumns::none;
  int n_columns = 0;
  double water_mass_per_column = 0.0;  ///< [kg]
  double water_height = 0.0;           ///< [m]
  double adjusted_platform_mass = 0.0; ///< [kg]
  double ballast_moment = 0.0;         ///< restoring moment of the water, -m_struct [N m]
};

/// M_struct = g sum m_c x_c + F cos(theta)(z_hub - z_struct) + F sin(theta) x_hub + M_rotor
double structural_moment(const PlatformModel& platform, double mean_thrust, double mean_rotor_moment);

BallastResult pitch_ballast(double m_struct, const PlatformModel& platform, double sf = 1.0);

/// Platform mass change that keeps the total displaced mass constant.
double heave_adjust(double delta_tower_mass);
/// Same, checked against the current platform mass.
double heave_adjust(double delta_tower_mass, double platform_mass);

}  // namespace fowt::platform
