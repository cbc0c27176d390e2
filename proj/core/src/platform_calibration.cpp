#include "fowt/platform_calibration.hpp"

#include <cmath>

#include "fowt/csv.hpp"
#include "fowt/error.hpp"

namespace fowt::platform {

void PlatformModel::validate() const {
  require(column_distance_L > 0.0, ErrorKind::Config, "column distance must be positive");
  require(column_diameter > 0.0, ErrorKind::Config, "column diameter must be positive");
  require(water_density > 0.0, ErrorKind::Config, "water density must be positive");
  require(initial_platform_mass >= 0.0, ErrorKind::Config, "platform mass must be nonnegative");
  require(column_capacity > 0.0, ErrorKind::Config, "column capacity must be positive");
  for (const auto& c : component_masses_and_offsets)
    require(c.mass >= 0.0, ErrorKind::Config, "component mass of '" + c.name + "' is negative");
}

double PlatformModel::x_hub() const {
  for (const auto& c : component_masses_and_offsets)
    if (c.name == "hub") return c.x;
  return 0.0;
}

const char* to_string(TargetColumns target) {
  switch (target) {
    case TargetColumns::upwind: return "upwind";
    case TargetColumns::port_and_starboard: return "port_and_starboard";
    case TargetColumns::none: return "none";
  }
  return "none";
}

double structural_moment(const PlatformModel& p, double mean_thrust, double mean_rotor_moment) {
  double m_weight = 0.0;
  for (const auto& c : p.component_masses_and_offsets) m_weight += c.mass * c.x;
  m_weight *= kGravity;
  const double m_aero = mean_thrust * std::cos(p.shaft_tilt_theta) * (p.z_hub - p.z_struct) +
                        mean_thrust * std::sin(p.shaft_tilt_theta) * p.x_hub() + mean_rotor_moment;
  return m_weight + m_aero;
}

BallastResult pitch_ballast(double m_struct, const PlatformModel& p, double sf) {
  p.validate();
  require(sf >= 1.0, ErrorKind::Config, "ballast safety factor must be >= 1");
  BallastResult r;
  r.adjusted_platform_mass = p.initial_platform_mass;
  if (m_struct == 0.0) return r;

  // Aft columns sit at L cos(60 deg) each, so two of them act at lever L.
  r.target_columns = m_struct < 0.0 ? TargetColumns::upwind : TargetColumns::port_and_starboard;
  r.n_columns = m_struct < 0.0 ? 1 : 2;
  r.water_mass_per_column = std::abs(m_struct) / (p.column_distance_L * kGravity);
  r.ballast_moment = -m_struct;
  require(r.water_mass_per_column <= p.column_capacity, ErrorKind::Capacity,
          "ballast of " + csv::format(r.water_mass_per_column) + " kg per column exceeds capacity " +
              csv::format(p.column_capacity) + " kg");
  const double col_area = kPi * p.column_diameter * p.column_diameter / 4.0;
  r.water_height = r.water_mass_per_column / (p.water_density * col_area) * sf;
  r.adjusted_platform_mass = p.initial_platform_mass - r.n_columns * r.water_mass_per_column * sf;
  require(r.adjusted_platform_mass >= 0.0, ErrorKind::Infeasible,
          "ballast exceeds the available platform mass");
  return r;
}

double heave_adjust(double delta_tower_mass) { return -delta_tower_mass; }

double heave_adjust(double delta_tower_mass, double platform_mass) {
  const double delta = heave_adjust(delta_tower_mass);
  require(platform_mass + delta >= 0.0, ErrorKind::Infeasible,
          "heave adjustment of " + csv::format(delta) + " kg would make the platform mass negative");
  return delta;
}

}  // namespace fowt::platform
