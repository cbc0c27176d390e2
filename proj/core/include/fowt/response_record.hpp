#pragma once

#include <vector>

namespace fowt {

/// Simulated time series for one environmental state.
struct ResponseRecord {
  std::vector<double> time;             ///< [s]
  std::vector<double> station_heights;  ///< above the tower base, strictly increasing [m]
  /// fore_aft_moment[station][sample] [N m]
  std::vector<std::vector<double>> fore_aft_moment;
  std::vector<double> rotor_speed;     ///< [rpm]
  std::vector<double> platform_pitch;  ///< [rad]
  std::vector<double> platform_heave;  ///< [m]
  double mean_thrust = 0.0;            ///< after trim [N]
  double mean_rotor_moment = 0.0;      ///< after trim [N m]
  double mean_rotor_speed = 0.0;       ///< after trim [rpm]

  std::size_t samples() const { return time.size(); }
  /// Throws fowt::Error(Input) if array lengths disagree.
  void validate() const;
};

}  // namespace fowt
