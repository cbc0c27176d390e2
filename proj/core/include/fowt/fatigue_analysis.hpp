#pragma once

#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

#include "fowt/env_sampler.hpp"
#include "fowt/response_record.hpp"
#include "fowt/tower_model.hpp"

namespace fowt::fatigue {

/// Two-segment S-N law, stress ranges in MPa: log10 N = log10 a - m log10(S (t/t_ref)^k).
struct SNCurve {
  double log10_a1 = 12.010;
  double m1 = 3.0;
  double log10_a2 = 15.350;
  double m2 = 5.0;
  double n_transition = 1.0e7;     ///< [cycles]
  double thickness_exponent_k = 0.20;
  double t_ref = 0.025;            ///< [m]

  /// One slope everywhere (no transition).
  static SNCurve single_slope(double log10_a, double m, double k = 0.20, double t_ref = 0.025);
  bool is_single_slope() const { return n_transition == std::numeric_limits<double>::infinity(); }
  void validate() const;
};

struct Cycle {
  double range = 0.0;
  double count = 0.0;  ///< 0.5 or 1.0
};
using CycleSet = std::vector<Cycle>;

struct SectionDamageProfile {
  std::vector<double> section_midpoints;  ///< [m]
  std::vector<double> damage;
};

/// Turning points after dropping equal successive samples.
std::vector<double> extrema(const std::vector<double>& series);

/// Four-point rainflow with residual half cycles.
CycleSet rainflow(const std::vector<double>& series);

/// Bending stress range for moment range delta_m on a tube of outer radius r.
double moment_to_stress_range(double delta_m, double r, double t);

/// Thickness correction (t/t_ref)^k, or 1 for t <= t_ref.
double thickness_factor(double t, const SNCurve& curve);

/// delta_sigma in Pa.
double cycles_to_failure(double delta_sigma, double t, const SNCurve& curve);

/// Miner sum for moment-range cycles on a section of radius r and wall t.
double damage_from_cycles(const CycleSet& cycles, double r, double t, const SNCurve& curve);
double damage_from_moment_series(const std::vector<double>& moment, double r, double t,
                                 const SNCurve& curve);

/// Linear interpolation of one station channel to height z.
std::vector<double> interpolate_moment(const ResponseRecord& record, double z);

/// Per-section damage of one simulated event, discarding samples before `trim`.
std::vector<double> event_damage(const ResponseRecord& record, const tower::TowerGeometry& geometry,
                                 const SNCurve& curve, double trim);

inline constexpr double kSecondsPerYear = 365.25 * 86400.0;
inline constexpr double kDesignLife = 25.0 * kSecondsPerYear;  ///< [s]
inline constexpr double kEventDuration = 600.0;                ///< [s]

using EventDamages = std::vector<std::pair<int, std::vector<double>>>;

/// D_t = sum D_id (lt / t_event) w_id per section.
SectionDamageProfile lifetime_damage(const EventDamages& event_damages,
                                     const std::vector<env::EnvironmentalState>& states, double lt,
                                     double t_event, const std::vector<double>& section_midpoints);

/// Rate form lt * sum w_id D_id / t_event, algebraically identical to lifetime_damage.
SectionDamageProfile lifetime_damage_rate_form(const EventDamages& event_damages,
                                               const std::vector<env::EnvironmentalState>& states,
                                               double lt, double t_event,
                                               const std::vector<double>& section_midpoints);

// CSV: z_mid_m,damage   and   range_pa,count
void write_damage_csv(std::ostream& os, const SectionDamageProfile& profile);
SectionDamageProfile read_damage_csv(std::istream& is);
void write_cycles_csv(std::ostream& os, const CycleSet& cycles);

}  // namespace fowt::fatigue
