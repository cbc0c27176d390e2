#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace fowt::env {

enum class IecClass { A, B, C };

IecClass parse_iec_class(const std::string& name);
std::string to_string(IecClass cls);

/// Exponentiated Weibull law of the 10-minute mean wind speed plus the IEC
/// reference turbulence intensities.
struct WindSpeedModel {
  double alpha = 12.773;  ///< scale [m/s]
  double beta = 2.345;    ///< shape [-]
  double delta = 0.880;   ///< exponent [-]
  std::map<IecClass, double> i_ref_by_class{
      {IecClass::A, 0.16}, {IecClass::B, 0.14}, {IecClass::C, 0.12}};

  void validate() const;
};

struct SamplingPlan {
  int n_u = 22;
  int n_hs = 7;
  int n_tp = 7;
  int n_seeds = 6;
  double v_in = 3.0;   ///< [m/s]
  double v_out = 25.0; ///< [m/s]
  bool turbulent = true;
  IecClass iec_class = IecClass::A;
  double m_ww_fixed = 0.0;  ///< [rad]

  void validate() const;
  /// Number of states sample_states() will return.
  std::size_t state_count() const;
};

struct EnvironmentalState {
  int id = 0;
  double u = 0.0;        ///< mean wind speed [m/s]
  int seed = 0;          ///< turbulence seed label, 0 for steady wind
  double sigma_w = 0.0;  ///< wind speed standard deviation [m/s]
  double hs = 0.0;       ///< significant wave height [m]
  double tp = 0.0;       ///< peak period [s]
  double m_ww = 0.0;     ///< wind-wave misalignment [rad]
  double weight = 0.0;   ///< normalized occurrence probability [-]
};

struct Bracket {
  double lo = 0.0;
  double hi = 1.0;
};

// Wind speed ---------------------------------------------------------------

double wind_speed_pdf(double u, const WindSpeedModel& model = {});
double wind_speed_cdf(double u, const WindSpeedModel& model = {});

/// sigma_w = I_ref * (0.75 u + 5.6)
double turbulence_std(double u, IecClass iec_class, const WindSpeedModel& model = {});

// Significant wave height | U ----------------------------------------------

struct WaveHeightParams {
  double alpha = 0.0;
  double beta = 0.0;
};
WaveHeightParams wave_height_params(double u);
double wave_height_cdf(double hs, double u);
double wave_height_pdf(double hs, double u);

// Peak period | Hs -----------------------------------------------------------

struct WavePeriodParams {
  double mu = 0.0;     ///< mean of ln(Tp)
  double sigma = 0.0;  ///< std of ln(Tp)
};
WavePeriodParams wave_period_params(double hs);
double wave_period_cdf(double tp, double hs);
double wave_period_pdf(double tp, double hs);

// Misalignment | U (von Mises) -----------------------------------------------

struct MisalignmentParams {
  double kappa = 0.0;
  double mu = 0.0;  ///< [rad]
};
MisalignmentParams misalignment_params(double u);
double misalignment_pdf(double theta, double u);

// Numerics -------------------------------------------------------------------

/// Inverts a monotone nondecreasing CDF on a bracket. Bisection safeguarded
/// secant steps; stops when |cdf(x) - q| <= 1e-10 or the bracket is <= 1e-12 wide.
double invert_cdf(const std::function<double(double)>& cdf, double q, Bracket bracket);

/// Adaptive Simpson quadrature to a relative tolerance.
double integrate_adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol = 1e-9);

// Sampling -------------------------------------------------------------------

struct WindBin {
  double u = 0.0;  ///< bin center [m/s]
  double p = 0.0;  ///< probability mass of the bin [-]
};

/// Bin i (1-based) of the cut-in/cut-out range, mass integrated from the model density.
WindBin wind_bin_probability(int i, const SamplingPlan& plan, const WindSpeedModel& model = {});
/// Same, with an arbitrary density (used to check the binning against known laws).
WindBin wind_bin_probability(int i, const SamplingPlan& plan,
                             const std::function<double(double)>& density);

/// Stratified conditional sampling of (U, Hs, Tp) with seed expansion and
/// weight normalization. Deterministic: no random draws.
std::vector<EnvironmentalState> sample_states(const SamplingPlan& plan,
                                              const WindSpeedModel& model = {});

/// Distinct wind-bin centers of a state set, ascending.
std::vector<double> wind_bin_centers(const std::vector<EnvironmentalState>& states);

// CSV: id,u_ms,seed,sigma_w,hs_m,tp_s,mww_rad,weight
void write_states_csv(std::ostream& os, const std::vector<EnvironmentalState>& states);
std::vector<EnvironmentalState> read_states_csv(std::istream& is);

}  // namespace fowt::env
