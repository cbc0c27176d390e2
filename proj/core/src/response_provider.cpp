#include "fowt/response_provider.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>

#include "fowt/csv.hpp"
#include "fowt/error.hpp"
#include "fowt/fft.hpp"

namespace fowt {

void ResponseRecord::validate() const {
  const std::size_t n = time.size();
  require(fore_aft_moment.size() == station_heights.size(), ErrorKind::Input,
          "record needs one moment channel per station");
  for (const auto& ch : fore_aft_moment)
    require(ch.size() == n, ErrorKind::Input, "moment channel length differs from time axis");
  require(rotor_speed.size() == n && platform_pitch.size() == n && platform_heave.size() == n,
          ErrorKind::Input, "record channels differ in length");
  for (std::size_t i = 1; i < station_heights.size(); ++i)
    require(station_heights[i] > station_heights[i - 1], ErrorKind::Input,
            "station heights must be strictly increasing");
}

}  // namespace fowt

namespace fowt::response {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return splitmix(a ^ splitmix(b)); }

std::uint64_t double_bits(double v) {
  std::uint64_t b = 0;
  std::memcpy(&b, &v, sizeof b);
  return b;
}

/// Uniform draws in [0,1) with the same bits on every platform.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : gen_(seed) {}
  double operator()() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

/// First-order low-pass, started at the first sample.
std::vector<double> low_pass(const std::vector<double>& x, double dt, double tau) {
  std::vector<double> y(x.size());
  if (x.empty()) return y;
  if (tau <= 0.0) return x;
  const double a = dt / (tau + dt);
  y[0] = x[0];
  for (std::size_t i = 1; i < x.size(); ++i) y[i] = y[i - 1] + a * (x[i] - y[i - 1]);
  return y;
}

double mean_from(const std::vector<double>& x, std::size_t first) {
  if (first >= x.size()) return 0.0;
  double s = 0.0;
  for (std::size_t i = first; i < x.size(); ++i) s += x[i];
  return s / static_cast<double>(x.size() - first);
}

/// sum_k a_k cos(2 pi f_k t + psi_k) on the FFT grid f_k = k / (n dt).
std::vector<double> synthesize(const std::vector<std::complex<double>>& half, std::size_t n) {
  return fft::inverse_real(half, n);
}

}  // namespace

SimulationConfig SimulationConfig::calibration() {
  SimulationConfig c;
  c.duration = 200.0;
  c.trim = 100.0;
  return c;
}

void SimulationConfig::validate() const {
  require(dt > 0.0, ErrorKind::Config, "simulation dt must be positive");
  require(duration > trim && trim >= 0.0, ErrorKind::Config, "simulation needs duration > trim >= 0");
  const double steps = duration / dt;
  require(std::abs(steps - std::round(steps)) <= 1e-9 * steps, ErrorKind::Config,
          "simulation duration must be an integer number of time steps");
  require(n_stations >= 2, ErrorKind::Config, "simulation needs at least two stations");
  require(surrogate.damping_ratio > 0.0 && surrogate.damping_ratio < 1.0, ErrorKind::Config,
          "damping ratio must lie in (0, 1)");
  require(surrogate.pitch_stiffness > 0.0 && surrogate.heave_stiffness > 0.0, ErrorKind::Config,
          "platform stiffnesses must be positive");
}

std::size_t SimulationConfig::samples() const {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

void RotorModel::validate() const {
  require(cut_in < rated_speed && rated_speed <= cut_out, ErrorKind::Config,
          "rotor needs cut_in < rated_speed <= cut_out");
  require(min_rpm < max_rpm, ErrorKind::Config, "rotor needs min_rpm < max_rpm");
  require(rotor_diameter > 0.0 && rna_mass > 0.0 && hub_height > 0.0, ErrorKind::Config,
          "rotor diameter, RNA mass and hub height must be positive");
  for (std::size_t i = 1; i < thrust_coefficient_curve.size(); ++i)
    require(thrust_coefficient_curve[i].first > thrust_coefficient_curve[i - 1].first,
            ErrorKind::Config, "thrust coefficient table must have increasing wind speeds");
}

double RotorModel::rotor_area() const { return kPi * 0.25 * rotor_diameter * rotor_diameter; }

double RotorModel::thrust_coefficient(double u) const {
  if (!thrust_coefficient_curve.empty()) {
    const auto& c = thrust_coefficient_curve;
    if (u <= c.front().first) return c.front().second;
    if (u >= c.back().first) return c.back().second;
    auto it = std::upper_bound(c.begin(), c.end(), u,
                               [](double v, const std::pair<double, double>& p) { return v < p.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    return lo.second + (hi.second - lo.second) * (u - lo.first) / (hi.first - lo.first);
  }
  if (u <= rated_speed) return ct_below_rated;
  return ct_below_rated * (rated_speed / u) * (rated_speed / u);
}

double RotorModel::thrust(double u) const {
  const double v = std::max(u, 0.0);
  return 0.5 * kAirDensity * rotor_area() * thrust_coefficient(v) * v * v;
}

double RotorModel::rotor_speed(double u) const {
  if (u <= cut_in) return min_rpm;
  if (u >= rated_speed) return max_rpm;
  return min_rpm + (max_rpm - min_rpm) * (u - cut_in) / (rated_speed - cut_in);
}

std::vector<double> synth_wind_series(double u, double sigma_w, std::uint64_t seed,
                                      const SimulationConfig& config) {
  config.validate();
  require(u >= 0.0 && sigma_w >= 0.0, ErrorKind::Domain, "wind synthesis needs u >= 0 and sigma_w >= 0");
  const std::size_t n = config.samples();
  std::vector<double> w(n, u);
  if (sigma_w == 0.0 || n < 4) return w;

  const double df = 1.0 / (static_cast<double>(n) * config.dt);
  const double ur = std::max(u, 1.0);
  const double lu = config.surrogate.kaimal_length / ur;
  Uniform draw(seed);
  std::vector<std::complex<double>> half(n / 2 + 1, {0.0, 0.0});
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double f = static_cast<double>(k) * df;
    const double s = 4.0 * lu / std::pow(1.0 + 6.0 * f * lu, 5.0 / 3.0);
    const double amp = std::sqrt(2.0 * s * df);
    half[k] = std::polar(0.5 * amp, 2.0 * kPi * draw());
  }
  auto x = synthesize(half, n);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double scale = var > 0.0 ? sigma_w / std::sqrt(var) : 0.0;
  for (std::size_t i = 0; i < n; ++i) w[i] = u + (x[i] - mean) * scale;
  return w;
}

WaveSeries synth_waves(double hs, double tp, std::uint64_t seed, const SimulationConfig& config) {
  config.validate();
  require(hs >= 0.0 && tp > 0.0, ErrorKind::Domain, "wave synthesis needs hs >= 0 and tp > 0");
  const std::size_t n = config.samples();
  const auto& sp = config.surrogate;
  WaveSeries out;
  out.elevation.assign(n, 0.0);
  out.force.assign(n, 0.0);
  out.pitch.assign(n, 0.0);
  out.pitch_acceleration.assign(n, 0.0);
  if (hs == 0.0 || n < 4) return out;

  const double col_area = kPi * 0.25 * sp.column_diameter * sp.column_diameter;
  // Deep-water inertia force per unit elevation amplitude, integrated over the draft.
  auto force_gain = [&](double omega) {
    const double k = omega * omega / kGravity;
    return kWaterDensity * sp.inertia_coefficient * col_area * kGravity *
           (1.0 - std::exp(-k * sp.column_draft));
  };
  // Above the pitch natural frequency the platform responds through its inertia.
  const double pitch_gain = sp.wave_lever / sp.pitch_inertia;
  Uniform draw(seed);

  if (sp.regular_waves) {
    const double omega = 2.0 * kPi / tp;
    const double a = 0.5 * hs;
    const double psi = 2.0 * kPi * draw();
    const double fa = force_gain(omega) * a;
    for (std::size_t i = 0; i < n; ++i) {
      const double ph = omega * static_cast<double>(i) * config.dt + psi;
      out.elevation[i] = a * std::cos(ph);
      out.force[i] = -fa * std::sin(ph);
      out.pitch_acceleration[i] = pitch_gain * out.force[i];
      out.pitch[i] = -out.pitch_acceleration[i] / (omega * omega);
    }
    return out;
  }

  const double df = 1.0 / (static_cast<double>(n) * config.dt);
  const double fp = 1.0 / tp;
  const std::size_t nb = n / 2 + 1;
  std::vector<double> amp(nb, 0.0);
  double m0 = 0.0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double f = static_cast<double>(k) * df;
    const double s = 5.0 / 16.0 * hs * hs * std::pow(fp, 4) * std::pow(f, -5) *
                     std::exp(-1.25 * std::pow(fp / f, 4));
    amp[k] = std::sqrt(2.0 * s * df);
    m0 += 0.5 * amp[k] * amp[k];
  }
  // exact significant height for the discrete sea
  const double norm = m0 > 0.0 ? (0.25 * hs) / std::sqrt(m0) : 0.0;
  std::vector<std::complex<double>> eta(nb), force(nb), acc(nb), pitch(nb);
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double omega = 2.0 * kPi * static_cast<double>(k) * df;
    const double a = amp[k] * norm;
    const double psi = 2.0 * kPi * draw();
    eta[k] = std::polar(0.5 * a, psi);
    force[k] = std::polar(0.5 * a * force_gain(omega), psi + 0.5 * kPi);
    acc[k] = pitch_gain * force[k];
    pitch[k] = -acc[k] / (omega * omega);
  }
  out.elevation = synthesize(eta, n);
  out.force = synthesize(force, n);
  out.pitch_acceleration = synthesize(acc, n);
  out.pitch = synthesize(pitch, n);
  return out;
}

std::vector<double> synth_wave_force(double hs, double tp, std::uint64_t seed,
                                     const SimulationConfig& config) {
  return synth_waves(hs, tp, seed, config).force;
}

std::uint64_t wind_seed(const SimulationConfig& config, const env::EnvironmentalState& state) {
  return mix(mix(config.seed, static_cast<std::uint64_t>(state.seed)), double_bits(state.u));
}

std::uint64_t wave_seed(const SimulationConfig& config, const env::EnvironmentalState& state) {
  return mix(mix(config.seed ^ 0x77617665ULL, static_cast<std::uint64_t>(state.id)),
             double_bits(state.hs) ^ (double_bits(state.tp) << 1));
}

double mode_frequency(const tower::TowerGeometry& tower, const RotorModel& rotor,
                      const SimulationConfig& config) {
  if (config.surrogate.mode_frequency > 0.0) return config.surrogate.mode_frequency;
  tower::RnaProperties rna;
  rna.mass = rotor.rna_mass;
  return tower::first_natural_frequency(tower, tower::Material{}, rna).f1_floating;
}

ResponseRecord simulate_response(const env::EnvironmentalState& state,
                                 const tower::TowerGeometry& tower, const RotorModel& rotor,
                                 const SimulationConfig& config, bool steady) {
  config.validate();
  rotor.validate();
  tower.validate();
  const bool idle = steady && state.u == 0.0;
  if (!idle) {
    require(state.u >= rotor.cut_in && state.u <= rotor.cut_out, ErrorKind::RejectedState,
            "state " + std::to_string(state.id) + " wind speed " + csv::format(state.u) +
                " m/s outside the operating range [" + csv::format(rotor.cut_in) + ", " +
                csv::format(rotor.cut_out) + "]");
  }
  const auto& sp = config.surrogate;
  const std::size_t n = config.samples();
  const double dt = config.dt;
  const std::size_t first = std::min(n - 1, static_cast<std::size_t>(std::llround(config.trim / dt)));

  ResponseRecord rec;
  rec.time.resize(n);
  for (std::size_t i = 0; i < n; ++i) rec.time[i] = static_cast<double>(i) * dt;

  // Wind, rotor-effective wind and rotor speed.
  std::vector<double> wind = steady ? std::vector<double>(n, state.u)
                                    : synth_wind_series(state.u, state.sigma_w, wind_seed(config, state), config);
  const double radius = 0.5 * rotor.rotor_diameter;
  const auto u_eff = steady ? wind : low_pass(wind, dt, sp.rotor_averaging * radius / std::max(state.u, 1.0));
  const auto u_ctrl = steady ? wind : low_pass(wind, dt, sp.rpm_filter_time);

  std::vector<double> thrust(n), force(n);
  rec.rotor_speed.resize(n);
  const double mean_thrust_law = idle ? 0.0 : rotor.thrust(state.u);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rec.rotor_speed[i] = idle ? 0.0 : rotor.rotor_speed(u_ctrl[i]);
    thrust[i] = idle ? 0.0 : rotor.thrust(u_eff[i]);
    const double ripple = sp.harmonic_1p * std::sin(phase) + sp.harmonic_3p * std::sin(3.0 * phase);
    force[i] = thrust[i] + mean_thrust_law * ripple;
    phase += 2.0 * kPi * rec.rotor_speed[i] / 60.0 * dt;
  }

  // Waves act through the wave-induced platform pitch acceleration on the RNA.
  WaveSeries waves;
  if (steady || state.hs <= 0.0) {
    waves.elevation.assign(n, 0.0);
    waves.force.assign(n, 0.0);
    waves.pitch.assign(n, 0.0);
    waves.pitch_acceleration.assign(n, 0.0);
  } else {
    waves = synth_waves(state.hs, state.tp, wave_seed(config, state), config);
  }
  for (std::size_t i = 0; i < n; ++i) force[i] -= rotor.rna_mass * rotor.hub_height * waves.pitch_acceleration[i];

  // Single-mode oscillator y'' + 2 zeta w y' + w^2 y = w^2 F, Newmark average acceleration.
  const double omega = 2.0 * kPi * mode_frequency(tower, rotor, config);
  const double c = 2.0 * sp.damping_ratio * omega;
  const double k = omega * omega;
  const double beta = 0.25, gamma = 0.5;
  const double k_hat = k + gamma / (beta * dt) * c + 1.0 / (beta * dt * dt);
  std::vector<double> y(n);
  double u = force[0], v = 0.0, a = k * force[0] - c * v - k * u;
  y[0] = u;
  for (std::size_t i = 1; i < n; ++i) {
    const double p = k * force[i] + (u / (beta * dt * dt) + v / (beta * dt) + (0.5 / beta - 1.0) * a) +
                     c * (gamma * u / (beta * dt) + (gamma / beta - 1.0) * v + dt * (0.5 * gamma / beta - 1.0) * a);
    const double u1 = p / k_hat;
    const double a1 = (u1 - u) / (beta * dt * dt) - v / (beta * dt) - (0.5 / beta - 1.0) * a;
    v += dt * ((1.0 - gamma) * a + gamma * a1);
    u = u1;
    a = a1;
    y[i] = u;
  }

  // Platform motion.
  rec.platform_pitch.resize(n);
  rec.platform_heave.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double aero = thrust[i] * (rotor.hub_height + sp.aero_moment_arm);
    rec.platform_pitch[i] = (aero + sp.pitch_moment_offset) / sp.pitch_stiffness + waves.pitch[i];
    rec.platform_heave[i] = -sp.excess_mass * kGravity / sp.heave_stiffness +
                            sp.heave_response_ratio * waves.elevation[i];
  }

  // Tower moments: base moment scaled by the lever reduction up the tower.
  const double height = tower.height();
  const double top_lever = rotor.hub_height - sp.tower_base_elevation;
  require(top_lever >= height, ErrorKind::Config, "hub height lies below the tower top");
  const double arm0 = top_lever + sp.aero_moment_arm;
  tower::RnaProperties rna;
  std::vector<double> base(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p_delta = rotor.rna_mass * kGravity * (rna.com_offset[0] + top_lever * rec.platform_pitch[i]);
    base[i] = y[i] * arm0 + p_delta;
  }
  rec.station_heights.resize(static_cast<std::size_t>(config.n_stations));
  rec.fore_aft_moment.resize(rec.station_heights.size());
  for (std::size_t s = 0; s < rec.station_heights.size(); ++s) {
    const double z = height * static_cast<double>(s) / static_cast<double>(config.n_stations - 1);
    rec.station_heights[s] = z;
    const double phi = (top_lever - z + sp.aero_moment_arm) / arm0;
    auto& ch = rec.fore_aft_moment[s];
    ch.resize(n);
    for (std::size_t i = 0; i < n; ++i) ch[i] = phi * base[i];
  }

  rec.mean_thrust = mean_from(thrust, first);
  rec.mean_rotor_moment = rec.mean_thrust * sp.aero_moment_arm;
  rec.mean_rotor_speed = mean_from(rec.rotor_speed, first);
  return rec;
}

void write_response_csv(std::ostream& os, const ResponseRecord& rec) {
  rec.validate();
  os << "time_s,rotor_rpm,pitch_rad,heave_m";
  for (double z : rec.station_heights) os << ",m_fa_" << csv::format(z);
  os << '\n';
  for (std::size_t i = 0; i < rec.time.size(); ++i) {
    os << csv::format(rec.time[i]) << ',' << csv::format(rec.rotor_speed[i]) << ','
       << csv::format(rec.platform_pitch[i]) << ',' << csv::format(rec.platform_heave[i]);
    for (const auto& ch : rec.fore_aft_moment) os << ',' << csv::format(ch[i]);
    os << '\n';
  }
}

ResponseRecord read_response_csv(std::istream& is) {
  const auto table = csv::read(is);
  const auto ct = csv::column(table, "time_s");
  const auto cr = csv::column(table, "rotor_rpm");
  const auto cp = csv::column(table, "pitch_rad");
  const auto ch = csv::column(table, "heave_m");
  ResponseRecord rec;
  std::vector<std::size_t> stations;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const auto& name = table.header[c];
    if (name.rfind("m_fa_", 0) == 0) {
      stations.push_back(c);
      rec.station_heights.push_back(csv::to_double(name.substr(5), "station header"));
    }
  }
  rec.fore_aft_moment.resize(stations.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string ctx = "response row " + std::to_string(r + 1);
    require(row.size() == table.header.size(), ErrorKind::Input, ctx + ": wrong column count");
    rec.time.push_back(csv::to_double(row[ct], ctx));
    rec.rotor_speed.push_back(csv::to_double(row[cr], ctx));
    rec.platform_pitch.push_back(csv::to_double(row[cp], ctx));
    rec.platform_heave.push_back(csv::to_double(row[ch], ctx));
    for (std::size_t s = 0; s < stations.size(); ++s)
      rec.fore_aft_moment[s].push_back(csv::to_double(row[stations[s]], ctx));
  }
  rec.validate();
  return rec;
}

}  // namespace fowt::response
