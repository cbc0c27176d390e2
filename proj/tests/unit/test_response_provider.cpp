#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "fowt/error.hpp"
#include "fowt/response_provider.hpp"
#include "fowt/spectral_analysis.hpp"

using namespace fowt;
using namespace fowt::response;

namespace {

double mean(const std::vector<double>& x, std::size_t first = 0) {
  return std::accumulate(x.begin() + static_cast<long>(first), x.end(), 0.0) / static_cast<double>(x.size() - first);
}

double stddev(const std::vector<double>& x, std::size_t first = 0) {
  const double m = mean(x, first);
  double s = 0.0;
  for (std::size_t i = first; i < x.size(); ++i) s += (x[i] - m) * (x[i] - m);
  return std::sqrt(s / static_cast<double>(x.size() - first));
}

SimulationConfig short_config() {
  SimulationConfig c;
  c.duration = 300.0;
  c.trim = 100.0;
  return c;
}

env::EnvironmentalState state(double u, double sigma_w, double hs, double tp, int seed = 1) {
  env::EnvironmentalState s;
  s.id = 1;
  s.u = u;
  s.sigma_w = sigma_w;
  s.hs = hs;
  s.tp = tp;
  s.seed = seed;
  s.weight = 1.0;
  return s;
}

}  // namespace

TEST_SUITE("response_provider") {
  TEST_CASE("wind series moments and determinism") {
    SimulationConfig c;
    c.duration = 3600.0;
    c.trim = 0.0;
    const auto calm = synth_wind_series(12.5, 0.0, 3, c);
    for (double v : calm) CHECK(v == 12.5);
    const auto w = synth_wind_series(12.5, 2.396, 3, c);
    CHECK(stddev(w) == doctest::Approx(2.396).epsilon(0.05));
    CHECK(mean(w) == doctest::Approx(12.5).epsilon(0.05));
    CHECK(w == synth_wind_series(12.5, 2.396, 3, c));
    CHECK(w != synth_wind_series(12.5, 2.396, 4, c));
  }

  TEST_CASE("wave series significant height and regular peak") {
    SimulationConfig c;
    c.duration = 3600.0;
    c.trim = 0.0;
    const auto calm = synth_wave_force(0.0, 10.0, 2, c);
    for (double v : calm) CHECK(v == 0.0);
    const auto sea = synth_waves(3.0, 10.0, 2, c);
    CHECK(4.0 * stddev(sea.elevation) == doctest::Approx(3.0).epsilon(0.10));
    CHECK(std::abs(mean(sea.force)) < 0.05 * stddev(sea.force));
    CHECK(synth_wave_force(3.0, 10.0, 2, c) == synth_wave_force(3.0, 10.0, 2, c));

    c.surrogate.regular_waves = true;
    const auto reg = synth_wave_force(2.0, 8.0, 2, c);
    const auto psd = spectral::welch_psd(reg, 1.0 / c.dt, 4096);
    CHECK(spectral::peak_frequency(psd) == doctest::Approx(1.0 / 8.0).epsilon(psd.resolution() * 8.0));
  }

  TEST_CASE("steady thrust law") {
    const RotorModel rotor;
    const double area = kPi * 142.0 * 142.0;
    for (double u : {5.0, 9.0, 15.0, 22.0}) {
      const double ct = u <= rotor.rated_speed ? 0.8 : 0.8 * std::pow(rotor.rated_speed / u, 2);
      const double oracle = 0.5 * 1.225 * ct * area * u * u;
      const auto rec = simulate_response(state(u, 0, 0, 0), tower::reference_geometry(), rotor, short_config(), true);
      CHECK(rec.mean_thrust == doctest::Approx(oracle).epsilon(1e-12));
    }
    CHECK(rotor.rotor_speed(3.0) == doctest::Approx(rotor.min_rpm));
    CHECK(rotor.rotor_speed(7.0) == doctest::Approx(rotor.min_rpm + (rotor.max_rpm - rotor.min_rpm) * 0.5));
    CHECK(rotor.rotor_speed(20.0) == doctest::Approx(rotor.max_rpm));
  }

  TEST_CASE("idle steady run is a constant gravity offset") {
    auto c = short_config();
    c.surrogate.pitch_moment_offset = 5e8;
    const auto rec = simulate_response(state(0.0, 0, 0, 0), tower::reference_geometry(), RotorModel{}, c, true);
    const double m0 = rec.fore_aft_moment[0][0];
    CHECK(m0 != 0.0);
    for (double v : rec.fore_aft_moment[0]) CHECK(v == doctest::Approx(m0).epsilon(1e-12));
  }

  TEST_CASE("out of range states are rejected") {
    try {
      simulate_response(state(30.0, 1, 1, 8), tower::reference_geometry(), RotorModel{}, short_config());
      FAIL("expected a rejected state");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::RejectedState);
    }
  }

  TEST_CASE("records are deterministic and consistent") {
    const auto s = state(12.0, 2.0, 2.5, 9.0);
    const auto g = tower::reference_geometry();
    const auto a = simulate_response(s, g, RotorModel{}, short_config());
    const auto b = simulate_response(s, g, RotorModel{}, short_config());
    CHECK(a.fore_aft_moment == b.fore_aft_moment);
    CHECK(a.platform_pitch == b.platform_pitch);
    CHECK_NOTHROW(a.validate());
    CHECK(std::is_sorted(a.station_heights.begin(), a.station_heights.end()));
    CHECK(a.station_heights.back() == doctest::Approx(g.height()));
    for (std::size_t i = 0; i < a.samples(); i += 37)
      for (std::size_t st = 1; st < a.station_heights.size(); ++st)
        CHECK(std::abs(a.fore_aft_moment[st][i]) <= std::abs(a.fore_aft_moment[st - 1][i]));
    for (double rpm : a.rotor_speed) {
      CHECK(rpm >= RotorModel{}.min_rpm);
      CHECK(rpm <= RotorModel{}.max_rpm);
    }
  }

  TEST_CASE("mean base moment grows with wind speed below rated") {
    const auto g = tower::reference_geometry();
    const auto c = short_config();
    const std::size_t first = static_cast<std::size_t>(c.trim / c.dt);
    double last = -1e300;
    for (double u : {4.0, 6.0, 8.0, 10.0}) {
      const auto rec = simulate_response(state(u, 0.0, 2.0, 9.0), g, RotorModel{}, c);
      const double m = mean(rec.fore_aft_moment[0], first);
      CHECK(m > last);
      last = m;
    }
  }

  TEST_CASE("dynamic moment variance grows with turbulence") {
    const auto g = tower::reference_geometry();
    const auto c = short_config();
    const std::size_t first = static_cast<std::size_t>(c.trim / c.dt);
    double last = 0.0;
    for (double sw : {0.5, 1.5, 3.0}) {
      const auto rec = simulate_response(state(15.0, sw, 0.0, 9.0), g, RotorModel{}, c);
      const double s = stddev(rec.fore_aft_moment[0], first);
      CHECK(s > last);
      last = s;
    }
  }

  TEST_CASE("response csv round trip") {
    auto c = short_config();
    c.duration = 120.0;
    c.trim = 20.0;
    c.n_stations = 3;
    const auto rec = simulate_response(state(10.0, 1.0, 1.5, 8.0), tower::reference_geometry(), RotorModel{}, c);
    std::stringstream ss;
    write_response_csv(ss, rec);
    CHECK(ss.str().rfind("time_s,rotor_rpm,pitch_rad,heave_m,m_fa_0,", 0) == 0);
    const auto back = read_response_csv(ss);
    CHECK(back.time == rec.time);
    CHECK(back.station_heights == rec.station_heights);
    CHECK(back.fore_aft_moment == rec.fore_aft_moment);
  }

  TEST_CASE("configuration checks") {
    SimulationConfig c;
    c.trim = c.duration;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.dt = 0.3;  // 1000 / 0.3 is not an integer count
    CHECK_THROWS_AS(c.validate(), Error);
    RotorModel r;
    r.rated_speed = 2.0;
    CHECK_THROWS_AS(r.validate(), Error);
  }
}
