#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fowt/error.hpp"
#include "fowt/fatigue_analysis.hpp"

using namespace fowt;
using namespace fowt::fatigue;

namespace {

/// Reference four-point counter: scan every window of four consecutive
/// points, extract the first closed inner range, restart from the beginning.
std::map<double, double> brute_force_rainflow(std::vector<double> pts) {
  std::map<double, double> out;
  bool found = true;
  while (found) {
    found = false;
    for (std::size_t i = 0; i + 3 < pts.size(); ++i) {
      const double inner = std::abs(pts[i + 2] - pts[i + 1]);
      if (inner <= std::abs(pts[i + 1] - pts[i]) && inner <= std::abs(pts[i + 3] - pts[i + 2])) {
        out[inner] += 1.0;
        pts.erase(pts.begin() + static_cast<long>(i) + 1, pts.begin() + static_cast<long>(i) + 3);
        found = true;
        break;
      }
    }
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) out[std::abs(pts[i + 1] - pts[i])] += 0.5;
  return out;
}

std::map<double, double> histogram(const CycleSet& cycles) {
  std::map<double, double> out;
  for (const auto& c : cycles) out[c.range] += c.count;
  return out;
}

/// Every alternating sequence of `len` values over {-3..3}.
void alternating_sequences(int len, std::vector<double>& cur, const std::function<void(const std::vector<double>&)>& fn) {
  if (static_cast<int>(cur.size()) == len) {
    fn(cur);
    return;
  }
  for (int v = -3; v <= 3; ++v) {
    const double x = v;
    const std::size_t n = cur.size();
    if (n >= 1 && x == cur[n - 1]) continue;
    if (n >= 2 && (cur[n - 1] - cur[n - 2]) * (x - cur[n - 1]) >= 0) continue;
    cur.push_back(x);
    alternating_sequences(len, cur, fn);
    cur.pop_back();
  }
}

}  // namespace

TEST_SUITE("fatigue_analysis") {
  TEST_CASE("rainflow basic cases") {
    CHECK(rainflow({2.0, 2.0, 2.0}).empty());
    const auto ramp = rainflow({0.0, 2.5, 5.0, 7.5, 10.0});
    REQUIRE(ramp.size() == 1);
    CHECK(ramp[0].range == 10.0);
    CHECK(ramp[0].count == 0.5);
    const auto h = histogram(rainflow({0.0, 5.0, 0.0, 5.0, 0.0}));
    REQUIRE(h.size() == 1);
    CHECK(h.at(5.0) == 2.0);
    const auto c = rainflow({0.0, 5.0, 0.0, 5.0, 0.0});
    CHECK(std::count_if(c.begin(), c.end(), [](const Cycle& x) { return x.count == 1.0; }) == 1);
  }

  TEST_CASE("extrema drop plateaus and interior points") {
    const auto e = extrema({0.0, 1.0, 1.0, 2.0, 2.0, 1.0, 0.5, 3.0});
    CHECK(e == std::vector<double>{0.0, 2.0, 0.5, 3.0});
  }

  TEST_CASE("rainflow matches the brute-force oracle on every short sequence") {
    std::size_t n_checked = 0;
    for (int len = 2; len <= 8; ++len) {
      std::vector<double> cur;
      alternating_sequences(len, cur, [&](const std::vector<double>& seq) {
        const auto cycles = rainflow(seq);
        double halves = 0.0;
        for (const auto& c : cycles) {
          REQUIRE((c.count == 0.5 || c.count == 1.0));
          halves += 2.0 * c.count;
        }
        REQUIRE(halves == static_cast<double>(seq.size() - 1));
        REQUIRE(histogram(cycles) == brute_force_rainflow(seq));
        ++n_checked;
      });
    }
    CHECK(n_checked > 10000);
  }

  TEST_CASE("bending stress range") {
    CHECK(moment_to_stress_range(0.0, 5.0, 0.05) == 0.0);
    const double i = kPi / 4.0 * (std::pow(5.0, 4) - std::pow(4.95, 4));
    CHECK(i == doctest::Approx(19.341).epsilon(1e-4));
    const double s = moment_to_stress_range(10e6, 5.0, 0.05);
    CHECK(s == doctest::Approx(10e6 * 5.0 / i).epsilon(1e-12));
    CHECK(s == doctest::Approx(2.585e6).epsilon(1e-3));
    const double thin = 10e6 / (kPi * 25.0 * 0.05);
    CHECK(std::abs(thin - s) / s < 0.02);
    CHECK_THROWS_AS(moment_to_stress_range(1.0, 1.0, 1.0), Error);
  }

  TEST_CASE("S-N curve E values") {
    const SNCurve curve;
    // 46.77 MPa is the transition stress rounded to four digits: 3 * 0.0035 / 46.77 ~ 2.3e-4.
    CHECK(cycles_to_failure(46.77e6, 0.02, curve) == doctest::Approx(1.0e7).epsilon(5e-4));
    CHECK(cycles_to_failure(93.54e6, 0.02, curve) == doctest::Approx(1.25e6).epsilon(5e-4));
    CHECK_THROWS_AS(cycles_to_failure(0.0, 0.02, curve), Error);
  }

  TEST_CASE("S-N continuity at the transition") {
    const SNCurve curve;
    // Stress range at which segment 1 gives exactly the transition count.
    const double s_t = std::pow(10.0, (curve.log10_a1 - std::log10(curve.n_transition)) / curve.m1);
    const double seg2 = std::pow(10.0, (curve.log10_a2 - std::log10(curve.n_transition)) / curve.m2);
    CHECK(std::abs(s_t - seg2) / s_t <= 1e-9);
    const double below = cycles_to_failure(s_t * 1e6 * (1 + 1e-12), 0.02, curve);
    const double above = cycles_to_failure(s_t * 1e6 * (1 - 1e-12), 0.02, curve);
    CHECK(below == doctest::Approx(1e7).epsilon(1e-9));
    CHECK(above == doctest::Approx(1e7).epsilon(1e-9));
  }

  TEST_CASE("thickness factor scales life by 2^(k m)") {
    SNCurve curve;
    CHECK(thickness_factor(0.02, curve) == 1.0);
    CHECK(thickness_factor(0.05, curve) == doctest::Approx(std::pow(2.0, 0.2)));
    for (double m : {3.0, 5.0}) {
      const auto c = SNCurve::single_slope(12.010, m);
      const double n_ref = cycles_to_failure(80e6, 0.025, c);
      const double n_thick = cycles_to_failure(80e6, 0.05, c);
      CHECK(n_ref / n_thick == doctest::Approx(std::pow(2.0, 0.2 * m)).epsilon(1e-12));
    }
    CHECK(cycles_to_failure(93.54e6, 0.025, curve) / cycles_to_failure(93.54e6, 0.05, curve) ==
          doctest::Approx(1.5157).epsilon(1e-4));
  }

  TEST_CASE("Miner sum and homogeneity") {
    const SNCurve curve = SNCurve::single_slope(12.010, 3.0);
    const double r = 5.0, t = 0.02;
    const double i = kPi / 4.0 * (std::pow(r, 4) - std::pow(r - t, 4));
    // Stress range with N = 1e6 exactly.
    const double s = std::pow(10.0, (12.010 - 6.0) / 3.0) * 1e6;
    const double dm = s * i / r;
    CHECK(damage_from_cycles({{dm, 1.0}}, r, t, curve) == doctest::Approx(1e-6).epsilon(1e-10));
    CHECK(damage_from_cycles({{dm, 2.0}}, r, t, curve) ==
          doctest::Approx(2.0 * damage_from_cycles({{dm, 1.0}}, r, t, curve)).epsilon(1e-14));
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 1e6);
    std::vector<double> m(500);
    for (auto& v : m) v = n(rng);
    std::vector<double> m2 = m;
    for (auto& v : m2) v *= 1.7;
    CHECK(damage_from_moment_series(m2, r, t, curve) ==
          doctest::Approx(std::pow(1.7, 3.0) * damage_from_moment_series(m, r, t, curve)).epsilon(1e-12));
  }

  TEST_CASE("event damage on a synthetic record") {
    tower::TowerGeometry g{{8.0, 8.0, 8.0}, {10.0, 10.0}, {0.03, 0.03}};
    ResponseRecord rec;
    for (int k = 0; k < 11; ++k) rec.time.push_back(k);
    rec.station_heights = {0.0, 20.0};
    rec.fore_aft_moment = {std::vector<double>(11, 1e7), std::vector<double>(11, 0.0)};
    rec.rotor_speed.assign(11, 5.0);
    rec.platform_pitch.assign(11, 0.0);
    rec.platform_heave.assign(11, 0.0);
    const SNCurve curve;
    for (double d : event_damage(rec, g, curve, 0.0)) CHECK(d == 0.0);

    // Base channel alternates; the section midpoints see 3/4 and 1/4 of it.
    for (int k = 0; k < 11; ++k) rec.fore_aft_moment[0][static_cast<std::size_t>(k)] = (k % 2 ? 4e7 : 0.0);
    const auto d = event_damage(rec, g, curve, 2.0);
    const auto r = g.midpoint_radius();
    std::vector<double> trimmed(rec.fore_aft_moment[0].begin() + 2, rec.fore_aft_moment[0].end());
    for (auto& v : trimmed) v *= 0.75;
    CHECK(d[0] == doctest::Approx(damage_from_moment_series(trimmed, r[0], 0.03, curve)).epsilon(1e-12));
    CHECK(d[0] > d[1]);

    tower::TowerGeometry tall{{8.0, 8.0}, {50.0}, {0.03}};  // midpoint above the top station
    CHECK_THROWS_AS(event_damage(rec, tall, curve, 0.0), Error);
  }

  TEST_CASE("lifetime aggregation") {
    const double lt = 25.0 * 365.25 * 86400.0;
    CHECK(lt == 788940000.0);
    env::EnvironmentalState s1;
    s1.id = 1;
    s1.weight = 1.0;
    const auto one = lifetime_damage({{1, {1e-6}}}, {s1}, lt, 600.0, {5.0});
    CHECK(one.damage[0] == doctest::Approx(1.3149).epsilon(1e-4));

    env::EnvironmentalState a = s1, b = s1;
    a.weight = b.weight = 0.5;
    b.id = 2;
    const auto two = lifetime_damage({{1, {1e-6}}, {2, {1e-6}}}, {a, b}, lt, 600.0, {5.0});
    CHECK(two.damage[0] == doctest::Approx(one.damage[0]).epsilon(1e-14));
    CHECK(lifetime_damage({{1, {0.0}}}, {s1}, lt, 600.0, {5.0}).damage[0] == 0.0);
    CHECK_THROWS_AS(lifetime_damage({{3, {1e-6}}}, {s1}, lt, 600.0, {5.0}), Error);
  }

  TEST_CASE("aggregation is order invariant and matches the rate form") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<env::EnvironmentalState> states(40);
    EventDamages ev;
    double wsum = 0.0;
    for (int i = 0; i < 40; ++i) {
      states[static_cast<std::size_t>(i)].id = i + 1;
      states[static_cast<std::size_t>(i)].weight = u(rng);
      wsum += states[static_cast<std::size_t>(i)].weight;
      ev.push_back({i + 1, {u(rng) * 1e-6, u(rng) * 1e-7, u(rng) * 1e-8}});
    }
    for (auto& s : states) s.weight /= wsum;
    const std::vector<double> z{1.0, 2.0, 3.0};
    const auto ref = lifetime_damage(ev, states, kDesignLife, 600.0, z);
    const auto rate = lifetime_damage_rate_form(ev, states, kDesignLife, 600.0, z);
    auto shuffled = ev;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto perm = lifetime_damage(shuffled, states, kDesignLife, 600.0, z);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(rate.damage[j] == doctest::Approx(ref.damage[j]).epsilon(1e-12));
      CHECK(perm.damage[j] == ref.damage[j]);
    }
  }

  TEST_CASE("damage csv round trip") {
    SectionDamageProfile p{{1.5, 4.5}, {0.25, 1.0 / 3.0}};
    std::stringstream ss;
    write_damage_csv(ss, p);
    CHECK(ss.str().rfind("z_mid_m,damage", 0) == 0);
    const auto back = read_damage_csv(ss);
    CHECK(back.section_midpoints == p.section_midpoints);
    CHECK(back.damage == p.damage);
  }
}
