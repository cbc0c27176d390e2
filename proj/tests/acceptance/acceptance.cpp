#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fowt/config.hpp"
#include "fowt/design_optimizer.hpp"
#include "fowt/env_sampler.hpp"
#include "fowt/error.hpp"
#include "fowt/fatigue_analysis.hpp"
#include "fowt/fatigue_estimator.hpp"
#include "fowt/platform_calibration.hpp"
#include "fowt/spectral_analysis.hpp"
#include "fowt/sqp.hpp"
#include "fowt/tower_model.hpp"
#include "fowt/workflow.hpp"

using namespace fowt;

namespace {

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

void report(int n, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("criterion %2d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

/// Runs one criterion; an exception counts as a failure and is reported.
void run(int n, const std::function<void(int)>& body) {
  try {
    body(n);
  } catch (const std::exception& e) {
    report(n, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// ---- criterion 1

void sampling(int n) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto states = env::sample_states(env::SamplingPlan{});
  const double dt = seconds_since(t0);
  double w = 0.0;
  for (const auto& s : states) w += s.weight;
  const auto centers = env::wind_bin_centers(states);
  bool grid = centers.size() == 22;
  for (std::size_t i = 0; grid && i < centers.size(); ++i)
    grid = std::abs(centers[i] - (3.5 + static_cast<double>(i))) < 1e-12;
  const bool ok = states.size() == 6468 && std::abs(w - 1.0) <= 1e-12 && grid && dt < 1.0;
  report(n, ok, fmt("%.0f states, |sum w - 1| = %.1e, %.3f s; ", static_cast<double>(states.size()), std::abs(w - 1.0), dt) +
                    "wind centers 3.5..24.5 step 1: " + (grid ? "yes" : "no"));
}

// ---- criteria 2 to 4

void masses(int n) {
  const tower::Material steel;
  const double ref = tower::tower_mass(tower::reference_geometry(), steel).mass;
  const double opt = tower::tower_mass(tower::optimized_geometry(), steel).mass;
  const bool ok = rel(ref, 1.574e6) <= 0.02 && rel(opt, 2.656e6) <= 0.02;
  report(n, ok, fmt("reference %.1f t (1574 t), optimized %.1f t (2656 t), tolerance 2%%", ref / 1e3, opt / 1e3));
}

void ratios(int n) {
  auto min_dt = [](const tower::TowerGeometry& g) {
    const auto r = tower::geometric_ratios(g).d_over_t;
    return *std::min_element(r.begin(), r.end());
  };
  const double ref = min_dt(tower::reference_geometry());
  const double opt = min_dt(tower::optimized_geometry());
  const bool ok = std::abs(ref - 150.8) <= 0.5 && std::abs(opt - 101.5) <= 0.5;
  report(n, ok, fmt("min D/t reference %.2f (150.8 +- 0.5), optimized %.2f (101.5 +- 0.5)", ref, opt));
}

void frequency(int n) {
  const tower::RnaProperties rna;
  const auto f = tower::first_natural_frequency(tower::reference_geometry(), tower::Material{}, rna);
  const bool land = rel(f.f1_land, 0.214) <= 0.15;
  const bool floating = rel(f.f1_floating, f.f1_land * 1.57) <= 1e-12 && rel(f.f1_floating, 0.336) <= 0.15;
  report(n, land && floating,
         fmt("RNA %.3f t: f1_land %.4f Hz (0.214 +- 15%%), f1_floating %.4f Hz (0.336 +- 15%%)", rna.mass / 1e3,
             f.f1_land, f.f1_floating));
}

// ---- criterion 5

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

void alternating(int len, std::vector<double>& cur, const std::function<void(const std::vector<double>&)>& fn) {
  if (static_cast<int>(cur.size()) == len) {
    fn(cur);
    return;
  }
  for (int v = -3; v <= 3; ++v) {
    const double x = v;
    const std::size_t k = cur.size();
    if (k >= 1 && x == cur[k - 1]) continue;
    if (k >= 2 && (cur[k - 1] - cur[k - 2]) * (x - cur[k - 1]) >= 0) continue;
    cur.push_back(x);
    alternating(len, cur, fn);
    cur.pop_back();
  }
}

void rainflow_oracle(int n) {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t checked = 0, mismatched = 0;
  for (int len = 2; len <= 8; ++len) {
    std::vector<double> cur;
    alternating(len, cur, [&](const std::vector<double>& seq) {
      std::map<double, double> h;
      for (const auto& c : fatigue::rainflow(seq)) h[c.range] += c.count;
      if (h != brute_force_rainflow(seq)) ++mismatched;
      ++checked;
    });
  }
  const double dt = seconds_since(t0);
  report(n, mismatched == 0 && dt < 30.0,
         fmt("%.0f sequences of length 2..8 over 7 levels, %.0f mismatches, %.2f s", static_cast<double>(checked),
             static_cast<double>(mismatched), dt));
}

// ---- criterion 6

void sn_curve(int n) {
  const fatigue::SNCurve curve;
  const double s1 = std::pow(10.0, (curve.log10_a1 - std::log10(curve.n_transition)) / curve.m1);
  const double s2 = std::pow(10.0, (curve.log10_a2 - std::log10(curve.n_transition)) / curve.m2);
  const double lo = fatigue::cycles_to_failure(s1 * 1e6 * (1 + 1e-12), 0.02, curve);
  const double hi = fatigue::cycles_to_failure(s1 * 1e6 * (1 - 1e-12), 0.02, curve);
  const double cont = std::max({rel(s1, s2), rel(lo, 1e7), rel(hi, 1e7)});
  double scale_err = 0.0;
  for (double m : {3.0, 5.0}) {
    const auto c = fatigue::SNCurve::single_slope(12.010, m, 0.2, 0.025);
    const double ratio = fatigue::cycles_to_failure(80e6, 0.025, c) / fatigue::cycles_to_failure(80e6, 0.05, c);
    scale_err = std::max(scale_err, rel(ratio, std::pow(2.0, 0.2 * m)));
  }
  report(n, cont <= 1e-9 && scale_err <= 1e-12,
         fmt("continuity at 1e7 cycles %.1e relative; thickness scaling 2^(0.2 m), m = 3, 5: %.1e", cont, scale_err));
}

// ---- criteria 7 to 9

void estimator_exactness(int n) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> load(0.0, 2e7);
  std::vector<double> moment(2000);
  for (auto& v : moment) v = load(rng);
  std::uniform_real_distribution<double> scale(0.7, 1.8);
  double worst = 0.0;
  int trials = 0;
  for (double m : {3.0, 5.0}) {
    const auto curve = fatigue::SNCurve::single_slope(12.010, m, 0.2, 0.025);
    auto full = [&](const tower::TowerGeometry& g) {
      return fatigue::damage_from_moment_series(moment, g.midpoint_radius()[0], g.t[0], curve);
    };
    const tower::TowerGeometry g{{8.0, 8.0}, {10.0}, {0.04}};
    const auto cal = estimator::calibrate(g, {{5.0}, {full(g)}}, m, 0.2, 0.025);
    for (int k = 0; k < 20; ++k, ++trials) {
      const double s = scale(rng);
      const tower::TowerGeometry scaled{{8.0 * s, 8.0 * s}, {10.0}, {0.04 * s}};
      worst = std::max(worst, rel(estimator::predict(cal, scaled).damage[0], full(scaled)));
    }
  }
  report(n, worst <= 1e-9, fmt("%.0f rescalings, slopes 3 and 5, worst relative error %.1e", trials, worst));
}

void estimator_round_trip(int n) {
  double worst = 0.0;
  for (const auto& g : {tower::reference_geometry(), tower::optimized_geometry()}) {
    fatigue::SectionDamageProfile d{g.midpoint_z(), {}};
    for (std::size_t i = 0; i < g.sections(); ++i) d.damage.push_back(3.1e-2 * (1.0 + 0.37 * static_cast<double>(i)));
    const auto back = estimator::predict(estimator::calibrate(g, d), g);
    for (std::size_t i = 0; i < d.damage.size(); ++i) worst = std::max(worst, rel(back.damage[i], d.damage[i]));
  }
  report(n, worst <= 1e-12, fmt("predict(calibrate(D)) on both bundled towers, worst relative error %.1e", worst));
}

void weight_equivalence(int n) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<env::EnvironmentalState> states(60);
    fatigue::EventDamages events;
    double wsum = 0.0;
    for (int i = 0; i < 60; ++i) {
      auto& s = states[static_cast<std::size_t>(i)];
      s.id = i + 1;
      s.weight = u(rng);
      wsum += s.weight;
      events.push_back({i + 1, {u(rng) * 1e-6, u(rng) * 1e-7, u(rng) * 1e-8}});
    }
    for (auto& s : states) s.weight /= wsum;
    const std::vector<double> z{1.0, 2.0, 3.0};
    const auto a = fatigue::lifetime_damage(events, states, fatigue::kDesignLife, 600.0, z);
    const auto b = fatigue::lifetime_damage_rate_form(events, states, fatigue::kDesignLife, 600.0, z);
    for (std::size_t j = 0; j < z.size(); ++j) worst = std::max(worst, rel(b.damage[j], a.damage[j]));
  }
  report(n, worst <= 1e-12,
         fmt("weighted event sum vs damage-rate form, 10 random sets, worst relative error %.1e", worst));
}

// ---- criteria 10 and 11

void welch(int n) {
  const double fs = 20.0;
  std::vector<double> x(4096 * 60);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * kPi * 0.35 * static_cast<double>(i) / fs);
  const auto psd = spectral::welch_psd(x, fs, 4096);
  const double peak = spectral::peak_frequency(psd);
  const double sine_var = spectral::integrate_psd(psd);

  std::mt19937_64 rng(42);
  std::normal_distribution<double> noise(0.0, 2.0);
  std::vector<double> w(256 * 64);
  double mean = 0.0;
  for (auto& v : w) mean += (v = noise(rng));
  mean /= static_cast<double>(w.size());
  double var = 0.0;
  for (double v : w) var += (v - mean) * (v - mean);
  var /= static_cast<double>(w.size());
  const double noise_var = spectral::integrate_psd(spectral::welch_psd(w, 4.0, 256));

  const bool ok = std::abs(peak - 0.35) <= psd.resolution() && rel(sine_var, 0.5) <= 0.05 && rel(noise_var, var) <= 0.05;
  report(n, ok, fmt("sine peak %.4f Hz (bin %.4f Hz), variance %.4f (0.5); ", peak, psd.resolution(), sine_var) +
                    fmt("white noise PSD area %.3f vs variance %.3f", noise_var, var));
}

void harmonics(int n) {
  const auto h = spectral::rotor_harmonics(7.061);
  const bool ok = std::abs(h.f_3p - 0.353) <= 1e-3 && std::abs(h.f_3p - 0.35) <= 0.01;
  report(n, ok, fmt("rpm 7.061: f_1p %.5f Hz, f_3p %.5f Hz (0.353, band 0.35 +- 0.01)", h.f_1p, h.f_3p));
}

// ---- criterion 12

void pitch_calibration(int n) {
  platform::PlatformModel p;
  p.initial_platform_mass = 3e7;
  bool closure = true, mass = true, exact = true, upwind = true;
  for (double sf : {1.0, 1.25}) {
    for (double m : {-4.2e8, -1e7, 3.3e7, 6.1e8}) {
      const auto r = platform::pitch_ballast(m, p, sf);
      // Independent lever arms: upwind column at L, the two aft columns at L cos(60 deg).
      const bool up = r.target_columns == platform::TargetColumns::upwind;
      const double lever = up ? p.column_distance_L : p.column_distance_L * std::cos(kPi / 3.0);
      const double water = (up ? 1.0 : -1.0) * r.n_columns * r.water_mass_per_column * kGravity * lever;
      closure = closure && std::abs(water + m) <= 1e-9 * std::abs(m);
      exact = exact && r.ballast_moment == -m;
      mass = mass && rel(r.adjusted_platform_mass + r.n_columns * r.water_mass_per_column * sf, p.initial_platform_mass) <= 1e-15;
      if (m < 0.0) upwind = upwind && up && r.n_columns == 1;
    }
  }
  report(n, closure && mass && exact && upwind,
         std::string("moment closure ") + (closure && exact ? "ok" : "broken") + ", mass conservation " +
             (mass ? "ok" : "broken") + ", M_struct < 0 targets the upwind column " + (upwind ? "ok" : "broken"));
}

// ---- criterion 13

void optimizer_units(int n) {
  opt::EvalFn quad = [](const std::vector<double>& x) { return opt::Evaluation{x[0] * x[0], {1.0 - x[0]}}; };
  const auto a = opt::minimize(quad, {4.0}, {0.0}, {5.0});
  opt::EvalFn kkt = [](const std::vector<double>& x) {
    return opt::Evaluation{(x[0] - 2) * (x[0] - 2) + (x[1] - 1) * (x[1] - 1), {x[0] + x[1] - 2.0}};
  };
  const auto b = opt::minimize(kkt, {0.0, 0.0}, {-5.0, -5.0}, {5.0, 5.0});
  const double ea = std::abs(a.x[0] - 1.0);
  const double eb = std::max(std::abs(b.x[0] - 1.5), std::abs(b.x[1] - 0.5));
  const bool ok = a.status == opt::SqpStatus::converged && b.status == opt::SqpStatus::converged && ea <= 1e-4 &&
                  eb <= 1e-4 && a.iterations < 50 && b.iterations < 50;
  report(n, ok, fmt("bound-active quadratic err %.1e in %.0f iterations; 2-D KKT err %.1e in %.0f iterations", ea,
                    a.iterations, eb, b.iterations));
}

// ---- criterion 14

void desk_pipeline(int n) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = workflow::run_pipeline(workflow::desk_scale_config());
  const double dt = seconds_since(t0);
  const auto* last = result.final_cycle();
  if (last == nullptr) {
    report(n, false, "pipeline produced no cycle");
    return;
  }
  const auto lv = last->optimization.trace.last_violation();
  const int fatigue_last = lv[static_cast<std::size_t>(design::ConstraintClass::fatigue)];
  const bool fatigue_governs = fatigue_last >= 0 && fatigue_last == *std::max_element(lv.begin(), lv.end());
  const auto& r = last->report;
  const bool ok = result.states.size() == 90 && dt < 600.0 && r.max_damage <= 1.0 && r.mean_abs_error < 0.10 &&
                  fatigue_governs;
  report(n, ok,
         fmt("90 states, %.0f cycles, %.1f s; max D %.3f, mean |err| %.3f", static_cast<double>(result.cycles.size()),
             dt, r.max_damage, r.mean_abs_error) +
             ", fatigue last violated: " + (fatigue_governs ? "yes" : "no"));
}

}  // namespace

int main() {
  run(1, sampling);
  run(2, masses);
  run(3, ratios);
  run(4, frequency);
  run(5, rainflow_oracle);
  run(6, sn_curve);
  run(7, estimator_exactness);
  run(8, estimator_round_trip);
  run(9, weight_equivalence);
  run(10, welch);
  run(11, harmonics);
  run(12, pitch_calibration);
  run(13, optimizer_units);
  run(14, desk_pipeline);
  std::printf(
      "criterion 15: N/A   absolute damage magnitudes, estimator error level, iteration counts and cost figures\n"
      "              depend on aeroelastic loads and an external cost model; the property checks above replace them\n");
  std::printf("%d of 14 checked criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
