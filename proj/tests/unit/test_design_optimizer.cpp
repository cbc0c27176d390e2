#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fowt/design_optimizer.hpp"
#include "fowt/error.hpp"

using namespace fowt;
using namespace fowt::design;

namespace {

DesignContext context_for(const tower::TowerGeometry& g, const std::vector<double>& damage, double gamma_d) {
  DesignContext ctx;
  ctx.calibration = estimator::calibrate(g, {g.midpoint_z(), damage});
  ctx.constraints.gamma_d = gamma_d;
  ctx.heights = g.h;
  return ctx;
}

std::vector<double> fatigue_entries(const DesignEvaluation& ev, std::size_t n) {
  const auto layout = constraint_layout(n);
  std::vector<double> out;
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (layout[i] == ConstraintClass::fatigue) out.push_back(ev.constraints[i]);
  return out;
}

}  // namespace

TEST_SUITE("design_optimizer") {
  TEST_CASE("constraint layout is frozen") {
    const auto layout = constraint_layout(30);
    CHECK(layout.size() == 30 * 3 + 2 + 30 + 30 + 29 + 60 + 60);
    CHECK(layout.front() == ConstraintClass::stress);
    CHECK(layout[90] == ConstraintClass::frequency);
    CHECK(layout[92] == ConstraintClass::fatigue);
    CHECK(layout.back() == ConstraintClass::taper);
    CHECK(std::is_sorted(layout.begin(), layout.end()));
  }

  TEST_CASE("design vector layout and bounds") {
    const auto g = tower::reference_geometry();
    const auto x = DesignVector::from_geometry(g);
    REQUIRE(x.values.size() == 61);
    CHECK(x.sections() == 30);
    CHECK(x.values[0] == g.d[0]);
    CHECK(x.values[31] == g.t[0]);
    CHECK(x.lower[0] == 6.0);
    CHECK(x.upper[60] == 0.15);
    const auto back = x.to_geometry(g.h);
    CHECK(back.d == g.d);
    CHECK(back.t == g.t);
  }

  TEST_CASE("self-calibrated reference with large damage violates fatigue") {
    const auto g = tower::reference_geometry();
    std::vector<double> d(30, 1.0);
    d[0] = 32.1;
    const auto ev = evaluate(DesignVector::from_geometry(g), context_for(g, d, 1.0));
    const auto f = fatigue_entries(ev, 30);
    CHECK(f[0] == doctest::Approx(31.1).epsilon(1e-9));
    CHECK(ev.fatigue_damage[0] == doctest::Approx(32.1).epsilon(1e-12));
    CHECK(ev.objective == doctest::Approx(tower::tower_mass(g, tower::Material{}).mass));
  }

  TEST_CASE("damage 0.9 with gamma_d 1.11 is marginally active") {
    const auto g = tower::reference_geometry();
    const auto ev = evaluate(DesignVector::from_geometry(g), context_for(g, std::vector<double>(30, 0.9), 1.11));
    for (double v : fatigue_entries(ev, 30)) {
      CHECK(v == doctest::Approx(0.999 - 1.0).epsilon(1e-9));
      CHECK(v <= 0.0);
    }
  }

  TEST_CASE("thicker walls never raise fatigue constraints") {
    const auto g = tower::reference_geometry();
    const auto ctx = context_for(g, std::vector<double>(30, 2.0), 1.0);
    auto x = DesignVector::from_geometry(g);
    const auto base = fatigue_entries(evaluate(x, ctx), 30);
    for (std::size_t i = 31; i < x.values.size(); ++i) x.values[i] *= 1.15;
    const auto thick = fatigue_entries(evaluate(x, ctx), 30);
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(thick[i] <= base[i]);
  }

  TEST_CASE("estimator mismatch is a consistency error") {
    const auto g = tower::reference_geometry();
    auto ctx = context_for(g, std::vector<double>(30, 1.0), 1.0);
    ctx.calibration.c.pop_back();
    CHECK_THROWS_AS(evaluate(DesignVector::from_geometry(g), ctx), Error);
  }

  TEST_CASE("full tower optimization from the reference") {
    const auto g = tower::reference_geometry();
    std::vector<double> d(30);
    for (std::size_t i = 0; i < 30; ++i) d[i] = 3.0 * std::exp(-0.1 * static_cast<double>(i));
    const auto ctx = context_for(g, d, 1.0);
    const auto r = optimize(DesignVector::from_geometry(g), ctx);
    CHECK(r.status == opt::SqpStatus::converged);
    const double ref_mass = tower::tower_mass(g, tower::Material{}).mass;
    CHECK(r.final_eval.objective > ref_mass);
    for (double v : r.final_eval.constraints) CHECK(v <= 10.0 * OptimizerSettings{}.tol);
    const auto last = r.trace.last_violation();
    CHECK(last[static_cast<int>(ConstraintClass::fatigue)] >= 0);
    CHECK(r.trace.entries.size() == static_cast<std::size_t>(r.iterations) + 1);

    // Determinism.
    const auto again = optimize(DesignVector::from_geometry(g), ctx);
    CHECK(again.x_star.values == r.x_star.values);

    std::stringstream csv;
    write_trace_csv(csv, r.trace);
    CHECK(csv.str().rfind("iter,mass_kg,d_max,d_min,feasible", 0) == 0);
  }

  TEST_CASE("already feasible reference loses mass") {
    // The default land band starts at 0.25 Hz, above the reference tower, and the
    // reference d/t peaks at 160.01; widen both so the reference is feasible.
    const auto g = tower::reference_geometry();
    auto ctx = context_for(g, std::vector<double>(30, 0.2), 1.0);
    ctx.constraints.f1_band_land = {0.20, 0.38};
    ctx.constraints.dt_ratio_band = {80.0, 161.0};
    for (double v : evaluate(DesignVector::from_geometry(g), ctx).constraints) REQUIRE(v <= 0.0);
    const auto r = optimize(DesignVector::from_geometry(g), ctx);
    CHECK(r.status == opt::SqpStatus::converged);
    CHECK(r.final_eval.objective <= tower::tower_mass(g, tower::Material{}).mass * (1.0 + 1e-6));
  }

  TEST_CASE("constraint configuration checks") {
    ConstraintConfig c;
    c.gamma_d = 0.9;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.taper_band = {1.0, 0.9};
    CHECK_THROWS_AS(c.validate(), Error);
  }
}
