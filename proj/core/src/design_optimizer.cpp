#include "fowt/design_optimizer.hpp"

#include <algorithm>
#include <ostream>

#include "fowt/csv.hpp"
#include "fowt/error.hpp"
#include "json.hpp"

namespace fowt::design {

DesignVector DesignVector::from_geometry(const tower::TowerGeometry& g, const DesignBounds& b) {
  g.validate();
  DesignVector x;
  for (double d : g.d) {
    x.values.push_back(std::clamp(d, b.d_min, b.d_max));
    x.lower.push_back(b.d_min);
    x.upper.push_back(b.d_max);
  }
  for (double t : g.t) {
    x.values.push_back(std::clamp(t, b.t_min, b.t_max));
    x.lower.push_back(b.t_min);
    x.upper.push_back(b.t_max);
  }
  return x;
}

tower::TowerGeometry DesignVector::to_geometry(const std::vector<double>& heights) const {
  require(values.size() % 2 == 1 && values.size() >= 3, ErrorKind::Consistency,
          "design vector length must be 2n+1");
  const std::size_t n = sections();
  require(heights.size() == n, ErrorKind::Consistency, "design vector and section heights disagree");
  tower::TowerGeometry g;
  g.d.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n + 1));
  g.t.assign(values.begin() + static_cast<std::ptrdiff_t>(n + 1), values.end());
  g.h = heights;
  g.validate();
  return g;
}

void ConstraintConfig::validate() const {
  require(gamma_f >= 1.0 && gamma_m >= 1.0 && gamma_n >= 1.0 && gamma_d >= 1.0, ErrorKind::Config,
          "partial safety factors must be >= 1");
  require(f1_band_land.lo > 0.0 && f1_band_land.hi > f1_band_land.lo, ErrorKind::Config,
          "frequency band must be nonempty");
  require(dt_ratio_band.lo > 0.0 && dt_ratio_band.hi > dt_ratio_band.lo, ErrorKind::Config,
          "d/t band must be nonempty");
  require(taper_band.lo > 0.0 && taper_band.hi >= taper_band.lo, ErrorKind::Config,
          "taper band must be nonempty");
  require(fatigue_limit > 0.0, ErrorKind::Config, "fatigue limit must be positive");
}

const char* to_string(ConstraintClass c) {
  switch (c) {
    case ConstraintClass::stress: return "stress";
    case ConstraintClass::shell_buckling: return "shell_buckling";
    case ConstraintClass::global_buckling: return "global_buckling";
    case ConstraintClass::frequency: return "frequency";
    case ConstraintClass::fatigue: return "fatigue";
    case ConstraintClass::monotone_diameter: return "monotone_diameter";
    case ConstraintClass::monotone_thickness: return "monotone_thickness";
    case ConstraintClass::dt_ratio: return "dt_ratio";
    case ConstraintClass::taper: return "taper";
  }
  return "unknown";
}

std::vector<ConstraintClass> constraint_layout(std::size_t n) {
  std::vector<ConstraintClass> out;
  auto add = [&](ConstraintClass c, std::size_t count) { out.insert(out.end(), count, c); };
  add(ConstraintClass::stress, n);
  add(ConstraintClass::shell_buckling, n);
  add(ConstraintClass::global_buckling, n);
  add(ConstraintClass::frequency, 2);
  add(ConstraintClass::fatigue, n);
  add(ConstraintClass::monotone_diameter, n);
  add(ConstraintClass::monotone_thickness, n - 1);
  add(ConstraintClass::dt_ratio, 2 * n);
  add(ConstraintClass::taper, 2 * n);
  return out;
}

DesignEvaluation evaluate(const DesignVector& x, const DesignContext& ctx) {
  const auto g = x.to_geometry(ctx.heights);
  const std::size_t n = g.sections();
  const auto& cc = ctx.constraints;

  DesignEvaluation ev;
  ev.objective = tower::tower_mass(g, ctx.material, ctx.structural.cost_rate).mass;
  const auto stress = tower::stress_profile(g, ctx.material, ctx.rna, ctx.loads);
  const auto buck = tower::buckling_utilization(g, ctx.material, stress, ctx.structural.buckling);
  const auto freq = tower::first_natural_frequency(g, ctx.material, ctx.rna, ctx.structural.frequency);
  const auto ratios = tower::geometric_ratios(g);
  const auto damage = estimator::predict(ctx.calibration, g);
  ev.fatigue_damage = damage.damage;

  auto& c = ev.constraints;
  c.reserve(constraint_layout(n).size());
  const double gamma = cc.gamma_f * cc.gamma_m * cc.gamma_n;
  for (double s : stress.von_mises) c.push_back(gamma * s / ctx.material.yield_strength - 1.0);
  for (double u : buck.shell) c.push_back(u - 1.0);
  for (double u : buck.global) c.push_back(u - 1.0);
  c.push_back(1.0 - freq.f1_land / cc.f1_band_land.lo);
  c.push_back(freq.f1_land / cc.f1_band_land.hi - 1.0);
  for (double d : damage.damage) c.push_back(d * cc.gamma_d / cc.fatigue_limit - 1.0);
  for (std::size_t i = 1; i <= n; ++i) c.push_back((g.d[i] - g.d[i - 1]) / g.d[i - 1]);
  for (std::size_t i = 1; i < n; ++i) c.push_back((g.t[i] - g.t[i - 1]) / g.t[i - 1]);
  for (double r : ratios.d_over_t) c.push_back(1.0 - r / cc.dt_ratio_band.lo);
  for (double r : ratios.d_over_t) c.push_back(r / cc.dt_ratio_band.hi - 1.0);
  for (double r : ratios.taper) c.push_back(1.0 - r / cc.taper_band.lo);
  for (double r : ratios.taper) c.push_back(r / cc.taper_band.hi - 1.0);
  return ev;
}

std::vector<int> OptimizationTrace::last_violation() const {
  std::vector<int> last(kConstraintClassCount, -1);
  for (std::size_t e = 0; e < entries.size(); ++e)
    for (int k = 0; k < kConstraintClassCount; ++k)
      if (!entries[e].class_satisfied[static_cast<std::size_t>(k)]) last[static_cast<std::size_t>(k)] = static_cast<int>(e);
  return last;
}

OptimizationResult optimize(const DesignVector& x0, const DesignContext& ctx,
                            const OptimizerSettings& settings) {
  ctx.constraints.validate();
  const std::size_t n = x0.sections();
  require(ctx.calibration.c.size() == n, ErrorKind::Consistency,
          "estimator calibration has " + std::to_string(ctx.calibration.c.size()) +
              " sections, design has " + std::to_string(n));
  const auto layout = constraint_layout(n);

  auto as_design = [&](const std::vector<double>& v) {
    DesignVector x = x0;
    x.values = v;
    return x;
  };
  const opt::EvalFn fn = [&](const std::vector<double>& v) {
    const auto ev = evaluate(as_design(v), ctx);
    return opt::Evaluation{ev.objective, ev.constraints};
  };

  OptimizationResult res;
  auto record = [&](const opt::SqpIterate& it) {
    const auto ev = evaluate(as_design(it.x), ctx);
    TraceEntry e;
    e.iter = it.iter;
    e.mass = ev.objective;
    e.damage_max = *std::max_element(ev.fatigue_damage.begin(), ev.fatigue_damage.end());
    e.damage_min = *std::min_element(ev.fatigue_damage.begin(), ev.fatigue_damage.end());
    e.class_satisfied.assign(kConstraintClassCount, true);
    e.feasible = true;
    for (std::size_t j = 0; j < layout.size(); ++j) {
      if (ev.constraints[j] > settings.tol) {
        e.class_satisfied[static_cast<std::size_t>(layout[j])] = false;
        e.feasible = false;
      }
    }
    e.design = it.x;
    res.trace.entries.push_back(std::move(e));
  };

  opt::SqpSettings s;
  s.fd_step = settings.fd_step;
  s.tol = settings.tol;
  s.max_iter = settings.max_iter;
  s.jobs = settings.jobs;
  const auto sqp = opt::minimize(fn, x0.values, x0.lower, x0.upper, s, record);

  res.x_star = as_design(sqp.x);
  res.geometry = res.x_star.to_geometry(ctx.heights);
  res.status = sqp.status;
  res.iterations = sqp.iterations;
  res.violated = sqp.violated;
  res.final_eval = evaluate(res.x_star, ctx);
  return res;
}

void write_trace_csv(std::ostream& os, const OptimizationTrace& trace) {
  os << "iter,mass_kg,d_max,d_min,feasible\n";
  for (const auto& e : trace.entries)
    os << e.iter << ',' << csv::format(e.mass) << ',' << csv::format(e.damage_max) << ','
       << csv::format(e.damage_min) << ',' << (e.feasible ? 1 : 0) << '\n';
}

void write_trace_json(std::ostream& os, const OptimizationTrace& trace) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : trace.entries) {
    nlohmann::json flags;
    for (int k = 0; k < kConstraintClassCount; ++k)
      flags[to_string(static_cast<ConstraintClass>(k))] = static_cast<bool>(e.class_satisfied[static_cast<std::size_t>(k)]);
    j.push_back({{"iter", e.iter},
                 {"mass_kg", e.mass},
                 {"damage_max", e.damage_max},
                 {"damage_min", e.damage_min},
                 {"feasible", e.feasible},
                 {"satisfied", flags},
                 {"x", e.design}});
  }
  os << j.dump(2) << '\n';
}

}  // namespace fowt::design
