#include "fowt/fatigue_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "fowt/csv.hpp"
#include "fowt/error.hpp"

namespace fowt::fatigue {

SNCurve SNCurve::single_slope(double log10_a, double m, double k, double t_ref) {
  SNCurve c;
  c.log10_a1 = c.log10_a2 = log10_a;
  c.m1 = c.m2 = m;
  c.n_transition = std::numeric_limits<double>::infinity();
  c.thickness_exponent_k = k;
  c.t_ref = t_ref;
  return c;
}

void SNCurve::validate() const {
  require(m1 > 0.0 && m2 > 0.0, ErrorKind::Config, "S-N slopes must be positive");
  require(t_ref > 0.0 && thickness_exponent_k >= 0.0, ErrorKind::Config,
          "S-N thickness correction needs t_ref > 0 and k >= 0");
  require(n_transition > 0.0, ErrorKind::Config, "S-N transition must be positive");
  if (is_single_slope()) return;
  require(m1 < m2, ErrorKind::Config, "S-N curve needs m1 < m2");
  const double ls1 = (log10_a1 - std::log10(n_transition)) / m1;
  const double ls2 = (log10_a2 - std::log10(n_transition)) / m2;
  require(std::abs(ls1 - ls2) <= 1e-9 * std::max(1.0, std::abs(ls1)), ErrorKind::Config,
          "S-N segments do not meet at the transition cycle count");
}

std::vector<double> extrema(const std::vector<double>& series) {
  std::vector<double> dedup;
  dedup.reserve(series.size());
  for (double v : series) {
    require(std::isfinite(v), ErrorKind::Input, "rainflow series contains non-finite values");
    if (dedup.empty() || v != dedup.back()) dedup.push_back(v);
  }
  if (dedup.size() <= 2) return dedup;
  std::vector<double> out;
  out.push_back(dedup.front());
  for (std::size_t i = 1; i + 1 < dedup.size(); ++i) {
    const double a = dedup[i] - dedup[i - 1];
    const double b = dedup[i + 1] - dedup[i];
    if ((a > 0.0) != (b > 0.0)) out.push_back(dedup[i]);
  }
  out.push_back(dedup.back());
  return out;
}

CycleSet rainflow(const std::vector<double>& series) {
  const auto points = extrema(series);
  CycleSet cycles;
  if (points.size() < 2) return cycles;
  std::vector<double> stack;
  stack.reserve(points.size());
  for (double p : points) {
    stack.push_back(p);
    while (stack.size() >= 4) {
      const std::size_t n = stack.size();
      const double a = stack[n - 4], b = stack[n - 3], c = stack[n - 2], d = stack[n - 1];
      const double inner = std::abs(b - c);
      if (inner <= std::abs(a - b) && inner <= std::abs(c - d)) {
        cycles.push_back({inner, 1.0});
        stack.erase(stack.end() - 3, stack.end() - 1);
      } else {
        break;
      }
    }
  }
  for (std::size_t i = 0; i + 1 < stack.size(); ++i)
    cycles.push_back({std::abs(stack[i + 1] - stack[i]), 0.5});
  return cycles;
}

double moment_to_stress_range(double delta_m, double r, double t) {
  require(t > 0.0 && t < r, ErrorKind::Geometry, "stress range needs 0 < t < r");
  const double ri = r - t;
  const double i = 0.25 * kPi * (std::pow(r, 4) - std::pow(ri, 4));
  return delta_m * r / i;
}

double thickness_factor(double t, const SNCurve& curve) {
  return t > curve.t_ref ? std::pow(t / curve.t_ref, curve.thickness_exponent_k) : 1.0;
}

double cycles_to_failure(double delta_sigma, double t, const SNCurve& curve) {
  require(delta_sigma > 0.0, ErrorKind::Domain, "cycles_to_failure needs a positive stress range");
  const double log_s = std::log10(delta_sigma * 1e-6 * thickness_factor(t, curve));
  const double log_n1 = curve.log10_a1 - curve.m1 * log_s;
  if (std::pow(10.0, log_n1) <= curve.n_transition) return std::pow(10.0, log_n1);
  return std::pow(10.0, curve.log10_a2 - curve.m2 * log_s);
}

double damage_from_cycles(const CycleSet& cycles, double r, double t, const SNCurve& curve) {
  double d = 0.0;
  for (const auto& c : cycles) {
    if (c.range <= 0.0) continue;
    d += c.count / cycles_to_failure(moment_to_stress_range(c.range, r, t), t, curve);
  }
  return d;
}

double damage_from_moment_series(const std::vector<double>& moment, double r, double t,
                                 const SNCurve& curve) {
  return damage_from_cycles(rainflow(moment), r, t, curve);
}

std::vector<double> interpolate_moment(const ResponseRecord& record, double z) {
  const auto& zs = record.station_heights;
  require(!zs.empty(), ErrorKind::Interpolation, "record has no stations");
  const double tol = 1e-9 * std::max(1.0, std::abs(zs.back()));
  require(z >= zs.front() - tol && z <= zs.back() + tol, ErrorKind::Interpolation,
          "height " + csv::format(z) + " outside station span [" + csv::format(zs.front()) + ", " +
              csv::format(zs.back()) + "]");
  if (zs.size() == 1) return record.fore_aft_moment[0];
  auto it = std::upper_bound(zs.begin(), zs.end(), z);
  std::size_t hi = static_cast<std::size_t>(it - zs.begin());
  hi = std::clamp<std::size_t>(hi, 1, zs.size() - 1);
  const std::size_t lo = hi - 1;
  const double w = std::clamp((z - zs[lo]) / (zs[hi] - zs[lo]), 0.0, 1.0);
  const auto& a = record.fore_aft_moment[lo];
  const auto& b = record.fore_aft_moment[hi];
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = (1.0 - w) * a[k] + w * b[k];
  return out;
}

std::vector<double> event_damage(const ResponseRecord& record, const tower::TowerGeometry& geometry,
                                 const SNCurve& curve, double trim) {
  record.validate();
  geometry.validate();
  curve.validate();
  const auto zm = geometry.midpoint_z();
  const auto rm = geometry.midpoint_radius();
  const double t0 = record.time.empty() ? 0.0 : record.time.front();
  std::size_t first = 0;
  while (first < record.time.size() && record.time[first] - t0 < trim - 1e-9) ++first;

  std::vector<double> damage(zm.size(), 0.0);
  for (std::size_t i = 0; i < zm.size(); ++i) {
    auto m = interpolate_moment(record, zm[i]);
    m.erase(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(first));
    damage[i] = damage_from_moment_series(m, rm[i], geometry.t[i], curve);
  }
  return damage;
}

namespace {

std::vector<std::pair<double, const std::vector<double>*>> align(
    const EventDamages& event_damages, const std::vector<env::EnvironmentalState>& states,
    std::size_t n_sections) {
  std::map<int, double> weight_by_id;
  for (const auto& s : states) {
    require(weight_by_id.emplace(s.id, s.weight).second, ErrorKind::Consistency,
            "duplicate state id " + std::to_string(s.id));
  }
  std::map<int, const std::vector<double>*> damage_by_id;
  for (const auto& [id, d] : event_damages) {
    require(d.size() == n_sections, ErrorKind::Consistency,
            "event damage for state " + std::to_string(id) + " has wrong section count");
    require(weight_by_id.count(id) == 1, ErrorKind::Consistency,
            "event damage for unknown state " + std::to_string(id));
    require(damage_by_id.emplace(id, &d).second, ErrorKind::Consistency,
            "duplicate event damage for state " + std::to_string(id));
  }
  require(damage_by_id.size() == weight_by_id.size(), ErrorKind::Consistency,
          "event damages cover " + std::to_string(damage_by_id.size()) + " of " +
              std::to_string(weight_by_id.size()) + " states");
  // id order makes the reduction independent of input order
  std::vector<std::pair<double, const std::vector<double>*>> out;
  for (const auto& [id, d] : damage_by_id) out.emplace_back(weight_by_id[id], d);
  return out;
}

}  // namespace

SectionDamageProfile lifetime_damage(const EventDamages& event_damages,
                                     const std::vector<env::EnvironmentalState>& states, double lt,
                                     double t_event, const std::vector<double>& section_midpoints) {
  require(t_event > 0.0 && lt > 0.0, ErrorKind::Config, "lifetime and event duration must be positive");
  const auto rows = align(event_damages, states, section_midpoints.size());
  SectionDamageProfile p;
  p.section_midpoints = section_midpoints;
  p.damage.assign(section_midpoints.size(), 0.0);
  for (const auto& [w, d] : rows) {
    const double n_events = (lt / t_event) * w;
    for (std::size_t i = 0; i < p.damage.size(); ++i) p.damage[i] += (*d)[i] * n_events;
  }
  return p;
}

SectionDamageProfile lifetime_damage_rate_form(const EventDamages& event_damages,
                                               const std::vector<env::EnvironmentalState>& states,
                                               double lt, double t_event,
                                               const std::vector<double>& section_midpoints) {
  require(t_event > 0.0 && lt > 0.0, ErrorKind::Config, "lifetime and event duration must be positive");
  const auto rows = align(event_damages, states, section_midpoints.size());
  SectionDamageProfile p;
  p.section_midpoints = section_midpoints;
  p.damage.assign(section_midpoints.size(), 0.0);
  for (const auto& [w, d] : rows)
    for (std::size_t i = 0; i < p.damage.size(); ++i) p.damage[i] += w * ((*d)[i] / t_event);
  for (double& v : p.damage) v *= lt;
  return p;
}

void write_damage_csv(std::ostream& os, const SectionDamageProfile& profile) {
  os << "z_mid_m,damage\n";
  for (std::size_t i = 0; i < profile.damage.size(); ++i)
    os << csv::format(profile.section_midpoints[i]) << ',' << csv::format(profile.damage[i]) << '\n';
}

SectionDamageProfile read_damage_csv(std::istream& is) {
  const auto table = csv::read(is);
  const auto cz = csv::column(table, "z_mid_m");
  const auto cd = csv::column(table, "damage");
  SectionDamageProfile p;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string ctx = "damage row " + std::to_string(r + 1);
    require(table.rows[r].size() == table.header.size(), ErrorKind::Input, ctx + ": wrong column count");
    p.section_midpoints.push_back(csv::to_double(table.rows[r][cz], ctx));
    p.damage.push_back(csv::to_double(table.rows[r][cd], ctx));
  }
  return p;
}

void write_cycles_csv(std::ostream& os, const CycleSet& cycles) {
  os << "range_pa,count\n";
  for (const auto& c : cycles) os << csv::format(c.range) << ',' << csv::format(c.count) << '\n';
}

}  // namespace fowt::fatigue
