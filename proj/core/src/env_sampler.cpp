#include "fowt/env_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "fowt/csv.hpp"
#include "fowt/error.hpp"

namespace fowt::env {

IecClass parse_iec_class(const std::string& name) {
  if (name == "A" || name == "a") return IecClass::A;
  if (name == "B" || name == "b") return IecClass::B;
  if (name == "C" || name == "c") return IecClass::C;
  throw Error(ErrorKind::Config, "unknown IEC turbulence class '" + name + "'");
}

std::string to_string(IecClass cls) {
  switch (cls) {
    case IecClass::A: return "A";
    case IecClass::B: return "B";
    case IecClass::C: return "C";
  }
  return "?";
}

void WindSpeedModel::validate() const {
  require(alpha > 0.0 && beta > 0.0 && delta > 0.0, ErrorKind::Config,
          "wind speed model parameters must be positive");
}

void SamplingPlan::validate() const {
  require(n_u >= 1 && n_hs >= 1 && n_tp >= 1 && n_seeds >= 1, ErrorKind::Config,
          "sampling plan counts must all be >= 1");
  require(v_in >= 0.0 && v_out > v_in, ErrorKind::Config,
          "sampling plan requires v_out > v_in >= 0");
}

std::size_t SamplingPlan::state_count() const {
  const std::size_t base = static_cast<std::size_t>(n_u) * n_hs * n_tp;
  return turbulent ? base * static_cast<std::size_t>(n_seeds) : base;
}

// -- wind ---------------------------------------------------------------------

double wind_speed_pdf(double u, const WindSpeedModel& m) {
  require(u >= 0.0, ErrorKind::Domain, "wind_speed_pdf requires u >= 0");
  if (u == 0.0) {
    // density ~ u^(beta*delta - 1) near the origin
    const double p = m.beta * m.delta - 1.0;
    if (p > 0.0) return 0.0;
    if (p == 0.0) return m.delta * m.beta / m.alpha;
    return INFINITY;
  }
  const double x = u / m.alpha;
  const double xb = std::pow(x, m.beta);
  const double e = std::exp(-xb);
  return m.delta * (m.beta / m.alpha) * std::pow(x, m.beta - 1.0) *
         std::pow(-std::expm1(-xb), m.delta - 1.0) * e;
}

double wind_speed_cdf(double u, const WindSpeedModel& m) {
  require(u >= 0.0, ErrorKind::Domain, "wind_speed_cdf requires u >= 0");
  const double xb = std::pow(u / m.alpha, m.beta);
  return std::pow(-std::expm1(-xb), m.delta);
}

double turbulence_std(double u, IecClass iec_class, const WindSpeedModel& model) {
  require(u >= 0.0, ErrorKind::Domain, "turbulence_std requires u >= 0");
  const auto it = model.i_ref_by_class.find(iec_class);
  require(it != model.i_ref_by_class.end(), ErrorKind::Config,
          "no reference turbulence intensity for class " + to_string(iec_class));
  return it->second * (0.75 * u + 5.6);
}

// -- waves --------------------------------------------------------------------

WaveHeightParams wave_height_params(double u) {
  WaveHeightParams p;
  p.beta = 1.1 + 1.37 / (1.0 + std::exp(-0.27 * (u - 15.86)));
  p.alpha = (1.25 + 0.01 * std::pow(u, 1.98)) / std::pow(2.0445, 1.0 / p.beta);
  return p;
}

double wave_height_cdf(double hs, double u) {
  require(hs >= 0.0, ErrorKind::Domain, "wave_height_cdf requires hs >= 0");
  const auto p = wave_height_params(u);
  const double xb = std::pow(hs / p.alpha, p.beta);
  return std::pow(-std::expm1(-xb), 5.0);
}

double wave_height_pdf(double hs, double u) {
  require(hs >= 0.0, ErrorKind::Domain, "wave_height_pdf requires hs >= 0");
  const auto p = wave_height_params(u);
  const double x = hs / p.alpha;
  const double xb = std::pow(x, p.beta);
  return 5.0 * (p.beta / p.alpha) * std::pow(x, p.beta - 1.0) *
         std::pow(-std::expm1(-xb), 4.0) * std::exp(-xb);
}

WavePeriodParams wave_period_params(double hs) {
  require(hs >= 0.0, ErrorKind::Domain, "wave period parameters require hs >= 0");
  WavePeriodParams p;
  p.mu = std::log(5.94 + 9.42 * std::sqrt(hs / kGravity));
  p.sigma = 0.24 * std::exp(-0.11 * hs);
  return p;
}

double wave_period_cdf(double tp, double hs) {
  require(tp > 0.0, ErrorKind::Domain, "wave_period_cdf requires tp > 0");
  const auto p = wave_period_params(hs);
  return 0.5 * (1.0 + std::erf((std::log(tp) - p.mu) / (std::sqrt(2.0) * p.sigma)));
}

double wave_period_pdf(double tp, double hs) {
  require(tp > 0.0, ErrorKind::Domain, "wave_period_pdf requires tp > 0");
  const auto p = wave_period_params(hs);
  const double z = (std::log(tp) - p.mu) / p.sigma;
  return std::exp(-0.5 * z * z) / (tp * p.sigma * std::sqrt(2.0 * kPi));
}

MisalignmentParams misalignment_params(double u) {
  MisalignmentParams p;
  p.kappa = 10.04 / (1.0 + std::exp(-0.28 * (u - 15.89)));
  p.mu = 0.24 - 0.05 * u + 0.0014 * u * u;
  return p;
}

double misalignment_pdf(double theta, double u) {
  require(theta >= -kPi && theta <= kPi, ErrorKind::Domain,
          "misalignment_pdf requires theta in [-pi, pi]");
  const auto p = misalignment_params(u);
  return std::exp(p.kappa * std::cos(theta - p.mu)) / (2.0 * kPi * std::cyl_bessel_i(0.0, p.kappa));
}

// -- numerics -----------------------------------------------------------------

double invert_cdf(const std::function<double(double)>& cdf, double q, Bracket bracket) {
  double a = bracket.lo;
  double b = bracket.hi;
  require(b > a, ErrorKind::Bracket, "invert_cdf bracket must satisfy lo < hi");
  double fa = cdf(a) - q;
  double fb = cdf(b) - q;
  if (fa > 0.0 || fb < 0.0) {
    throw Error(ErrorKind::Bracket,
                "target " + csv::format(q) + " outside achieved range [" + csv::format(fa + q) +
                    ", " + csv::format(fb + q) + "] on [" + csv::format(a) + ", " + csv::format(b) +
                    "]");
  }
  if (std::abs(fa) <= 1e-10) return a;
  if (std::abs(fb) <= 1e-10) return b;

  constexpr double kValueTol = 1e-10;
  constexpr double kWidthTol = 1e-12;
  bool last_was_secant_slow = false;
  double last_width = b - a;
  for (int iter = 0; iter < 400; ++iter) {
    double x;
    const bool secant_ok = fb > fa && !last_was_secant_slow;
    if (secant_ok) {
      x = a - fa * (b - a) / (fb - fa);
      // keep secant strictly inside and away from the ends
      const double margin = 1e-3 * (b - a);
      if (!(x > a + margin && x < b - margin)) x = 0.5 * (a + b);
    } else {
      x = 0.5 * (a + b);
    }
    const double fx = cdf(x) - q;
    if (std::abs(fx) <= kValueTol) return x;
    if (fx < 0.0) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    const double width = b - a;
    if (width <= kWidthTol) return 0.5 * (a + b);
    // force a bisection whenever the bracket failed to halve
    last_was_secant_slow = width > 0.5 * last_width;
    last_width = width;
  }
  return 0.5 * (a + b);
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double fa, double m, double fm,
                    double b, double fb, double whole, double eps, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  return simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * eps, depth - 1) +
         simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * eps, depth - 1);
}

}  // namespace

double integrate_adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol) {
  if (a == b) return 0.0;
  // Split into a few panels first so narrow features are not missed.
  constexpr int kPanels = 8;
  double total = 0.0;
  const double h = (b - a) / kPanels;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = a + p * h;
    const double hi = p + 1 == kPanels ? b : lo + h;
    const double mid = 0.5 * (lo + hi);
    const double flo = f(lo), fmid = f(mid), fhi = f(hi);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    const double eps = std::max(rel_tol * std::abs(whole), 1e-300);
    total += simpson_step(f, lo, flo, mid, fmid, hi, fhi, whole, eps, 40);
  }
  return total;
}

// -- sampling -----------------------------------------------------------------

WindBin wind_bin_probability(int i, const SamplingPlan& plan,
                             const std::function<double(double)>& density) {
  plan.validate();
  require(i >= 1 && i <= plan.n_u, ErrorKind::Index,
          "wind bin index " + std::to_string(i) + " outside [1, " + std::to_string(plan.n_u) + "]");
  const double width = (plan.v_out - plan.v_in) / plan.n_u;
  WindBin bin;
  bin.u = plan.v_in + (i - 0.5) * width;
  bin.p = integrate_adaptive_simpson(density, bin.u - 0.5 * width, bin.u + 0.5 * width, 1e-9);
  return bin;
}

WindBin wind_bin_probability(int i, const SamplingPlan& plan, const WindSpeedModel& model) {
  model.validate();
  return wind_bin_probability(i, plan, [&model](double u) { return wind_speed_pdf(u, model); });
}

std::vector<EnvironmentalState> sample_states(const SamplingPlan& plan, const WindSpeedModel& model) {
  plan.validate();
  model.validate();

  const Bracket hs_bracket{0.0, 50.0};
  const Bracket tp_bracket{0.1, 60.0};
  const int seeds = plan.turbulent ? plan.n_seeds : 1;
  const double substates = static_cast<double>(plan.n_hs) * plan.n_tp * seeds;

  std::vector<EnvironmentalState> states;
  states.reserve(plan.state_count());
  int id = 0;
  for (int i = 1; i <= plan.n_u; ++i) {
    const WindBin bin = wind_bin_probability(i, plan, model);
    const double sigma_w = plan.turbulent ? turbulence_std(bin.u, plan.iec_class, model) : 0.0;
    for (int j = 1; j <= plan.n_hs; ++j) {
      const double qh = (j - 0.5) / plan.n_hs;
      const double hs =
          invert_cdf([u = bin.u](double h) { return wave_height_cdf(h, u); }, qh, hs_bracket);
      for (int k = 1; k <= plan.n_tp; ++k) {
        const double qt = (k - 0.5) / plan.n_tp;
        const double tp =
            invert_cdf([hs](double t) { return wave_period_cdf(t, hs); }, qt, tp_bracket);
        for (int s = 1; s <= seeds; ++s) {
          EnvironmentalState st;
          st.id = ++id;
          st.u = bin.u;
          st.seed = plan.turbulent ? s : 0;
          st.sigma_w = sigma_w;
          st.hs = hs;
          st.tp = tp;
          st.m_ww = plan.m_ww_fixed;
          st.weight = bin.p / substates;
          states.push_back(st);
        }
      }
    }
  }

  // Neumaier-compensated normalizer
  double sum = 0.0, comp = 0.0;
  for (const auto& st : states) {
    const double t = sum + st.weight;
    comp += std::abs(sum) >= std::abs(st.weight) ? (sum - t) + st.weight : (st.weight - t) + sum;
    sum = t;
  }
  const double z = sum + comp;
  require(z > 0.0, ErrorKind::Config, "sampling plan has zero probability mass");
  for (auto& st : states) st.weight /= z;
  return states;
}

std::vector<double> wind_bin_centers(const std::vector<EnvironmentalState>& states) {
  std::vector<double> u;
  u.reserve(states.size());
  for (const auto& s : states) u.push_back(s.u);
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

void write_states_csv(std::ostream& os, const std::vector<EnvironmentalState>& states) {
  os << "id,u_ms,seed,sigma_w,hs_m,tp_s,mww_rad,weight\n";
  for (const auto& s : states) {
    os << s.id << ',' << csv::format(s.u) << ',' << s.seed << ',' << csv::format(s.sigma_w) << ','
       << csv::format(s.hs) << ',' << csv::format(s.tp) << ',' << csv::format(s.m_ww) << ','
       << csv::format(s.weight) << '\n';
  }
}

std::vector<EnvironmentalState> read_states_csv(std::istream& is) {
  const auto table = csv::read(is);
  const auto c_id = csv::column(table, "id");
  const auto c_u = csv::column(table, "u_ms");
  const auto c_seed = csv::column(table, "seed");
  const auto c_sw = csv::column(table, "sigma_w");
  const auto c_hs = csv::column(table, "hs_m");
  const auto c_tp = csv::column(table, "tp_s");
  const auto c_m = csv::column(table, "mww_rad");
  const auto c_w = csv::column(table, "weight");
  std::vector<EnvironmentalState> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    require(row.size() == table.header.size(), ErrorKind::Input,
            "states CSV row " + std::to_string(r + 1) + " has wrong column count");
    const std::string ctx = "states row " + std::to_string(r + 1);
    EnvironmentalState s;
    s.id = csv::to_int(row[c_id], ctx);
    s.u = csv::to_double(row[c_u], ctx);
    s.seed = csv::to_int(row[c_seed], ctx);
    s.sigma_w = csv::to_double(row[c_sw], ctx);
    s.hs = csv::to_double(row[c_hs], ctx);
    s.tp = csv::to_double(row[c_tp], ctx);
    s.m_ww = csv::to_double(row[c_m], ctx);
    s.weight = csv::to_double(row[c_w], ctx);
    out.push_back(s);
  }
  return out;
}

}  // namespace fowt::env
