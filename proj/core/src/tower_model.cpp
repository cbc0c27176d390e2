#include "fowt/tower_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "fowt/csv.hpp"

namespace fowt::tower {

void Material::validate() const {
  require(density > 0 && youngs_modulus > 0 && shear_modulus > 0 && yield_strength > 0,
          ErrorKind::Config, "material properties must be positive");
  require(poisson > 0.0 && poisson < 0.5, ErrorKind::Config, "poisson ratio must lie in (0, 0.5)");
}

double TowerGeometry::height() const {
  double z = 0.0;
  for (double hi : h) z += hi;
  return z;
}

void TowerGeometry::validate() const {
  const std::size_t n = h.size();
  require(n >= 1, ErrorKind::Geometry, "tower needs at least one section");
  require(d.size() == n + 1, ErrorKind::Geometry,
          "tower needs n+1 diameters for n sections (got " + std::to_string(d.size()) + " for " +
              std::to_string(n) + ")");
  require(t.size() == n, ErrorKind::Geometry, "tower needs one thickness per section");
  for (double v : d) require(v > 0.0 && std::isfinite(v), ErrorKind::Geometry, "diameters must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    require(h[i] > 0.0 && std::isfinite(h[i]), ErrorKind::Geometry, "section heights must be positive");
    require(t[i] > 0.0 && std::isfinite(t[i]), ErrorKind::Geometry, "thicknesses must be positive");
    require(t[i] < 0.5 * std::min(d[i], d[i + 1]), ErrorKind::Geometry,
            "section " + std::to_string(i + 1) + " wall thicker than its radius");
  }
}

std::vector<double> TowerGeometry::boundary_z() const {
  std::vector<double> z(h.size() + 1, 0.0);
  for (std::size_t i = 0; i < h.size(); ++i) z[i + 1] = z[i] + h[i];
  return z;
}

std::vector<double> TowerGeometry::midpoint_z() const {
  std::vector<double> z;
  z.reserve(h.size());
  double base = 0.0;
  for (double hi : h) {
    z.push_back(base + 0.5 * hi);
    base += hi;
  }
  return z;
}

std::vector<double> TowerGeometry::midpoint_radius() const {
  std::vector<double> r;
  r.reserve(h.size());
  for (std::size_t i = 0; i + 1 < d.size(); ++i) r.push_back(0.25 * (d[i] + d[i + 1]));
  return r;
}

SectionProperties section_properties(double d_outer, double t) {
  const double r = 0.5 * d_outer;
  require(t > 0.0 && t <= r, ErrorKind::Geometry, "section properties need 0 < t <= d/2");
  const double ri = r - t;
  SectionProperties p;
  p.area = kPi * (r * r - ri * ri);
  p.second_moment = 0.25 * kPi * (std::pow(r, 4) - std::pow(ri, 4));
  p.modulus = p.second_moment / r;
  return p;
}

std::vector<double> section_masses(const TowerGeometry& g, const Material& material) {
  g.validate();
  std::vector<double> m;
  m.reserve(g.sections());
  const auto rm = g.midpoint_radius();
  for (std::size_t i = 0; i < g.sections(); ++i) {
    // outer radius is linear along the frustum, so the shell area is too
    const double volume = kPi * g.h[i] * (2.0 * g.t[i] * rm[i] - g.t[i] * g.t[i]);
    m.push_back(material.density * volume);
  }
  return m;
}

MassCost tower_mass(const TowerGeometry& g, const Material& material, double cost_rate) {
  MassCost out;
  for (double m : section_masses(g, material)) out.mass += m;
  out.cost = cost_rate * out.mass;
  return out;
}

StressProfile stress_profile(const TowerGeometry& g, const Material& material,
                             const RnaProperties& rna, const TopLoads& loads, double gravity) {
  const auto masses = section_masses(g, material);
  const auto zm = g.midpoint_z();
  const auto rm = g.midpoint_radius();
  const double length = g.height();
  const std::size_t n = g.sections();

  StressProfile s;
  s.axial.resize(n);
  s.bending.resize(n);
  s.von_mises.resize(n);
  double above = 0.0;  // self weight of the sections fully above section i
  for (std::size_t k = n; k-- > 0;) {
    const auto p = section_properties(2.0 * rm[k], g.t[k]);
    const double weight_above = gravity * (above + 0.5 * masses[k]);
    const double axial_force = loads.force[2] - rna.mass * gravity - weight_above;
    const double moment = loads.moment[1] + loads.force[0] * (length - zm[k]) +
                          rna.mass * gravity * rna.com_offset[0];
    s.axial[k] = axial_force / p.area;
    s.bending[k] = std::abs(moment) / p.modulus;
    s.von_mises[k] = std::max(std::abs(s.axial[k] + s.bending[k]), std::abs(s.axial[k] - s.bending[k]));
    above += masses[k];
  }
  return s;
}

BucklingUtilization buckling_utilization(const TowerGeometry& g, const Material& material,
                                         const StressProfile& stress, const BucklingSettings& settings) {
  g.validate();
  const std::size_t n = g.sections();
  require(stress.von_mises.size() == n && stress.axial.size() == n, ErrorKind::Consistency,
          "stress profile does not match the section count");
  const auto rm = g.midpoint_radius();
  const double length = g.height();

  double i_avg = 0.0;
  std::vector<SectionProperties> props;
  props.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    props.push_back(section_properties(2.0 * rm[k], g.t[k]));
    i_avg += props.back().second_moment * g.h[k];
  }
  i_avg /= length;

  BucklingUtilization u;
  u.shell.resize(n);
  u.global.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double sigma_cr = 0.605 * settings.knockdown * material.youngs_modulus * g.t[k] / rm[k];
    u.shell[k] = std::abs(stress.von_mises[k]) / sigma_cr;
    // free-standing cantilever: effective length 2L
    const double sigma_e = kPi * kPi * material.youngs_modulus * i_avg /
                           (4.0 * length * length * props[k].area);
    u.global[k] = std::max(-stress.axial[k], 0.0) / sigma_e;
  }
  return u;
}

namespace {

struct BeamSystem {
  Eigen::MatrixXd k;
  Eigen::MatrixXd m;
};

/// Free DOFs: (w, theta) at every node above the clamp.
BeamSystem assemble_beam(const TowerGeometry& g, const Material& material, int per_section) {
  g.validate();
  require(per_section >= 1, ErrorKind::Config, "elements_per_section must be >= 1");
  const std::size_t n = g.sections();
  const int n_el = static_cast<int>(n) * per_section;
  const int n_dof = 2 * (n_el + 1);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n_dof, n_dof);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_dof, n_dof);

  int e = 0;
  for (std::size_t s = 0; s < n; ++s) {
    for (int j = 0; j < per_section; ++j, ++e) {
      const double le = g.h[s] / per_section;
      const double xi = (j + 0.5) / per_section;
      const double dmid = g.d[s] + (g.d[s + 1] - g.d[s]) * xi;
      const auto p = section_properties(dmid, g.t[s]);
      const double ei = material.youngs_modulus * p.second_moment;
      const double rho_a = material.density * p.area;

      Eigen::Matrix4d ke;
      ke << 12, 6 * le, -12, 6 * le,
            6 * le, 4 * le * le, -6 * le, 2 * le * le,
            -12, -6 * le, 12, -6 * le,
            6 * le, 2 * le * le, -6 * le, 4 * le * le;
      ke *= ei / (le * le * le);
      Eigen::Matrix4d me;
      me << 156, 22 * le, 54, -13 * le,
            22 * le, 4 * le * le, 13 * le, -3 * le * le,
            54, 13 * le, 156, -22 * le,
            -13 * le, -3 * le * le, -22 * le, 4 * le * le;
      me *= rho_a * le / 420.0;
      k.block<4, 4>(2 * e, 2 * e) += ke;
      m.block<4, 4>(2 * e, 2 * e) += me;
    }
  }
  const int keep = n_dof - 2;
  return {k.bottomRightCorner(keep, keep), m.bottomRightCorner(keep, keep)};
}

}  // namespace

Frequencies first_natural_frequency(const TowerGeometry& g, const Material& material,
                                    const RnaProperties& rna, const FrequencySettings& settings) {
  auto sys = assemble_beam(g, material, settings.elements_per_section);
  const int top = static_cast<int>(sys.k.rows()) - 2;
  const double zc = rna.com_offset[2];
  sys.m(top, top) += rna.mass;
  sys.m(top, top + 1) += rna.mass * zc;
  sys.m(top + 1, top) += rna.mass * zc;
  sys.m(top + 1, top + 1) += rna.mass * zc * zc + rna.inertia[1][1];

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(sys.k, sys.m,
                                                                   Eigen::EigenvaluesOnly);
  require(solver.info() == Eigen::Success, ErrorKind::Numerical,
          "generalized eigenproblem for the tower did not converge");
  const double lambda = solver.eigenvalues()(0);
  require(lambda > 0.0 && std::isfinite(lambda), ErrorKind::Numerical,
          "tower stiffness matrix is singular");
  Frequencies f;
  f.f1_land = std::sqrt(lambda) / (2.0 * kPi);
  f.f1_floating = f.f1_land * settings.inverse_r_i;
  return f;
}

double top_deflection(const TowerGeometry& g, const Material& material, const TopLoads& loads) {
  const auto sys = assemble_beam(g, material, 1);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(sys.k.rows());
  const int top = static_cast<int>(sys.k.rows()) - 2;
  f(top) = loads.force[0];
  f(top + 1) = loads.moment[1];
  const Eigen::VectorXd u = sys.k.ldlt().solve(f);
  return u(top);
}

GeometricRatios geometric_ratios(const TowerGeometry& g) {
  g.validate();
  GeometricRatios r;
  const std::size_t n = g.sections();
  for (std::size_t i = 1; i <= n; ++i) {
    r.d_over_t.push_back(0.5 * (g.d[i - 1] + g.d[i]) / g.t[i - 1]);
    r.taper.push_back(g.d[i] / g.d[i - 1]);
    if (g.d[i] > g.d[i - 1]) r.monotone_d = false;
    if (i >= 2 && g.t[i - 1] > g.t[i - 2]) r.monotone_t = false;
  }
  return r;
}

StructuralReport structural_report(const TowerGeometry& g, const Material& material,
                                   const RnaProperties& rna, const TopLoads& loads,
                                   const StructuralSettings& settings) {
  StructuralReport rep;
  const auto stress = stress_profile(g, material, rna, loads);
  const auto buck = buckling_utilization(g, material, stress, settings.buckling);
  const auto freq = first_natural_frequency(g, material, rna, settings.frequency);
  const auto mc = tower_mass(g, material, settings.cost_rate);
  rep.von_mises_per_section = stress.von_mises;
  rep.shell_buckling_util = buck.shell;
  rep.global_buckling_util = buck.global;
  rep.f1_land = freq.f1_land;
  rep.f1_floating = freq.f1_floating;
  rep.top_deflection = top_deflection(g, material, loads);
  rep.mass = mc.mass;
  rep.cost = mc.cost;
  return rep;
}

TowerGeometry read_geometry_csv(std::istream& is) {
  const auto table = csv::read(is);
  const auto ci = csv::column(table, "i");
  const auto cd = csv::column(table, "d_i_m");
  const auto ch = csv::column(table, "h_i_m");
  const auto ct = csv::column(table, "t_i_mm");
  TowerGeometry g;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    require(row.size() == table.header.size(), ErrorKind::Input,
            "geometry row " + std::to_string(r + 1) + " has wrong column count");
    const std::string ctx = "geometry row " + std::to_string(r + 1);
    const int idx = csv::to_int(row[ci], ctx);
    require(idx == static_cast<int>(r), ErrorKind::Input, ctx + ": index out of sequence");
    g.d.push_back(csv::to_double(row[cd], ctx));
    if (r == 0) {
      require(row[ch] == "-" && row[ct] == "-", ErrorKind::Input,
              "geometry row 0 carries only the base diameter");
      continue;
    }
    g.h.push_back(csv::to_double(row[ch], ctx));
    g.t.push_back(csv::to_double(row[ct], ctx) * 1e-3);
  }
  g.validate();
  return g;
}

TowerGeometry load_geometry(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open geometry file " + path);
  return read_geometry_csv(in);
}

void write_geometry_csv(std::ostream& os, const TowerGeometry& g) {
  g.validate();
  os << "i,d_i_m,h_i_m,t_i_mm\n";
  os << "0," << csv::format(g.d[0]) << ",-,-\n";
  for (std::size_t i = 1; i <= g.sections(); ++i) {
    os << i << ',' << csv::format(g.d[i]) << ',' << csv::format(g.h[i - 1]) << ','
       << csv::format(g.t[i - 1] * 1e3) << '\n';
  }
}

}  // namespace fowt::tower
