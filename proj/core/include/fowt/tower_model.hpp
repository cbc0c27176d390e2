#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "fowt/error.hpp"

namespace fowt::tower {

struct Material {
  double density = 7850.0;           ///< [kg/m^3]
  double youngs_modulus = 200.0e9;   ///< [Pa]
  double shear_modulus = 79.3e9;     ///< [Pa]
  double poisson = 0.265;            ///< [-]
  double yield_strength = 345.0e6;   ///< [Pa]

  void validate() const;
};

/// Sectioned conical shell tower. Section i (1-based) spans d[i-1] at its
/// bottom to d[i] at its top, with height h[i-1] and uniform wall t[i-1].
struct TowerGeometry {
  std::vector<double> d;  ///< outer diameters d_0..d_n [m]
  std::vector<double> h;  ///< section heights h_1..h_n [m]
  std::vector<double> t;  ///< wall thicknesses t_1..t_n [m]

  std::size_t sections() const { return h.size(); }
  double height() const;
  /// Throws fowt::Error(Geometry) on any invariant violation.
  void validate() const;

  /// Elevation of each section boundary, n+1 values starting at 0.
  std::vector<double> boundary_z() const;
  std::vector<double> midpoint_z() const;
  /// Mean of the two end outer radii of each section.
  std::vector<double> midpoint_radius() const;
};

struct RnaProperties {
  double mass = 1218.685e3;                         ///< [kg]
  std::array<double, 3> com_offset{0.0, 0.0, 0.0};  ///< CoM relative to the tower top [m]
  std::array<std::array<double, 3>, 3> inertia{};   ///< about the CoM [kg m^2]
};

struct TopLoads {
  std::array<double, 3> force{5.7e6, 0.09e6, -11.3e6};     ///< [N]
  std::array<double, 3> moment{-1.6e6, -37.6e6, 10.7e6};   ///< [N m]
};

struct SectionProperties {
  double area = 0.0;           ///< [m^2]
  double second_moment = 0.0;  ///< [m^4]
  double modulus = 0.0;        ///< I / r [m^3]
};

/// Annulus properties for outer diameter d and wall t.
SectionProperties section_properties(double d_outer, double t);

struct MassCost {
  double mass = 0.0;  ///< [kg]
  double cost = 0.0;  ///< [currency]
};

inline constexpr double kDefaultCostRate = 2.611;  ///< currency per kg

std::vector<double> section_masses(const TowerGeometry& geometry, const Material& material);
MassCost tower_mass(const TowerGeometry& geometry, const Material& material,
                    double cost_rate = kDefaultCostRate);

struct StressProfile {
  std::vector<double> axial;      ///< signed, compression negative [Pa]
  std::vector<double> bending;    ///< extreme-fibre magnitude [Pa]
  std::vector<double> von_mises;  ///< [Pa]
};

/// Static stresses at each section midpoint under the tower-top loads, RNA
/// weight and self weight above the section. Pass gravity = 0 to drop weight.
StressProfile stress_profile(const TowerGeometry& geometry, const Material& material,
                             const RnaProperties& rna, const TopLoads& loads,
                             double gravity = kGravity);

struct BucklingSettings {
  double knockdown = 0.5;  ///< shell imperfection knockdown [-]
};

struct BucklingUtilization {
  std::vector<double> shell;
  std::vector<double> global;
};

BucklingUtilization buckling_utilization(const TowerGeometry& geometry, const Material& material,
                                         const StressProfile& stress,
                                         const BucklingSettings& settings = {});

struct FrequencySettings {
  int elements_per_section = 1;
  double inverse_r_i = 1.57;  ///< floating-to-land frequency ratio
};

struct Frequencies {
  double f1_land = 0.0;      ///< [Hz]
  double f1_floating = 0.0;  ///< [Hz]
};

/// Clamped Euler-Bernoulli beam with Hermite elements and consistent mass; RNA
/// as a rigid tip body (mass, CoM height and rotary inertia about y).
Frequencies first_natural_frequency(const TowerGeometry& geometry, const Material& material,
                                    const RnaProperties& rna, const FrequencySettings& settings = {});

struct GeometricRatios {
  std::vector<double> d_over_t;  ///< mean section diameter over t_i, i = 1..n
  std::vector<double> taper;     ///< d_i / d_{i-1}, i = 1..n
  bool monotone_d = true;
  bool monotone_t = true;
};

GeometricRatios geometric_ratios(const TowerGeometry& geometry);

struct StructuralReport {
  std::vector<double> von_mises_per_section;
  std::vector<double> shell_buckling_util;
  std::vector<double> global_buckling_util;
  double f1_land = 0.0;
  double f1_floating = 0.0;
  double top_deflection = 0.0;  ///< static, under the top loads [m]
  double mass = 0.0;
  double cost = 0.0;
};

struct StructuralSettings {
  BucklingSettings buckling;
  FrequencySettings frequency;
  double cost_rate = kDefaultCostRate;
};

StructuralReport structural_report(const TowerGeometry& geometry, const Material& material,
                                   const RnaProperties& rna, const TopLoads& loads,
                                   const StructuralSettings& settings = {});

/// Static tip deflection of the cantilever under the top force and moment.
double top_deflection(const TowerGeometry& geometry, const Material& material, const TopLoads& loads);

// Geometry files: i,d_i_m,h_i_m,t_i_mm with '-' in the h/t cells of row 0.
TowerGeometry read_geometry_csv(std::istream& is);
TowerGeometry load_geometry(const std::string& path);
void write_geometry_csv(std::ostream& os, const TowerGeometry& geometry);

/// Bundled 30-section reference and optimized towers.
TowerGeometry reference_geometry();
TowerGeometry optimized_geometry();

}  // namespace fowt::tower
