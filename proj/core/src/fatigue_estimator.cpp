#include "fowt/fatigue_estimator.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "fowt/error.hpp"
#include "json.hpp"

namespace fowt::estimator {

namespace {

void fnv1a(std::uint64_t& h, const std::vector<double>& values) {
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  h ^= 0xff;
  h *= 1099511628211ULL;
}

}  // namespace

std::string geometry_hash(const tower::TowerGeometry& geometry) {
  std::uint64_t h = 1469598103934665603ULL;
  fnv1a(h, geometry.d);
  fnv1a(h, geometry.h);
  fnv1a(h, geometry.t);
  static const char* hex = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<std::size_t>(i)] = hex[h & 0xf];
  return s;
}

CalibrationSet calibrate(const tower::TowerGeometry& geometry,
                         const fatigue::SectionDamageProfile& damages, double m, double k,
                         double t_ref) {
  geometry.validate();
  require(m > 0.0 && t_ref > 0.0 && k >= 0.0, ErrorKind::Config, "estimator needs m > 0, k >= 0, t_ref > 0");
  require(damages.damage.size() == geometry.sections(), ErrorKind::Consistency,
          "damage profile has " + std::to_string(damages.damage.size()) + " sections, geometry has " +
              std::to_string(geometry.sections()));
  const auto r = geometry.midpoint_radius();
  CalibrationSet cal;
  cal.m = m;
  cal.k = k;
  cal.t_ref = t_ref;
  cal.calibration_geometry_hash = geometry_hash(geometry);
  cal.c.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double t = geometry.t[i];
    require(damages.damage[i] >= 0.0, ErrorKind::Input, "calibration damage must be nonnegative");
    cal.c[i] = damages.damage[i] * std::pow(r[i], 2.0 * m) * std::pow(t, m) *
               std::pow(t_ref / t, k * m);
  }
  return cal;
}

fatigue::SectionDamageProfile predict(const CalibrationSet& cal, const tower::TowerGeometry& geometry) {
  geometry.validate();
  require(cal.c.size() == geometry.sections(), ErrorKind::Consistency,
          "calibration has " + std::to_string(cal.c.size()) + " sections, geometry has " +
              std::to_string(geometry.sections()));
  const auto r = geometry.midpoint_radius();
  fatigue::SectionDamageProfile p;
  p.section_midpoints = geometry.midpoint_z();
  p.damage.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double t = geometry.t[i];
    p.damage[i] = cal.c[i] * std::pow(r[i], -2.0 * cal.m) * std::pow(t, -cal.m) *
                  std::pow(t / cal.t_ref, cal.k * cal.m);
  }
  return p;
}

void write_calibration_json(std::ostream& os, const CalibrationSet& cal) {
  nlohmann::json j;
  j["m"] = cal.m;
  j["k"] = cal.k;
  j["t_ref"] = cal.t_ref;
  j["geometry_hash"] = cal.calibration_geometry_hash;
  j["sections"] = nlohmann::json::array();
  for (std::size_t i = 0; i < cal.c.size(); ++i)
    j["sections"].push_back({{"index", i + 1}, {"c", cal.c[i]}});
  os << j.dump(2) << '\n';
}

CalibrationSet read_calibration_json(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, std::string("calibration JSON: ") + e.what());
  }
  CalibrationSet cal;
  try {
    cal.m = j.at("m").get<double>();
    cal.k = j.at("k").get<double>();
    cal.t_ref = j.at("t_ref").get<double>();
    cal.calibration_geometry_hash = j.value("geometry_hash", "");
    const auto& sections = j.at("sections");
    cal.c.assign(sections.size(), 0.0);
    for (const auto& s : sections) {
      const auto idx = s.at("index").get<std::size_t>();
      require(idx >= 1 && idx <= cal.c.size(), ErrorKind::Index, "calibration section index out of range");
      cal.c[idx - 1] = s.at("c").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, std::string("calibration JSON: ") + e.what());
  }
  return cal;
}

}  // namespace fowt::estimator
