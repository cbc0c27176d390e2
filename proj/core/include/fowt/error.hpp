#pragma once

#include <stdexcept>
#include <string>

namespace fowt {

/// Failure categories surfaced by the library. Every thrown fowt::Error carries one.
enum class ErrorKind {
  Domain,         ///< argument outside the mathematical domain of a function
  Config,         ///< inconsistent or invalid configuration
  Bracket,        ///< root bracket does not contain the target value
  Index,          ///< index out of range
  Input,          ///< malformed input data (series, files, grids)
  Geometry,       ///< geometry violates a physical invariant
  Interpolation,  ///< query outside the tabulated span
  Consistency,    ///< two inputs that must agree do not
  Numerical,      ///< numerical failure (singular matrix, no convergence)
  RejectedState,  ///< environmental state outside the operating envelope
  Capacity,       ///< ballast demand exceeds column capacity
  Infeasible,     ///< no feasible solution / adjustment exists
  Io,             ///< file system or parse failure
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Config: return "configuration";
    case ErrorKind::Bracket: return "bracket";
    case ErrorKind::Index: return "index";
    case ErrorKind::Input: return "input";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::Interpolation: return "interpolation";
    case ErrorKind::Consistency: return "consistency";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::RejectedState: return "rejected state";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

/// Throws fowt::Error(kind, msg) unless cond holds.
inline void require(bool cond, ErrorKind kind, const std::string& msg) {
  if (!cond) throw Error(kind, msg);
}

/// Physical constants shared across modules.
inline constexpr double kGravity = 9.81;          ///< [m/s^2]
inline constexpr double kAirDensity = 1.225;      ///< [kg/m^3]
inline constexpr double kWaterDensity = 1025.0;   ///< [kg/m^3]
inline constexpr double kPi = 3.14159265358979323846;

}  // namespace fowt
