#pragma once

#include <stdexcept>
#include <string>

namespace folded {

enum class ErrorKind {
  Domain,
  DegenerateSplitting,
  SingularBlock,
  Resolution,
  PeriodObstruction,
  NonTransverse,
  SignViolation,
  NonImmersed,
  TierViolation,
  OffCharacteristic,
  Input,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::DegenerateSplitting: return "degenerate splitting";
    case ErrorKind::SingularBlock: return "singular block";
    case ErrorKind::Resolution: return "insufficient resolution";
    case ErrorKind::PeriodObstruction: return "period obstruction";
    case ErrorKind::NonTransverse: return "non-transverse crossing";
    case ErrorKind::SignViolation: return "sign violation";
    case ErrorKind::NonImmersed: return "non-immersed boundary";
    case ErrorKind::TierViolation: return "tier violation";
    case ErrorKind::OffCharacteristic: return "off characteristic";
    case ErrorKind::Input: return "input error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Absolute tolerances shared by the checks. Defaults can be overridden from
// the CLI config file.
struct Tolerances {
  double geometry = 1e-9;
  double verify = 1e-8;
  double conjugate = 1e-7;
  double immersion = 1e-6;
  double ellipticity = 1e-8;
};

}  // namespace folded
