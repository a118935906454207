#ifndef GDUAL_ERROR_HPP_
#define GDUAL_ERROR_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gdual {

enum class ErrorKind {
  NotHermitian,
  NotPSD,
  Singular,
  DimensionMismatch,
  NotAFrame,
  ContractViolation,
  NotApproxDual,
  NotDualPair,
  NotEquivalent,
  SmallnessViolated,
  NotRieszBasis,
  SupportOverflow,
  OffGrid,
  LatticeMismatch,
  HypothesisViolated,
  BadCoefficients,
  NotCommuting,
  ParseError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotAFrame: return "NotAFrame";
    case ErrorKind::ContractViolation: return "ContractViolation";
    case ErrorKind::NotApproxDual: return "NotApproxDual";
    case ErrorKind::NotDualPair: return "NotDualPair";
    case ErrorKind::NotEquivalent: return "NotEquivalent";
    case ErrorKind::SmallnessViolated: return "SmallnessViolated";
    case ErrorKind::NotRieszBasis: return "NotRieszBasis";
    case ErrorKind::SupportOverflow: return "SupportOverflow";
    case ErrorKind::OffGrid: return "OffGrid";
    case ErrorKind::LatticeMismatch: return "LatticeMismatch";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::BadCoefficients: return "BadCoefficients";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

// Every failure in the library is reported through this type. When a
// numeric condition failed, `measured()` carries the offending quantity.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what,
        std::optional<double> measured = std::nullopt)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        measured_(measured) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<double> measured() const noexcept { return measured_; }

 private:
  ErrorKind kind_;
  std::optional<double> measured_;
};

}  // namespace gdual

#endif  // GDUAL_ERROR_HPP_
