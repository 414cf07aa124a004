#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hflab {

enum class ErrorKind {
  InvalidScalar,
  ConductorMismatch,
  ShapeError,
  NotAnAlgebra,
  TheoremViolation,
  InternalInconsistency,
  InvalidDatum,
  IncompleteDatum,
  InvalidCocycle,
  InvalidSubobject,
  InvalidMorphism,
  DatumMismatch,
  NotInBasis,
  SupportError,
  BudgetExceeded,
  InsufficientData,
  SchemaError,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
  case ErrorKind::InvalidScalar: return "InvalidScalar";
  case ErrorKind::ConductorMismatch: return "ConductorMismatch";
  case ErrorKind::ShapeError: return "ShapeError";
  case ErrorKind::NotAnAlgebra: return "NotAnAlgebra";
  case ErrorKind::TheoremViolation: return "TheoremViolation";
  case ErrorKind::InternalInconsistency: return "InternalInconsistency";
  case ErrorKind::InvalidDatum: return "InvalidDatum";
  case ErrorKind::IncompleteDatum: return "IncompleteDatum";
  case ErrorKind::InvalidCocycle: return "InvalidCocycle";
  case ErrorKind::InvalidSubobject: return "InvalidSubobject";
  case ErrorKind::InvalidMorphism: return "InvalidMorphism";
  case ErrorKind::DatumMismatch: return "DatumMismatch";
  case ErrorKind::NotInBasis: return "NotInBasis";
  case ErrorKind::SupportError: return "SupportError";
  case ErrorKind::BudgetExceeded: return "BudgetExceeded";
  case ErrorKind::InsufficientData: return "InsufficientData";
  case ErrorKind::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a kind so that front ends can
/// tell input problems apart from violated theorems (implementation bugs).
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for the kinds that signal a bug rather than bad input.
  bool is_internal() const noexcept {
    return kind_ == ErrorKind::TheoremViolation ||
           kind_ == ErrorKind::InternalInconsistency;
  }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) {
  throw Error(kind, what);
}

} // namespace hflab
