#pragma once

#include <stdexcept>
#include <string>

namespace movelab {

// Failure categories surfaced by the library. CLI maps these onto exit codes.
enum class ErrKind {
  NegativeMass,
  NotNormalized,
  DuplicateConfiguration,
  ParameterOutOfRange,
  GroundMismatch,
  ModeMismatch,
  BadWeights,
  ZeroProbabilityEvent,
  SizeExceeded,
  LengthMismatch,
  NotDominated,
  NonInvertibleChannel,
  ToleranceTooLow,
  NumericallyInvalid,
  ParseError,
};

inline const char* err_name(ErrKind k) {
  switch (k) {
    case ErrKind::NegativeMass: return "NegativeMass";
    case ErrKind::NotNormalized: return "NotNormalized";
    case ErrKind::DuplicateConfiguration: return "DuplicateConfiguration";
    case ErrKind::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrKind::GroundMismatch: return "GroundMismatch";
    case ErrKind::ModeMismatch: return "ModeMismatch";
    case ErrKind::BadWeights: return "BadWeights";
    case ErrKind::ZeroProbabilityEvent: return "ZeroProbabilityEvent";
    case ErrKind::SizeExceeded: return "SizeExceeded";
    case ErrKind::LengthMismatch: return "LengthMismatch";
    case ErrKind::NotDominated: return "NotDominated";
    case ErrKind::NonInvertibleChannel: return "NonInvertibleChannel";
    case ErrKind::ToleranceTooLow: return "ToleranceTooLow";
    case ErrKind::NumericallyInvalid: return "NumericallyInvalid";
    case ErrKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrKind kind, const std::string& msg)
      : std::runtime_error(std::string(err_name(kind)) + ": " + msg), kind_(kind) {}
  ErrKind kind() const { return kind_; }

 private:
  ErrKind kind_;
};

[[noreturn]] inline void fail(ErrKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace movelab
