#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace schurcut {

enum class ErrorKind {
  SelfLoop,
  NonPositiveWeight,
  OverlappingSets,
  EmptySet,
  EmptyOrFullSet,
  InvalidVertex,
  DimensionMismatch,
  Disconnected,
  NotInRange,
  NoConvergence,
  LastVertex,
  EmptyRetainedSet,
  ZeroThreshold,
  NoQualifyingThreshold,
  TooLarge,
  SingularBlock,
  BadParams,
  Parse,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorKind::OverlappingSets: return "OverlappingSets";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::EmptyOrFullSet: return "EmptyOrFullSet";
    case ErrorKind::InvalidVertex: return "InvalidVertex";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::NotInRange: return "NotInRange";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::LastVertex: return "LastVertex";
    case ErrorKind::EmptyRetainedSet: return "EmptyRetainedSet";
    case ErrorKind::ZeroThreshold: return "ZeroThreshold";
    case ErrorKind::NoQualifyingThreshold: return "NoQualifyingThreshold";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::SingularBlock: return "SingularBlock";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

/// Every failure raised by the library. `kind()` is stable and machine
/// readable; `what()` carries "<Kind>: <detail>".
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace schurcut
