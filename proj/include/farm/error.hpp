#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace farm {

enum class ErrorKind {
  EmptyInput,
  ConstantStream,
  NonFiniteValue,
  DimensionMismatch,
  DomainError,
  BadR,
  BadConfig,
  BracketError,
  NoConvergence,
  WindowTooShort,
  AllConstantWindow,
  NotSpd,
  NotSymmetric,
  EigenFailure,
  SingleClass,
  TooFewPerClass,
  TraceTooShort,
  BadSpec,
  CalibrationFailed,
  NoAlarmInTraining,
  SourceExhaustedMidEpisode,
  LabelMismatch,
  IoError,
  VersionMismatch,
  CorruptBundle,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::ConstantStream: return "ConstantStream";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::BadR: return "BadR";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::BracketError: return "BracketError";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::WindowTooShort: return "WindowTooShort";
    case ErrorKind::AllConstantWindow: return "AllConstantWindow";
    case ErrorKind::NotSpd: return "NotSpd";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::TooFewPerClass: return "TooFewPerClass";
    case ErrorKind::TraceTooShort: return "TraceTooShort";
    case ErrorKind::BadSpec: return "BadSpec";
    case ErrorKind::CalibrationFailed: return "CalibrationFailed";
    case ErrorKind::NoAlarmInTraining: return "NoAlarmInTraining";
    case ErrorKind::SourceExhaustedMidEpisode: return "SourceExhaustedMidEpisode";
    case ErrorKind::LabelMismatch: return "LabelMismatch";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::CorruptBundle: return "CorruptBundle";
  }
  return "Unknown";
}

/// Every failure in the library is reported as a farm::Error carrying a kind
/// that callers can switch on; what() holds the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace farm
