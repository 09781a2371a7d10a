#pragma once

#include <stdexcept>
#include <string>

namespace arcpade {

enum class ErrorCode {
  DomainError,
  PoleError,
  SingularMatrix,
  NoConvergence,
  TraceDiverged,
  NotClosed,
  HitGenerator,
  SelfIntersection,
  InvalidCurve,
  BranchJump,
  OnArc,
  DegenerateDenominator,
  NotStabilized,
  TooCloseToCurve,
  ZeroDensity,
  UnwrapJump,
  IndivisibleWithoutPadding,
  LevelCurveTraceFailed,
  NonmonotoneFlux,
  ResidualTooLarge,
  CancellationCheckFailed,
  AtPoleOfApproximant,
  ConfigError,
  IoError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::PoleError: return "PoleError";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::TraceDiverged: return "TraceDiverged";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::HitGenerator: return "HitGenerator";
    case ErrorCode::SelfIntersection: return "SelfIntersection";
    case ErrorCode::InvalidCurve: return "InvalidCurve";
    case ErrorCode::BranchJump: return "BranchJump";
    case ErrorCode::OnArc: return "OnArc";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::NotStabilized: return "NotStabilized";
    case ErrorCode::TooCloseToCurve: return "TooCloseToCurve";
    case ErrorCode::ZeroDensity: return "ZeroDensity";
    case ErrorCode::UnwrapJump: return "UnwrapJump";
    case ErrorCode::IndivisibleWithoutPadding: return "IndivisibleWithoutPadding";
    case ErrorCode::LevelCurveTraceFailed: return "LevelCurveTraceFailed";
    case ErrorCode::NonmonotoneFlux: return "NonmonotoneFlux";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::CancellationCheckFailed: return "CancellationCheckFailed";
    case ErrorCode::AtPoleOfApproximant: return "AtPoleOfApproximant";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace arcpade
