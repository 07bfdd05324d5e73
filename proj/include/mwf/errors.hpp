#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mwf {

enum class ErrorCode {
  NonFinite,
  DimensionMismatch,
  NotHermitian,
  NotPSD,
  NotPD,
  SingularNoise,
  ZeroChannel,
  OverlappingGroups,
  IncompleteCover,
  NonPositiveBudget,
  EmptyGroup,
  IndexOutOfRange,
  NonPositiveMultiplier,
  NotFullRank,
  NotPSDRegime,
  DegenerateGroup,
  NoProgress,
  TooLarge,
  InvalidOptions,
  InvalidConfig,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NotPD: return "NotPD";
    case ErrorCode::SingularNoise: return "SingularNoise";
    case ErrorCode::ZeroChannel: return "ZeroChannel";
    case ErrorCode::OverlappingGroups: return "OverlappingGroups";
    case ErrorCode::IncompleteCover: return "IncompleteCover";
    case ErrorCode::NonPositiveBudget: return "NonPositiveBudget";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonPositiveMultiplier: return "NonPositiveMultiplier";
    case ErrorCode::NotFullRank: return "NotFullRank";
    case ErrorCode::NotPSDRegime: return "NotPSDRegime";
    case ErrorCode::DegenerateGroup: return "DegenerateGroup";
    case ErrorCode::NoProgress: return "NoProgress";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InvalidOptions: return "InvalidOptions";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mwf
