#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spectral_patch {

enum class ErrorCode {
  InvalidArgument,
  ZeroPolynomial,
  NoConvergence,
  DegreeTooLow,
  NotMonic,
  RankTooLarge,
  RankMismatch,
  Singular,
  WrongRank,
  NonReducedCurve,
  AtBranchPoint,
  AmbiguousMatching,
  NoBranchPoints,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegreeTooLow: return "DegreeTooLow";
    case ErrorCode::NotMonic: return "NotMonic";
    case ErrorCode::RankTooLarge: return "RankTooLarge";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::WrongRank: return "WrongRank";
    case ErrorCode::NonReducedCurve: return "NonReducedCurve";
    case ErrorCode::AtBranchPoint: return "AtBranchPoint";
    case ErrorCode::AmbiguousMatching: return "AmbiguousMatching";
    case ErrorCode::NoBranchPoints: return "NoBranchPoints";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace spectral_patch
