#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cramerlab {

enum class ErrorCode {
  NonStochasticRow,
  ReducibleChain,
  PeriodicChain,
  DegeneratePayoff,
  DegenerateVariance,
  InvalidModel,
  UnknownBuiltin,
  ParamOutOfRange,
  SampledTierUnsupported,
  BudgetExceeded,
  OutOfRange,
  TrajectoryTooShort,
  NestedEstimateUnavailable,
  NoDecayCertificate,
  WindowTooSmall,
  InsufficientCertificateLength,
  BetaOutOfRange,
  NegativeX,
  GammaTooLarge,
  MissingNorms,
  ZeroDenominator,
  TooFewSamples,
  ExponentOutOfRange,
  DegenerateGap,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure in the library is reported through this type; `code()` is the
// stable discriminator, `what()` carries the offending values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cramerlab
