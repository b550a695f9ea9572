#include "cramerlab/error.hpp"

namespace cramerlab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonStochasticRow: return "NonStochasticRow";
    case ErrorCode::ReducibleChain: return "ReducibleChain";
    case ErrorCode::PeriodicChain: return "PeriodicChain";
    case ErrorCode::DegeneratePayoff: return "DegeneratePayoff";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::UnknownBuiltin: return "UnknownBuiltin";
    case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorCode::SampledTierUnsupported: return "SampledTierUnsupported";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TrajectoryTooShort: return "TrajectoryTooShort";
    case ErrorCode::NestedEstimateUnavailable: return "NestedEstimateUnavailable";
    case ErrorCode::NoDecayCertificate: return "NoDecayCertificate";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::InsufficientCertificateLength: return "InsufficientCertificateLength";
    case ErrorCode::BetaOutOfRange: return "BetaOutOfRange";
    case ErrorCode::NegativeX: return "NegativeX";
    case ErrorCode::GammaTooLarge: return "GammaTooLarge";
    case ErrorCode::MissingNorms: return "MissingNorms";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ExponentOutOfRange: return "ExponentOutOfRange";
    case ErrorCode::DegenerateGap: return "DegenerateGap";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace cramerlab
