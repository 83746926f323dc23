#include "hashlotto/error.hpp"

namespace hashlotto {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::ZeroMantissa: return "ZeroMantissa";
    case Errc::ExponentOutOfRange: return "ExponentOutOfRange";
    case Errc::NegativeTarget: return "NegativeTarget";
    case Errc::Overflow: return "Overflow";
    case Errc::InvalidTarget: return "InvalidTarget";
    case Errc::NonPositiveDifficulty: return "NonPositiveDifficulty";
    case Errc::DifficultyTooLarge: return "DifficultyTooLarge";
    case Errc::ParseError: return "ParseError";
    case Errc::EmptyTable: return "EmptyTable";
    case Errc::DominanceSumOutOfRange: return "DominanceSumOutOfRange";
    case Errc::BetaOutOfRange: return "BetaOutOfRange";
    case Errc::InvalidQuery: return "InvalidQuery";
    case Errc::RegimeUnavailable: return "RegimeUnavailable";
    case Errc::TrialsTooSmall: return "TrialsTooSmall";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonPositiveHashes: return "NonPositiveHashes";
    case Errc::AlphaNotBelowOne: return "AlphaNotBelowOne";
    case Errc::SearchBoundsExceeded: return "SearchBoundsExceeded";
    case Errc::InfeasibleAllocation: return "InfeasibleAllocation";
    case Errc::DegenerateQuadratic: return "DegenerateQuadratic";
    case Errc::ConfigError: return "ConfigError";
    case Errc::FlagConflict: return "FlagConflict";
  }
  return "Unknown";
}

}  // namespace hashlotto
