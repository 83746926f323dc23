#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hashlotto {

enum class Errc {
  // chainparams
  ZeroMantissa,
  ExponentOutOfRange,
  NegativeTarget,
  Overflow,
  InvalidTarget,
  NonPositiveDifficulty,
  DifficultyTooLarge,
  ParseError,
  // economics
  EmptyTable,
  DominanceSumOutOfRange,
  // numerics
  BetaOutOfRange,
  InvalidQuery,
  RegimeUnavailable,
  TrialsTooSmall,
  // risk
  InvalidArgument,
  NonPositiveHashes,
  AlphaNotBelowOne,
  SearchBoundsExceeded,
  InfeasibleAllocation,
  DegenerateQuadratic,
  // cli
  ConfigError,
  FlagConflict,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace hashlotto
