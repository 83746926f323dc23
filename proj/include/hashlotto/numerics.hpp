#pragma once

// Tail-probability engine for X ~ Binomial(n, p): three evaluation regimes
// plus a seeded Monte Carlo estimator used as an independent oracle.

#include <cstdint>
#include <optional>

namespace hashlotto {

enum class TailRegime { Auto, ExactSum, PoissonGamma, NormalApprox };

const char* regime_name(TailRegime r) noexcept;

/// P(X < k) for X ~ Binomial(n, p). n is real-valued so that fleet-scale
/// hash counts (~1e26) can be expressed; ExactSum requires an integral n.
struct TailQuery {
  double n = 0.0;
  double p = 0.0;
  double k = 0.0;
  TailRegime regime = TailRegime::Auto;
};

inline constexpr double kExactSumAutoLimit = 1e6;
inline constexpr double kExactSumForcedLimit = 1e7;
inline constexpr double kPoissonAutoBound = 1e-6;  ///< max n p^2 for auto Poisson

double std_normal_cdf(double z);

/// Inverse of std_normal_cdf on (0, 1).
double std_normal_quantile(double beta);

/// Regime Auto resolves to: ExactSum when n <= 1e6, PoissonGamma when
/// n p^2 <= 1e-6, NormalApprox otherwise.
TailRegime resolve_regime(const TailQuery& q);

/// P(X < k) = P(X <= ceil(k) - 1). NormalApprox is Phi((k - np)/sqrt(np(1-p)))
/// with no continuity correction.
double binomial_tail_lt(const TailQuery& q);

enum class McMode { Auto, Binomial, Poisson };

struct McConfig {
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 0;
  McMode mode = McMode::Auto;
  unsigned threads = 1;  ///< 0 = hardware concurrency; result does not depend on it
};

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;  ///< binomial standard error of the frequency
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
};

inline constexpr std::uint64_t kMcMinTrials = 100;
inline constexpr std::uint64_t kMcChunk = 4096;

/// Frequency estimate of P(X < k). Binomial sampling needs an integral
/// n <= 1e7; Poisson mode samples X ~ Poisson(np). Auto picks Binomial when
/// allowed. Trials are split into fixed chunks, each with its own stream
/// derived from (seed, chunk index), so the result is bit-identical for any
/// thread count.
McEstimate mc_tail_estimate(const TailQuery& q, const McConfig& cfg);

}  // namespace hashlotto
