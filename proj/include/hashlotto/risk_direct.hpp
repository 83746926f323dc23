#pragma once

// Fleet sizing for direct (unpooled) mining under a coefficient-of-variation
// bound or a beta-quantile revenue floor, and upside probabilities.

#include "hashlotto/economics.hpp"
#include "hashlotto/numerics.hpp"

#include <cstdint>
#include <string>

namespace hashlotto {

struct RiskSpec {
  double theta = 0.0;  ///< CV threshold
  double alpha = 0.0;  ///< revenue floor as a fraction of the mean
  double beta = 0.0;   ///< tolerated tail probability
};

enum class SizingMethod { CvClosedForm, QuantileNormal, QuantileExact };

const char* sizing_method_name(SizingMethod m) noexcept;

struct SizingResult {
  double h_min = 0.0;        ///< hashes; before rounding up to whole machines
  std::int64_t m_min = 0;    ///< ceil(h_min / machine_hashes)
  SizingMethod method = SizingMethod::CvClosedForm;
  double tail_at_min = 0.0;  ///< exact search only: P(X < alpha n p) at m_min
  std::string warning;
};

/// sqrt((1-p) / (h p)).
double cv_value(double hashes, HashProbability p);

/// h_min = (1-p) / (theta^2 p).
SizingResult cv_min_fleet(double theta, HashProbability p, double machine_hashes);
SizingResult cv_min_fleet(const RiskSpec& spec, HashProbability p, const HardwareSpec& hw,
                          double horizon_s);

/// h_min = z_beta^2 (1-p) / ((1-alpha)^2 p). For beta >= 0.5 returns zero
/// with a warning, since the floor is met at the median already.
SizingResult quantile_min_fleet_normal(double alpha, double beta, HashProbability p,
                                       double machine_hashes);
SizingResult quantile_min_fleet_normal(const RiskSpec& spec, HashProbability p,
                                       const HardwareSpec& hw, double horizon_s);

/// P(X < alpha n p) for a fleet of `machines`, X ~ Binomial(n, p).
double direct_shortfall_tail(std::int64_t machines, double alpha, HashProbability p,
                             double machine_hashes, TailRegime regime = TailRegime::Auto);

/// Smallest machine count M with direct_shortfall_tail(M) < beta.
///
/// The threshold ceil(alpha n p) - 1 steps up as M grows, so the tail is a
/// sawtooth in M rather than monotone. The search walks the blocks of
/// constant threshold: inside a block the tail falls with M, so each block
/// is tested at its last machine count and bisected once a block passes.
/// The answer therefore passes while M - 1 fails. Throws
/// SearchBoundsExceeded if nothing passes up to 4x the normal estimate.
SizingResult quantile_min_fleet_exact(double alpha, double beta, HashProbability p,
                                      double machine_hashes);
SizingResult quantile_min_fleet_exact(const RiskSpec& spec, HashProbability p,
                                      const HardwareSpec& hw, double horizon_s);

/// Normal approximation of P(X >= alpha h p): 1 - Phi((alpha-1) sqrt(hp/(1-p))).
double upside_probability(double hashes, HashProbability p, double alpha);

/// Same event through binomial_tail_lt.
double upside_probability_exact(double hashes, HashProbability p, double alpha,
                                TailRegime regime = TailRegime::Auto);

/// P(R X >= revenue) under the normal approximation, with R the block
/// reward in dollars.
double revenue_exceedance(double hashes, HashProbability p, double reward_usd, double revenue);

/// P(R X - cost >= profit). Cost is deterministic, so this is the revenue
/// exceedance at profit + cost.
double profit_exceedance(double hashes, HashProbability p, double reward_usd, double cost,
                         double profit);

}  // namespace hashlotto
