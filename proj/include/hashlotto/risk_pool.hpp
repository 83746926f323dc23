#pragma once

// Partial pooling: N' of a facility's H' hashes earn a deterministic R' per
// hash from a pool, the remaining H' - N' play the block lottery directly.
// Revenue is N' R' + R X' with X' ~ Binomial(H' - N', p).

#include "hashlotto/economics.hpp"
#include "hashlotto/numerics.hpp"

#include <cstdint>

namespace hashlotto {

struct PoolSplit {
  double h_total = 0.0;   ///< H', hashes
  double n_pooled = 0.0;  ///< N', hashes in [0, H']
  double r_pool = 0.0;    ///< R', BTC per pooled hash
  double r_block = 0.0;   ///< R, BTC per block

  void validate() const;
};

struct PoolMoments {
  double mean = 0.0;  ///< BTC
  double std = 0.0;   ///< BTC
};

/// Facility-level inputs shared by the allocation solvers.
struct PoolProblem {
  double h_total = 0.0;
  HashProbability p;
  double r_block = 0.0;
  double r_pool = 0.0;
  double machine_hashes = 0.0;  ///< granularity of the exact search and of m_min

  PoolSplit split(double n_pooled) const { return {h_total, n_pooled, r_pool, r_block}; }
  void validate() const;
};

struct QuadraticCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

enum class AllocationMethod { CvQuadratic, QuantileNormal, QuantileExact };

const char* allocation_method_name(AllocationMethod m) noexcept;

struct AllocationResult {
  double n_min = 0.0;        ///< pooled hashes
  std::int64_t m_min = 0;    ///< pooled machines, ceil(n_min / machine_hashes)
  QuadraticCoefficients coefficients;  ///< closed forms only
  bool feasible = true;
  bool linear = false;       ///< R' == R p: the quadratic degenerated to a line
  AllocationMethod method = AllocationMethod::CvQuadratic;
  double tail_at_min = 0.0;  ///< exact search only
};

/// "paper" preset for R' (BTC/hash). Tenfold above what the Riot 2022
/// figures give; kept so the reference allocation table replicates.
inline constexpr double kPoolPayoutPaper = 1.78e-22;

/// realized_btc / (machines * eta_h * 1e12 * horizon).
double pool_payout_from_realized(double realized_btc, std::int64_t machines,
                                 const HardwareSpec& hw, double horizon_s);

/// R' from Riot Platforms 2022: 5,554 BTC over 88,556 machines at 110 TH/s
/// for a 365-day year, about 1.81e-23 BTC/hash.
double pool_payout_corrected();

PoolMoments pool_moments(const PoolSplit& split, HashProbability p);

/// std / mean of the split's revenue.
double pool_cv(const PoolSplit& split, HashProbability p);

/// Smallest N' with CV <= theta: larger root of
///   a N'^2 + b N' + c >= 0,
///   a = theta^2 (R' - Rp)^2
///   b = 2 theta^2 R p H' (R' - Rp) + R^2 p (1-p)
///   c = theta^2 R^2 p^2 H'^2 - R^2 p (1-p) H'
/// clipped at zero. Zero when direct mining already meets the bound.
AllocationResult cv_min_pool_allocation(const PoolProblem& problem, double theta);

/// Revenue floor in direct-share successes: alpha (H'-N') p + (alpha-1) N' R'/R.
double pool_shortfall_threshold(const PoolSplit& split, HashProbability p, double alpha);

/// P(X' < threshold) via binomial_tail_lt.
double pool_shortfall_tail(const PoolSplit& split, HashProbability p, double alpha,
                           TailRegime regime = TailRegime::Auto);

/// (1-alpha) [(H'-N') p + N' R'/R] / sqrt((H'-N') p (1-p)); the normal
/// constraint is this >= -z_beta. Infinite at full pooling.
double pool_standardized_margin(const PoolSplit& split, HashProbability p, double alpha);

/// Smallest N' meeting the normal-approximation quantile constraint. Larger
/// root of a' N'^2 + b' N' + c' >= 0, with r = R'/R:
///   a' = (1-alpha)^2 (p - r)^2
///   b' = 2 (1-alpha)^2 H' p (r - p) + z^2 p (1-p)
///   c' = (1-alpha)^2 p^2 H'^2 - z^2 p (1-p) H'
AllocationResult quantile_min_pool_allocation_normal(const PoolProblem& problem, double alpha,
                                                     double beta);

/// Smallest whole number of pooled machines with pool_shortfall_tail < beta.
///
/// The threshold index ceil(k) - 1 falls in steps as machines move into the
/// pool, and between steps the tail rises (fewer direct hashes at a fixed
/// index). Each block of constant index therefore attains its minimum at its
/// first machine count, so only block starts are evaluated.
AllocationResult quantile_min_pool_allocation_exact(const PoolProblem& problem, double alpha,
                                                    double beta);

/// P(pi' >= alpha E[pi']) under the normal approximation. At full pooling
/// revenue is deterministic: 1 for alpha <= 1, else 0.
double upside_probability_pool(const PoolSplit& split, HashProbability p, double alpha);

/// 1 - pool_shortfall_tail.
double upside_probability_pool_exact(const PoolSplit& split, HashProbability p, double alpha,
                                     TailRegime regime = TailRegime::Auto);

/// P(N'R' + R X' >= revenue_btc) under the normal approximation; a step at
/// R'H' when fully pooled.
double pool_revenue_exceedance(const PoolSplit& split, HashProbability p, double revenue_btc);

}  // namespace hashlotto
