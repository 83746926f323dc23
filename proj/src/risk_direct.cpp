#include "hashlotto/risk_direct.hpp"

#include "hashlotto/error.hpp"

#include <algorithm>
#include <cmath>

namespace hashlotto {

const char* sizing_method_name(SizingMethod m) noexcept {
  switch (m) {
    case SizingMethod::CvClosedForm: return "cv";
    case SizingMethod::QuantileNormal: return "quantile-normal";
    case SizingMethod::QuantileExact: return "quantile-exact";
  }
  return "?";
}

namespace {

void check_probability(HashProbability p) {
  if (!(p.p > 0.0 && p.p < 1.0)) throw Error(Errc::InvalidArgument, "p must lie in (0, 1)");
}

void check_machine_hashes(double machine_hashes) {
  if (!(machine_hashes > 0.0) || !std::isfinite(machine_hashes)) {
    throw Error(Errc::InvalidArgument, "hashes per machine must be > 0");
  }
}

void check_sizing_alpha_beta(double alpha, double beta) {
  if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "alpha must be > 0");
  if (!(alpha < 1.0)) throw Error(Errc::AlphaNotBelowOne, "sizing needs alpha < 1");
  if (!(beta > 0.0 && beta < 1.0)) throw Error(Errc::BetaOutOfRange, "beta must lie in (0, 1)");
}

std::int64_t machines_for(double hashes, double machine_hashes) {
  return static_cast<std::int64_t>(std::ceil(hashes / machine_hashes));
}

constexpr const char* kMedianWarning = "beta >= 0.5: floor already met at the median, no sizing";

}  // namespace

double cv_value(double hashes, HashProbability p) {
  if (!(hashes > 0.0)) throw Error(Errc::NonPositiveHashes, "CV needs h > 0");
  check_probability(p);
  return std::sqrt((1.0 - p.p) / (hashes * p.p));
}

SizingResult cv_min_fleet(double theta, HashProbability p, double machine_hashes) {
  if (!(theta > 0.0)) throw Error(Errc::InvalidArgument, "theta must be > 0");
  check_probability(p);
  check_machine_hashes(machine_hashes);
  SizingResult out;
  out.method = SizingMethod::CvClosedForm;
  out.h_min = (1.0 - p.p) / (theta * theta * p.p);
  out.m_min = machines_for(out.h_min, machine_hashes);
  return out;
}

SizingResult cv_min_fleet(const RiskSpec& spec, HashProbability p, const HardwareSpec& hw,
                          double horizon_s) {
  return cv_min_fleet(spec.theta, p, machine_hashes(hw, horizon_s));
}

SizingResult quantile_min_fleet_normal(double alpha, double beta, HashProbability p,
                                       double machine_hashes) {
  check_sizing_alpha_beta(alpha, beta);
  check_probability(p);
  check_machine_hashes(machine_hashes);
  SizingResult out;
  out.method = SizingMethod::QuantileNormal;
  if (beta >= 0.5) {
    out.warning = kMedianWarning;
    return out;
  }
  const double z = std_normal_quantile(beta);
  const double gap = 1.0 - alpha;
  out.h_min = z * z * (1.0 - p.p) / (gap * gap * p.p);
  out.m_min = machines_for(out.h_min, machine_hashes);
  return out;
}

SizingResult quantile_min_fleet_normal(const RiskSpec& spec, HashProbability p,
                                       const HardwareSpec& hw, double horizon_s) {
  return quantile_min_fleet_normal(spec.alpha, spec.beta, p, machine_hashes(hw, horizon_s));
}

double direct_shortfall_tail(std::int64_t machines, double alpha, HashProbability p,
                             double machine_hashes, TailRegime regime) {
  const double n = static_cast<double>(machines) * machine_hashes;
  return binomial_tail_lt(TailQuery{n, p.p, alpha * n * p.p, regime});
}

namespace {

// Threshold index K(M) = ceil(alpha n p) - 1, computed the same way the
// tail query computes it.
double threshold_index(std::int64_t machines, double alpha, HashProbability p,
                       double machine_hashes) {
  const double n = static_cast<double>(machines) * machine_hashes;
  return std::ceil(alpha * n * p.p) - 1.0;
}

}  // namespace

SizingResult quantile_min_fleet_exact(double alpha, double beta, HashProbability p,
                                      double machine_hashes) {
  const SizingResult normal = quantile_min_fleet_normal(alpha, beta, p, machine_hashes);
  SizingResult out;
  out.method = SizingMethod::QuantileExact;
  if (!normal.warning.empty()) {
    out.warning = normal.warning;
    return out;
  }
  const std::int64_t upper = std::max<std::int64_t>(4 * normal.m_min, 8);
  auto tail = [&](std::int64_t m) { return direct_shortfall_tail(m, alpha, p, machine_hashes); };

  std::int64_t block_start = 1;
  while (block_start <= upper) {
    const double k = threshold_index(block_start, alpha, p, machine_hashes);
    // Last machine count sharing this threshold index.
    const double estimate = std::floor((k + 1.0) / (alpha * machine_hashes * p.p));
    std::int64_t block_end =
        estimate >= static_cast<double>(upper) ? upper : static_cast<std::int64_t>(estimate);
    block_end = std::max(block_end, block_start);
    while (block_end > block_start &&
           threshold_index(block_end, alpha, p, machine_hashes) > k) {
      --block_end;
    }
    while (block_end < upper && threshold_index(block_end + 1, alpha, p, machine_hashes) <= k) {
      ++block_end;
    }
    block_end = std::min(block_end, upper);

    if (tail(block_end) < beta) {
      std::int64_t lo = block_start;
      std::int64_t hi = block_end;
      while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (tail(mid) < beta) {
          hi = mid;
        } else {
          lo = mid + 1;
        }
      }
      out.m_min = lo;
      out.h_min = static_cast<double>(lo) * machine_hashes;
      out.tail_at_min = tail(lo);
      return out;
    }
    block_start = block_end + 1;
  }
  throw Error(Errc::SearchBoundsExceeded,
              "no fleet up to " + std::to_string(upper) + " machines meets the constraint");
}

SizingResult quantile_min_fleet_exact(const RiskSpec& spec, HashProbability p,
                                      const HardwareSpec& hw, double horizon_s) {
  return quantile_min_fleet_exact(spec.alpha, spec.beta, p, machine_hashes(hw, horizon_s));
}

double upside_probability(double hashes, HashProbability p, double alpha) {
  if (!(hashes > 0.0)) throw Error(Errc::NonPositiveHashes, "upside needs h > 0");
  if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "alpha must be > 0");
  check_probability(p);
  const double z = (alpha - 1.0) * std::sqrt(hashes * p.p / (1.0 - p.p));
  return std_normal_cdf(-z);
}

double upside_probability_exact(double hashes, HashProbability p, double alpha,
                                TailRegime regime) {
  if (!(hashes > 0.0)) throw Error(Errc::NonPositiveHashes, "upside needs h > 0");
  if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "alpha must be > 0");
  return 1.0 - binomial_tail_lt(TailQuery{hashes, p.p, alpha * hashes * p.p, regime});
}

double revenue_exceedance(double hashes, HashProbability p, double reward_usd, double revenue) {
  if (!(hashes > 0.0)) throw Error(Errc::NonPositiveHashes, "exceedance needs h > 0");
  check_probability(p);
  if (!(reward_usd > 0.0)) throw Error(Errc::InvalidArgument, "reward must be > 0");
  const double mean = hashes * p.p * reward_usd;
  const double sd = reward_usd * std::sqrt(hashes * p.p * (1.0 - p.p));
  return std_normal_cdf((mean - revenue) / sd);
}

double profit_exceedance(double hashes, HashProbability p, double reward_usd, double cost,
                         double profit) {
  return revenue_exceedance(hashes, p, reward_usd, profit + cost);
}

}  // namespace hashlotto
