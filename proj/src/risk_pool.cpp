#include "hashlotto/risk_pool.hpp"

#include "hashlotto/error.hpp"
#include "hashlotto/risk_direct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hashlotto {

const char* allocation_method_name(AllocationMethod m) noexcept {
  switch (m) {
    case AllocationMethod::CvQuadratic: return "cv";
    case AllocationMethod::QuantileNormal: return "quantile-normal";
    case AllocationMethod::QuantileExact: return "quantile-exact";
  }
  return "?";
}

void PoolSplit::validate() const {
  if (!(h_total >= 0.0) || !std::isfinite(h_total)) {
    throw Error(Errc::InvalidArgument, "H' must be >= 0");
  }
  if (!(n_pooled >= 0.0 && n_pooled <= h_total)) {
    throw Error(Errc::InvalidArgument, "N' must lie in [0, H']");
  }
  if (!(r_block > 0.0)) throw Error(Errc::InvalidArgument, "R must be > 0");
  if (!(r_pool >= 0.0) || !std::isfinite(r_pool)) {
    throw Error(Errc::InvalidArgument, "R' must be >= 0");
  }
}

void PoolProblem::validate() const {
  if (!(h_total > 0.0) || !std::isfinite(h_total)) {
    throw Error(Errc::NonPositiveHashes, "facility H' must be > 0");
  }
  if (!(p.p > 0.0 && p.p < 1.0)) throw Error(Errc::InvalidArgument, "p must lie in (0, 1)");
  if (!(machine_hashes > 0.0)) throw Error(Errc::InvalidArgument, "hashes per machine must be > 0");
  split(0.0).validate();
}

double pool_payout_from_realized(double realized_btc, std::int64_t machines,
                                 const HardwareSpec& hw, double horizon_s) {
  if (machines <= 0) throw Error(Errc::InvalidArgument, "machines must be > 0");
  if (!(realized_btc >= 0.0)) throw Error(Errc::InvalidArgument, "realized BTC must be >= 0");
  return realized_btc / (static_cast<double>(machines) * machine_hashes(hw, horizon_s));
}

double pool_payout_corrected() {
  return pool_payout_from_realized(5554.0, 88556, HardwareSpec{110.0, 29.5}, kSecondsPerYear);
}

PoolMoments pool_moments(const PoolSplit& split, HashProbability p) {
  split.validate();
  const double direct = split.h_total - split.n_pooled;
  PoolMoments m;
  m.mean = split.r_pool * split.n_pooled + split.r_block * direct * p.p;
  m.std = split.r_block * std::sqrt(direct * p.p * (1.0 - p.p));
  return m;
}

double pool_cv(const PoolSplit& split, HashProbability p) {
  const PoolMoments m = pool_moments(split, p);
  if (m.std == 0.0) return m.mean > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  if (!(m.mean > 0.0)) return std::numeric_limits<double>::infinity();
  return m.std / m.mean;
}

namespace {

// R' and Rp equal to rounding: the N'^2 coefficient vanishes.
bool same_rate(double r_pool_per_r, double p) {
  return std::abs(r_pool_per_r - p) <= 1e-12 * std::max(r_pool_per_r, p);
}

// Larger root of a x^2 + b x + c with a > 0 and c < 0, without cancellation.
double larger_root(const QuadraticCoefficients& q) {
  const double disc = q.b * q.b - 4.0 * q.a * q.c;
  if (!(disc >= 0.0)) {
    throw Error(Errc::DegenerateQuadratic,
                "negative discriminant with c < 0 (a=" + std::to_string(q.a) + ")");
  }
  const double s = std::sqrt(disc);
  if (q.b > 0.0) return 2.0 * q.c / (-q.b - s);
  return (-q.b + s) / (2.0 * q.a);
}

// Step n up by ulps until the constraint evaluates true, so that the
// returned allocation passes its own check in floating point.
template <typename Pred>
double settle_on_boundary(double n, double limit, Pred holds) {
  for (int i = 0; i < 4096 && n < limit && !holds(n); ++i) {
    n = std::nextafter(n, std::numeric_limits<double>::infinity());
  }
  return std::min(n, limit);
}

std::int64_t machines_for(double hashes, double machine_hashes) {
  return static_cast<std::int64_t>(std::ceil(hashes / machine_hashes));
}

AllocationResult finish_closed_form(const PoolProblem& problem, AllocationResult out,
                                    double root) {
  const double h = problem.h_total;
  // With R' = 0 pooling only removes revenue, so no split meets a bound
  // that direct mining misses.
  if (root > h || problem.r_pool == 0.0) {
    out.feasible = false;
    out.n_min = root;
    out.m_min = machines_for(std::min(root, h), problem.machine_hashes);
    return out;
  }
  out.n_min = std::max(0.0, root);
  out.m_min = machines_for(out.n_min, problem.machine_hashes);
  return out;
}

}  // namespace

AllocationResult cv_min_pool_allocation(const PoolProblem& problem, double theta) {
  problem.validate();
  if (!(theta > 0.0)) throw Error(Errc::InvalidArgument, "theta must be > 0");
  const double p = problem.p.p;
  const double R = problem.r_block;
  const double Rp = problem.r_pool;
  const double H = problem.h_total;
  const double t2 = theta * theta;

  AllocationResult out;
  out.method = AllocationMethod::CvQuadratic;
  out.coefficients.a = t2 * (Rp - R * p) * (Rp - R * p);
  out.coefficients.b = 2.0 * t2 * R * p * H * (Rp - R * p) + R * R * p * (1.0 - p);
  out.coefficients.c = t2 * R * R * p * p * H * H - R * R * p * (1.0 - p) * H;
  if (out.coefficients.c >= 0.0) return out;

  double root = 0.0;
  if (same_rate(Rp / R, p)) {
    out.linear = true;
    root = -out.coefficients.c / out.coefficients.b;
  } else {
    root = larger_root(out.coefficients);
  }
  out = finish_closed_form(problem, out, root);
  if (out.feasible && out.n_min > 0.0) {
    out.n_min = settle_on_boundary(out.n_min, H, [&](double n) {
      return pool_cv(problem.split(n), problem.p) <= theta;
    });
    out.m_min = machines_for(out.n_min, problem.machine_hashes);
  }
  return out;
}

double pool_shortfall_threshold(const PoolSplit& split, HashProbability p, double alpha) {
  const double direct = split.h_total - split.n_pooled;
  return alpha * direct * p.p + (alpha - 1.0) * split.n_pooled * split.r_pool / split.r_block;
}

double pool_shortfall_tail(const PoolSplit& split, HashProbability p, double alpha,
                           TailRegime regime) {
  split.validate();
  const double k = pool_shortfall_threshold(split, p, alpha);
  if (k <= 0.0) return 0.0;  // X' >= 0 always
  const double direct = split.h_total - split.n_pooled;
  if (direct <= 0.0) return 1.0;  // X' == 0 < k
  return binomial_tail_lt(TailQuery{direct, p.p, k, regime});
}

double pool_standardized_margin(const PoolSplit& split, HashProbability p, double alpha) {
  const double direct = split.h_total - split.n_pooled;
  const double level = direct * p.p + split.n_pooled * split.r_pool / split.r_block;
  const double sd = std::sqrt(direct * p.p * (1.0 - p.p));
  if (sd == 0.0) {
    return level > 0.0 ? std::copysign(std::numeric_limits<double>::infinity(), 1.0 - alpha)
                       : 0.0;
  }
  return (1.0 - alpha) * level / sd;
}

AllocationResult quantile_min_pool_allocation_normal(const PoolProblem& problem, double alpha,
                                                     double beta) {
  problem.validate();
  if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "alpha must be > 0");
  if (!(alpha < 1.0)) throw Error(Errc::AlphaNotBelowOne, "allocation needs alpha < 1");
  if (!(beta > 0.0 && beta < 0.5)) {
    throw Error(Errc::BetaOutOfRange, "allocation needs 0 < beta < 0.5");
  }
  const double p = problem.p.p;
  const double r = problem.r_pool / problem.r_block;
  const double H = problem.h_total;
  const double g2 = (1.0 - alpha) * (1.0 - alpha);
  const double z = std_normal_quantile(beta);
  const double z2 = z * z;

  AllocationResult out;
  out.method = AllocationMethod::QuantileNormal;
  out.coefficients.a = g2 * (p - r) * (p - r);
  out.coefficients.b = 2.0 * g2 * H * p * (r - p) + z2 * p * (1.0 - p);
  out.coefficients.c = g2 * p * p * H * H - z2 * p * (1.0 - p) * H;
  if (out.coefficients.c >= 0.0) return out;

  double root = 0.0;
  if (same_rate(r, p)) {
    out.linear = true;
    root = -out.coefficients.c / out.coefficients.b;
  } else {
    root = larger_root(out.coefficients);
  }
  out = finish_closed_form(problem, out, root);
  if (out.feasible && out.n_min > 0.0) {
    out.n_min = settle_on_boundary(out.n_min, H, [&](double n) {
      return pool_standardized_margin(problem.split(n), problem.p, alpha) >= -z;
    });
    out.m_min = machines_for(out.n_min, problem.machine_hashes);
  }
  return out;
}

AllocationResult quantile_min_pool_allocation_exact(const PoolProblem& problem, double alpha,
                                                    double beta) {
  problem.validate();
  if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "alpha must be > 0");
  if (!(alpha < 1.0)) throw Error(Errc::AlphaNotBelowOne, "allocation needs alpha < 1");
  if (!(beta > 0.0 && beta < 0.5)) {
    throw Error(Errc::BetaOutOfRange, "allocation needs 0 < beta < 0.5");
  }
  const double u = problem.machine_hashes;
  const double H = problem.h_total;
  const auto last = static_cast<std::int64_t>(std::ceil(H / u));
  auto pooled = [&](std::int64_t m) { return std::min(static_cast<double>(m) * u, H); };
  auto split_at = [&](std::int64_t m) { return problem.split(pooled(m)); };
  auto tail = [&](std::int64_t m) { return pool_shortfall_tail(split_at(m), problem.p, alpha); };
  auto index = [&](std::int64_t m) {
    return std::ceil(pool_shortfall_threshold(split_at(m), problem.p, alpha)) - 1.0;
  };

  AllocationResult out;
  out.method = AllocationMethod::QuantileExact;
  auto accept = [&](std::int64_t m) {
    out.m_min = m;
    out.n_min = pooled(m);
    out.tail_at_min = tail(m);
    if (problem.r_pool == 0.0 && out.n_min >= H) out.feasible = false;
    return out;
  };

  // The Gaussian regime has no lattice steps; walk machine by machine.
  const TailRegime regime = resolve_regime(TailQuery{H, problem.p.p, 1.0, TailRegime::Auto});
  if (regime == TailRegime::NormalApprox) {
    for (std::int64_t m = 0; m <= last; ++m) {
      if (tail(m) < beta) return accept(m);
    }
    out.feasible = false;
    out.m_min = last;
    out.n_min = H;
    return out;
  }

  // k(m) falls linearly in m with this slope per machine.
  const double slope = u * (alpha * problem.p.p + (1.0 - alpha) * problem.r_pool / problem.r_block);
  const double k0 = pool_shortfall_threshold(problem.split(0.0), problem.p, alpha);
  std::int64_t m = 0;
  while (m <= last) {
    if (tail(m) < beta) return accept(m);
    const double k = index(m);
    // First machine count whose threshold index drops below k.
    const double estimate = std::ceil((k0 - k) / slope);
    std::int64_t next = estimate >= static_cast<double>(last)
                            ? last
                            : std::max(m + 1, static_cast<std::int64_t>(estimate));
    while (next > m + 1 && index(next - 1) < k) --next;
    while (next < last && index(next) >= k) ++next;
    m = std::max(next, m + 1);
  }
  out.feasible = false;
  out.m_min = last;
  out.n_min = H;
  return out;
}

double upside_probability_pool(const PoolSplit& split, HashProbability p, double alpha) {
  split.validate();
  if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "alpha must be > 0");
  const double direct = split.h_total - split.n_pooled;
  if (direct <= 0.0) return alpha <= 1.0 ? 1.0 : 0.0;
  if (split.n_pooled == 0.0) return upside_probability(direct, p, alpha);
  const double level = direct * p.p + split.n_pooled * split.r_pool / split.r_block;
  const double z = (alpha - 1.0) * level / std::sqrt(direct * p.p * (1.0 - p.p));
  return std_normal_cdf(-z);
}

double upside_probability_pool_exact(const PoolSplit& split, HashProbability p, double alpha,
                                     TailRegime regime) {
  if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "alpha must be > 0");
  return 1.0 - pool_shortfall_tail(split, p, alpha, regime);
}

double pool_revenue_exceedance(const PoolSplit& split, HashProbability p, double revenue_btc) {
  const PoolMoments m = pool_moments(split, p);
  if (m.std == 0.0) return revenue_btc <= m.mean ? 1.0 : 0.0;
  return std_normal_cdf((m.mean - revenue_btc) / m.std);
}

}  // namespace hashlotto
