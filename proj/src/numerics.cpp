#include "hashlotto/numerics.hpp"

#include "hashlotto/error.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/binomial_distribution.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace hashlotto {

const char* regime_name(TailRegime r) noexcept {
  switch (r) {
    case TailRegime::Auto: return "auto";
    case TailRegime::ExactSum: return "exact-sum";
    case TailRegime::PoissonGamma: return "poisson-gamma";
    case TailRegime::NormalApprox: return "normal";
  }
  return "?";
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double std_normal_quantile(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(Errc::BetaOutOfRange, "quantile needs 0 < beta < 1, got " + std::to_string(beta));
  }
  // Acklam's rational approximation (relative error ~1.15e-9)...
  static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                           -2.759285104469687e+02, 1.383577518672690e+02,
                                           -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                           -1.556989798598866e+02, 6.680131188771972e+01,
                                           -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                           -2.400758277161838e+00, -2.549671010135200e+00,
                                           4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                           2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  constexpr double high = 1.0 - low;

  double x = 0.0;
  if (beta < low) {
    const double q = std::sqrt(-2.0 * std::log(beta));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (beta <= high) {
    const double q = beta - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-beta));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // ...then one Halley step against the erfc-based CDF.
  const double e = std_normal_cdf(x) - beta;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

namespace {

void validate(const TailQuery& q) {
  if (!(q.n > 0.0) || !std::isfinite(q.n)) throw Error(Errc::InvalidQuery, "n must be > 0");
  if (!(q.p > 0.0 && q.p < 1.0)) throw Error(Errc::InvalidQuery, "p must lie in (0, 1)");
  if (!(q.k >= 0.0) || !std::isfinite(q.k)) throw Error(Errc::InvalidQuery, "k must be >= 0");
}

// Largest integer strictly below k.
double strict_floor(double k) { return std::ceil(k) - 1.0; }

// Starting term of the sum. A difference of lgamma values loses about
// log10(n) digits at n = 1e6; Boost's pdf does not.
double binomial_pmf(double n, double i, double p) {
  return boost::math::pdf(boost::math::binomial_distribution<double>(n, p), i);
}

// P(X <= K). Sums whichever tail lies away from the mode so the terms
// shrink geometrically from the starting point.
double exact_sum_cdf(double n, double p, double kmax) {
  if (kmax < 0.0) return 0.0;
  if (kmax >= n) return 1.0;
  const double mode = std::floor((n + 1.0) * p);
  const double odds = p / (1.0 - p);
  constexpr double kTiny = 1e-18;

  if (kmax < mode) {
    double term = binomial_pmf(n, kmax, p);
    double sum = 0.0;
    for (double i = kmax; i >= 0.0 && term > 0.0; i -= 1.0) {
      sum += term;
      if (term < sum * kTiny) break;
      term *= i / ((n - i + 1.0) * odds);
    }
    return std::min(sum, 1.0);
  }
  double term = binomial_pmf(n, kmax + 1.0, p);
  double upper = 0.0;
  for (double i = kmax + 1.0; i <= n && term > 0.0; i += 1.0) {
    upper += term;
    if (term < upper * kTiny) break;
    term *= (n - i) / (i + 1.0) * odds;
  }
  return std::clamp(1.0 - upper, 0.0, 1.0);
}

double poisson_gamma_cdf(double lambda, double kmax) {
  if (kmax < 0.0) return 0.0;
  return boost::math::gamma_q(kmax + 1.0, lambda);
}

double normal_tail(double n, double p, double k) {
  const double mean = n * p;
  const double sd = std::sqrt(n * p * (1.0 - p));
  return std_normal_cdf((k - mean) / sd);
}

}  // namespace

TailRegime resolve_regime(const TailQuery& q) {
  if (q.regime != TailRegime::Auto) return q.regime;
  if (q.n <= kExactSumAutoLimit && q.n == std::floor(q.n)) return TailRegime::ExactSum;
  if (q.n * q.p * q.p <= kPoissonAutoBound) return TailRegime::PoissonGamma;
  return TailRegime::NormalApprox;
}

double binomial_tail_lt(const TailQuery& q) {
  validate(q);
  switch (resolve_regime(q)) {
    case TailRegime::ExactSum:
      if (q.n > kExactSumForcedLimit) {
        throw Error(Errc::RegimeUnavailable, "n = " + std::to_string(q.n) + " too large for exact sum");
      }
      if (q.n != std::floor(q.n)) {
        throw Error(Errc::RegimeUnavailable, "exact sum needs an integral n");
      }
      return exact_sum_cdf(q.n, q.p, strict_floor(q.k));
    case TailRegime::PoissonGamma:
      return poisson_gamma_cdf(q.n * q.p, strict_floor(q.k));
    case TailRegime::NormalApprox:
    case TailRegime::Auto:
      break;
  }
  return normal_tail(q.n, q.p, q.k);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(chunk + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

McEstimate mc_tail_estimate(const TailQuery& q, const McConfig& cfg) {
  validate(q);
  if (cfg.trials < kMcMinTrials) {
    throw Error(Errc::TrialsTooSmall,
                "need at least " + std::to_string(kMcMinTrials) + " trials, got " +
                    std::to_string(cfg.trials));
  }
  const bool binomial_ok = q.n <= kExactSumForcedLimit && q.n == std::floor(q.n);
  McMode mode = cfg.mode;
  if (mode == McMode::Auto) mode = binomial_ok ? McMode::Binomial : McMode::Poisson;
  if (mode == McMode::Binomial && !binomial_ok) {
    throw Error(Errc::RegimeUnavailable, "binomial sampling needs an integral n <= 1e7");
  }

  const std::uint64_t chunks = (cfg.trials + kMcChunk - 1) / kMcChunk;
  auto run_chunk = [&](std::uint64_t chunk) {
    auto engine = chunk_engine(cfg.seed, chunk);
    const std::uint64_t begin = chunk * kMcChunk;
    const std::uint64_t count = std::min(kMcChunk, cfg.trials - begin);
    std::uint64_t hits = 0;
    if (mode == McMode::Binomial) {
      // libstdc++'s binomial sampler is biased at moderate n p (about 1% low on
      // P(X <= 8) for n = 1e4, p = 1e-3); Boost's BTRD sampler is not.
      boost::random::binomial_distribution<std::int64_t, double> dist(
          static_cast<std::int64_t>(q.n), q.p);
      for (std::uint64_t t = 0; t < count; ++t) hits += static_cast<double>(dist(engine)) < q.k;
    } else {
      std::poisson_distribution<std::int64_t> dist(q.n * q.p);
      for (std::uint64_t t = 0; t < count; ++t) hits += static_cast<double>(dist(engine)) < q.k;
    }
    return hits;
  };

  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
  std::vector<std::uint64_t> partial(threads, 0);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t c = w; c < chunks; c += threads) partial[w] += run_chunk(c);
      });
    }
    for (std::uint64_t c = 0; c < chunks; c += threads) partial[0] += run_chunk(c);
  }

  McEstimate out;
  out.trials = cfg.trials;
  for (auto h : partial) out.hits += h;
  out.estimate = static_cast<double>(out.hits) / static_cast<double>(out.trials);
  out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(out.trials));
  return out;
}

}  // namespace hashlotto
