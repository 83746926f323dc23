#include "oracles.hpp"

#include <cmath>
#include <cstdio>

namespace oracle {

long double binom_cdf(std::int64_t n, long double p, std::int64_t k) {
  if (k < 0) return 0.0L;
  if (k >= n) return 1.0L;
  const long double lq = std::log1p(-p);
  const long double lp = std::log(p);
  const long double ln_fact_n = std::lgamma(static_cast<long double>(n) + 1.0L);
  long double sum = 0.0L;
  for (std::int64_t i = 0; i <= k; ++i) {
    const long double li = static_cast<long double>(i);
    const long double log_term = ln_fact_n - std::lgamma(li + 1.0L) -
                                 std::lgamma(static_cast<long double>(n - i) + 1.0L) + li * lp +
                                 static_cast<long double>(n - i) * lq;
    sum += std::exp(log_term);
  }
  return sum > 1.0L ? 1.0L : sum;
}

long double binom_lt(std::int64_t n, long double p, double k) {
  return binom_cdf(n, p, static_cast<std::int64_t>(std::ceil(k)) - 1);
}

long double poisson_cdf(long double lambda, std::int64_t k) {
  if (k < 0) return 0.0L;
  long double term = std::exp(-lambda);
  long double sum = term;
  for (std::int64_t i = 1; i <= k; ++i) {
    term *= lambda / static_cast<long double>(i);
    sum += term;
  }
  return sum;
}

long double normal_cdf(long double z) { return 0.5L * std::erfc(-z / std::sqrt(2.0L)); }

double normal_quantile(double beta) {
  long double lo = -40.0L;
  long double hi = 40.0L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (normal_cdf(mid) < beta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return static_cast<double>(0.5L * (lo + hi));
}

std::int64_t direct_min_fleet(double alpha, double beta, double p, std::int64_t u,
                              std::int64_t max_machines) {
  for (std::int64_t m = 1; m <= max_machines; ++m) {
    const double n = static_cast<double>(m * u);
    if (binom_lt(m * u, p, alpha * n * p) < beta) return m;
  }
  return -1;
}

long double pool_tail(std::int64_t h_total, std::int64_t n_pooled, double p, double r_ratio,
                      double alpha) {
  const std::int64_t direct = h_total - n_pooled;
  const double k = alpha * static_cast<double>(direct) * p +
                   (alpha - 1.0) * static_cast<double>(n_pooled) * r_ratio;
  if (k <= 0.0) return 0.0L;
  if (direct == 0) return 1.0L;
  return binom_lt(direct, p, k);
}

std::int64_t pool_min_machines(std::int64_t h_total, std::int64_t u, double p, double r_ratio,
                               double alpha, double beta) {
  for (std::int64_t m = 0; m * u <= h_total; ++m) {
    if (pool_tail(h_total, m * u, p, r_ratio, alpha) < beta) return m;
  }
  return -1;
}

std::string compact_target_hex(std::uint32_t bits) {
  const unsigned exponent = bits >> 24;
  const unsigned mantissa = bits & 0xffffffu;
  char m[7];
  std::snprintf(m, sizeof m, "%06x", mantissa);
  // mantissa occupies bytes [exponent-3, exponent) counted from the low end
  std::string hex(64, '0');
  const int low_byte = static_cast<int>(exponent) - 3;
  for (int i = 0; i < 6; ++i) {
    const int pos = 64 - 2 * (low_byte + 3) + i;
    if (pos >= 0 && pos < 64) hex[pos] = m[i];
  }
  return hex;
}

long double hex_value(const std::string& hex) {
  long double v = 0.0L;
  for (const char c : hex) {
    const int d = c <= '9' ? c - '0' : c - 'a' + 10;
    v = v * 16.0L + d;
  }
  return v;
}

}  // namespace oracle
