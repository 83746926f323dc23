#include "hashlotto/error.hpp"
#include "hashlotto/numerics.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace hashlotto;

TEST_CASE("normal CDF and quantile against bisection") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std_normal_quantile(0.05) == doctest::Approx(oracle::normal_quantile(0.05)).epsilon(1e-12));
  CHECK(std_normal_quantile(0.05) == doctest::Approx(-1.6448536269514722).epsilon(1e-12));
  for (const double beta : {1e-12, 1e-6, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.97575, 0.999}) {
    CAPTURE(beta);
    CHECK(std_normal_quantile(beta) == doctest::Approx(oracle::normal_quantile(beta)).epsilon(1e-13));
  }
  CHECK(std_normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("quantile rejects beta outside (0, 1)") {
  for (const double beta : {0.0, 1.0, -0.1, 1.5, std::nan("")}) {
    try {
      std_normal_quantile(beta);
      FAIL("expected BetaOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::BetaOutOfRange);
    }
  }
}

TEST_CASE("exact sum, small case") {
  // P(X < 5) for Binomial(10, 1/2) = 386 / 1024.
  CHECK(binomial_tail_lt(TailQuery{10, 0.5, 5, TailRegime::ExactSum}) ==
        doctest::Approx(0.376953125).epsilon(1e-15));
  CHECK(binomial_tail_lt(TailQuery{10, 0.5, 4.5, TailRegime::ExactSum}) ==
        doctest::Approx(0.376953125).epsilon(1e-15));
  CHECK(binomial_tail_lt(TailQuery{10, 0.5, 0, TailRegime::ExactSum}) == 0.0);
  CHECK(binomial_tail_lt(TailQuery{10, 0.5, 11, TailRegime::ExactSum}) == doctest::Approx(1.0));
}

TEST_CASE("strict inequality: the i = 0 term is included, the k term is not") {
  // P(X < 1) = (1-p)^n
  CHECK(binomial_tail_lt(TailQuery{20, 0.1, 1, TailRegime::ExactSum}) ==
        doctest::Approx(std::pow(0.9, 20)).epsilon(1e-14));
  CHECK(binomial_tail_lt(TailQuery{20, 0.1, 0.5, TailRegime::ExactSum}) ==
        doctest::Approx(std::pow(0.9, 20)).epsilon(1e-14));
}

TEST_CASE("exact sum against the long double oracle") {
  struct Case {
    std::int64_t n;
    double p;
    double k;
  };
  for (const Case c : {Case{10000, 1e-3, 9}, Case{1000000, 1e-4, 90}, Case{500, 0.3, 140},
                       Case{500, 0.3, 170}, Case{50000, 0.5, 25100}, Case{3, 0.999, 2}}) {
    CAPTURE(c.n);
    CAPTURE(c.k);
    const double want = static_cast<double>(oracle::binom_lt(c.n, c.p, c.k));
    CHECK(binomial_tail_lt(TailQuery{static_cast<double>(c.n), c.p, c.k, TailRegime::ExactSum}) ==
          doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("Poisson regime against the Poisson oracle") {
  for (const double lambda : {0.5, 14.1, 300.0}) {
    for (const double mult : {0.5, 0.95, 1.1}) {
      const double n = 1e26;
      const double k = mult * lambda;
      const double want = static_cast<double>(
          oracle::poisson_cdf(lambda, static_cast<std::int64_t>(std::ceil(k)) - 1));
      CHECK(binomial_tail_lt(TailQuery{n, lambda / n, k, TailRegime::PoissonGamma}) ==
            doctest::Approx(want).epsilon(1e-10));
    }
  }
}

TEST_CASE("normal regime has no continuity correction") {
  const double n = 1e6;
  const double p = 0.3;
  const double k = 300100;
  const double z = (k - n * p) / std::sqrt(n * p * (1 - p));
  CHECK(binomial_tail_lt(TailQuery{n, p, k, TailRegime::NormalApprox}) ==
        doctest::Approx(static_cast<double>(oracle::normal_cdf(z))).epsilon(1e-13));
}

TEST_CASE("auto regime selection") {
  CHECK(resolve_regime(TailQuery{1e6, 0.1, 1}) == TailRegime::ExactSum);
  CHECK(resolve_regime(TailQuery{1e6 + 1, 1e-7, 1}) == TailRegime::PoissonGamma);
  CHECK(resolve_regime(TailQuery{3.5e26, 4e-24, 1}) == TailRegime::PoissonGamma);
  CHECK(resolve_regime(TailQuery{1e8, 0.1, 1}) == TailRegime::NormalApprox);
  CHECK(resolve_regime(TailQuery{10, 0.1, 1, TailRegime::NormalApprox}) == TailRegime::NormalApprox);
}

TEST_CASE("exact sum availability") {
  auto code = [](const TailQuery& q) {
    try {
      binomial_tail_lt(q);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::ConfigError;
  };
  CHECK(code(TailQuery{2e7, 1e-3, 10, TailRegime::ExactSum}) == Errc::RegimeUnavailable);
  CHECK(code(TailQuery{10.5, 0.1, 1, TailRegime::ExactSum}) == Errc::RegimeUnavailable);
  CHECK(code(TailQuery{10, 1.5, 1}) == Errc::InvalidQuery);
  CHECK(code(TailQuery{-1, 0.5, 1}) == Errc::InvalidQuery);
  CHECK_NOTHROW(binomial_tail_lt(TailQuery{1e7, 1e-6, 10, TailRegime::ExactSum}));
}

TEST_CASE("Monte Carlo estimator") {
  const TailQuery q{10000, 1e-3, 9};
  const double truth = static_cast<double>(oracle::binom_lt(10000, 1e-3, 9));
  SUBCASE("agrees within four standard errors") {
    const McEstimate e = mc_tail_estimate(q, McConfig{200000, 3});
    CHECK(e.trials == 200000);
    CHECK(std::abs(e.estimate - truth) <= 4.0 * std::sqrt(truth * (1 - truth) / 200000));
    CHECK(e.std_error == doctest::Approx(std::sqrt(e.estimate * (1 - e.estimate) / 200000)));
  }
  SUBCASE("deterministic for a seed and independent of thread count") {
    const McEstimate a = mc_tail_estimate(q, McConfig{50000, 11, McMode::Auto, 1});
    const McEstimate b = mc_tail_estimate(q, McConfig{50000, 11, McMode::Auto, 4});
    const McEstimate c = mc_tail_estimate(q, McConfig{50000, 11, McMode::Auto, 0});
    CHECK(a.hits == b.hits);
    CHECK(a.hits == c.hits);
    CHECK(mc_tail_estimate(q, McConfig{50000, 12}).hits != a.hits);
  }
  SUBCASE("Poisson sampling at fleet scale") {
    const double lambda = 14.1;
    const TailQuery big{3.46e24, lambda / 3.46e24, 1.1 * lambda};
    const double want = static_cast<double>(oracle::poisson_cdf(lambda, 15));
    const McEstimate e = mc_tail_estimate(big, McConfig{200000, 5});
    CHECK(std::abs(e.estimate - want) <= 4.0 * std::sqrt(want * (1 - want) / 200000));
  }
  SUBCASE("errors") {
    try {
      mc_tail_estimate(q, McConfig{99, 1});
      FAIL("expected TrialsTooSmall");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::TrialsTooSmall);
    }
    CHECK_THROWS_AS(mc_tail_estimate(TailQuery{1e9, 1e-3, 10}, McConfig{1000, 1, McMode::Binomial}),
                    Error);
  }
}
