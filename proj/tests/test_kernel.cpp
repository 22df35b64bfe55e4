#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "dualopt/kernel.hpp"
#include "dualopt/quadrature.hpp"

using namespace dualopt;

TEST_CASE("constructors reject invalid parameters") {
  CHECK_THROWS_AS(KernelModel::lognormal(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(KernelModel::lognormal(0.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(KernelModel::uniform(-0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(KernelModel::uniform(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(KernelModel::shifted_exponential(-0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(KernelModel::shifted_exponential(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("quantiles at known points") {
  CHECK(KernelModel::uniform(0.5, 1.5).quantile(0.5) == 1.0);
  CHECK_THAT(KernelModel::uniform(0.5, 1.5).quantile(0.25),
             Catch::Matchers::WithinAbs(0.75, 1e-15));
  CHECK_THAT(KernelModel::lognormal(0.0, 1.0).quantile(0.5),
             Catch::Matchers::WithinAbs(1.0, 1e-14));
  const auto se = KernelModel::shifted_exponential(1.0, 2.0);
  CHECK_THAT(se.quantile(0.5), Catch::Matchers::WithinRel(1.0 + std::log(2.0) / 2.0, 1e-14));
  CHECK_THROWS_AS(se.quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(se.quantile(1.0), std::domain_error);
}

TEST_CASE("quantile and cdf are mutual inverses on the support") {
  for (const auto& k : {KernelModel::lognormal(0.3, 0.8), KernelModel::uniform(0.5, 1.5),
                        KernelModel::shifted_exponential(1.0, 2.0)}) {
    for (double p : {0.01, 0.2, 0.5, 0.77, 0.999}) {
      const double t = k.quantile(p);
      CHECK_THAT(k.quantile(k.cdf(t)), Catch::Matchers::WithinRel(t, 1e-10));
    }
  }
}

TEST_CASE("essential infimum per family") {
  CHECK(KernelModel::lognormal(0.0, 1.0).essinf() == 0.0);
  CHECK(KernelModel::uniform(0.5, 1.5).essinf() == 0.5);
  CHECK(KernelModel::shifted_exponential(1.0, 2.0).essinf() == 1.0);
}

TEST_CASE("partial expectation closed forms") {
  const auto u = KernelModel::uniform(0.5, 1.5);
  CHECK_THAT(u.partial_expectation(0.0), Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_THAT(u.partial_expectation(0.5), Catch::Matchers::WithinAbs(0.375, 1e-15));
  CHECK_THAT(u.partial_expectation(0.9), Catch::Matchers::WithinRel(0.055, 1e-12));

  const auto ln = KernelModel::lognormal(0.0, 1.0);
  CHECK_THAT(ln.mean(), Catch::Matchers::WithinRel(1.6487212707001282, 1e-14));
  CHECK_THAT(ln.partial_expectation(0.0), Catch::Matchers::WithinRel(ln.mean(), 1e-14));
  CHECK_THAT(ln.partial_expectation(0.5),
             Catch::Matchers::WithinRel(0.26157829186512344, 1e-10));

  const auto se = KernelModel::shifted_exponential(1.0, 2.0);
  CHECK_THAT(se.mean(), Catch::Matchers::WithinAbs(1.5, 1e-15));
  CHECK_THAT(se.partial_expectation(0.3),
             Catch::Matchers::WithinRel(0.86940407935110953, 1e-12));
  CHECK_THAT(se.partial_expectation(0.9),
             Catch::Matchers::WithinRel(0.10258776795397812, 1e-12));

  CHECK_THROWS_AS(u.partial_expectation(1.0), std::domain_error);
  CHECK_THROWS_AS(u.partial_expectation(-0.1), std::domain_error);
}

TEST_CASE("partial expectation agrees with quadrature of the tail quantile") {
  for (const auto& k : {KernelModel::lognormal(0.2, 1.3), KernelModel::uniform(0.1, 2.0),
                        KernelModel::shifted_exponential(0.7, 0.9)}) {
    for (double c : {0.05, 0.3, 0.6, 0.95}) {
      const double direct = quad::adaptive(
          [&k](double z) { return k.quantile(1.0 - z); }, c, 1.0 - 1e-13, 1e-11);
      CHECK_THAT(k.partial_expectation(c), Catch::Matchers::WithinAbs(direct, 1e-8));
    }
  }
}

TEST_CASE("partial expectation decreases strictly and continuously") {
  for (const auto& k : {KernelModel::lognormal(0.0, 1.0), KernelModel::uniform(0.5, 1.5),
                        KernelModel::shifted_exponential(1.0, 2.0)}) {
    double prev = k.partial_expectation(0.0);
    for (int i = 1; i <= 200; ++i) {
      const double c = i / 201.0;
      const double cur = k.partial_expectation(c);
      CHECK(cur < prev);
      if (i > 1) {
        // the decrement over one step is at most the step times the
        // quantile at the left edge of the step
        const double slope_bound = k.quantile(1.0 - (i - 1) / 201.0);
        CHECK(prev - cur <= slope_bound / 201.0 * (1.0 + 1e-9));
      }
      prev = cur;
    }
  }
}

TEST_CASE("lower partial mean stays accurate into the deep tail") {
  const auto se = KernelModel::shifted_exponential(1.0, 2.0);
  // continuity across the series/closed-form switch at p = 0.5
  CHECK_THAT(se.lower_partial_mean(0.4999999),
             Catch::Matchers::WithinRel(se.lower_partial_mean(0.5000001), 1e-6));
  // tiny p: dominated by shift * p with a p^2/(2 rate) correction
  const double p = 1e-18;
  CHECK_THAT(se.lower_partial_mean(p), Catch::Matchers::WithinRel(p, 1e-12));
  const auto se0 = KernelModel::shifted_exponential(0.0, 2.0);
  CHECK_THAT(se0.lower_partial_mean(p), Catch::Matchers::WithinRel(p * p / 4.0, 1e-12));
  // lognormal deep tail stays positive and monotone
  const auto ln = KernelModel::lognormal(0.0, 1.0);
  double prev = 0.0;
  for (double q : {1e-300, 1e-100, 1e-30, 1e-9, 0.1, 0.9}) {
    const double v = ln.lower_partial_mean(q);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("sampling is deterministic and matches the model law") {
  const auto u = KernelModel::uniform(0.5, 1.5);
  const auto a = u.sample(1000, 99);
  const auto b = u.sample(1000, 99);
  CHECK(a == b);
  CHECK(u.sample(1000, 100) != a);

  const auto big = u.sample(1000000, 7);
  double mean = 0.0;
  for (double v : big) mean += v;
  mean /= static_cast<double>(big.size());
  CHECK_THAT(mean, Catch::Matchers::WithinAbs(1.0, 0.005));

  auto ln_sample = KernelModel::lognormal(0.0, 1.0).sample(1000000, 11);
  std::nth_element(ln_sample.begin(), ln_sample.begin() + 500000, ln_sample.end());
  CHECK_THAT(ln_sample[500000], Catch::Matchers::WithinAbs(1.0, 0.01));

  for (double v : KernelModel::shifted_exponential(1.0, 2.0).sample(10000, 3)) {
    CHECK(v > 1.0);
  }
}
