#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pcs/errors.hpp"
#include "pcs/likelihood.hpp"
#include "pcs/rng.hpp"

using pcs::Vector;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments_of(const std::vector<std::int64_t>& counts) {
  double s = 0.0;
  for (auto c : counts) s += static_cast<double>(c);
  const double mean = s / counts.size();
  double v = 0.0;
  for (auto c : counts) v += (c - mean) * (c - mean);
  return {mean, v / (counts.size() - 1)};
}

}  // namespace

TEST(Poisson, ZeroMeanGivesZeroCounts) {
  const auto y = pcs::sample_poisson(Vector(10, 0.0), 4);
  for (auto c : y.counts) EXPECT_EQ(c, 0);
  EXPECT_EQ(y.seed, 4u);
  EXPECT_EQ(y.mean_used, Vector(10, 0.0));
}

TEST(Poisson, RejectsNegativeMean) {
  EXPECT_THROW(pcs::sample_poisson(Vector{1.0, -0.5}, 1), pcs::InvalidArgument);
}

TEST(Poisson, Deterministic) {
  const Vector mean{0.3, 7.0, 29.9, 30.0, 500.0, 1e6};
  const auto a = pcs::sample_poisson(mean, 17), b = pcs::sample_poisson(mean, 17);
  EXPECT_EQ(a.counts, b.counts);
}

TEST(Poisson, MomentsSmallMean) {
  const double lambda = 7.0;
  const std::size_t n = 100000;
  const auto y = pcs::sample_poisson(Vector(n, lambda), 2024);
  const auto mo = moments_of(y.counts);
  EXPECT_LE(std::abs(mo.mean - lambda), 4.0 * std::sqrt(lambda / n));
  EXPECT_GE(mo.var / lambda, 0.95);
  EXPECT_LE(mo.var / lambda, 1.05);
}

TEST(Poisson, MomentsRejectionBranch) {
  for (double lambda : {30.0, 55.5, 1000.0, 1e6}) {
    const std::size_t n = 100000;
    const auto y = pcs::sample_poisson(Vector(n, lambda), 99);
    const auto mo = moments_of(y.counts);
    EXPECT_LE(std::abs(mo.mean - lambda), 4.0 * std::sqrt(lambda / n)) << lambda;
    EXPECT_GE(mo.var / lambda, 0.95) << lambda;
    EXPECT_LE(mo.var / lambda, 1.05) << lambda;
  }
}

TEST(Poisson, HistogramMatchesPmf) {
  for (double lambda : {3.0, 45.0}) {
    const std::size_t n = 200000;
    const auto y = pcs::sample_poisson(Vector(n, lambda), 5);
    std::vector<double> hist(400, 0.0);
    for (auto c : y.counts) {
      if (c < 400) ++hist[c];
    }
    for (int k = 0; k < 400; ++k) {
      const double p = std::exp(oracle::log_poisson_pmf(k, lambda));
      if (p * n < 50.0) continue;
      const double sd = std::sqrt(n * p * (1 - p));
      EXPECT_LE(std::abs(hist[k] - n * p), 5.0 * sd) << "lambda " << lambda << " k " << k;
    }
  }
}

TEST(NegLogLikelihood, Examples) {
  const std::vector<std::int64_t> zero{0, 0};
  EXPECT_DOUBLE_EQ(pcs::neg_log_likelihood(zero, Vector{1.5, 2.5}), 4.0);
  EXPECT_NEAR(pcs::neg_log_likelihood(std::vector<std::int64_t>{2}, Vector{3.0}), 3.0 - 2.0 * std::log(3.0), 1e-15);
  EXPECT_NEAR(pcs::neg_log_likelihood(std::vector<std::int64_t>{2}, Vector{3.0}), 0.8028, 1e-4);
  EXPECT_DOUBLE_EQ(pcs::neg_log_likelihood(std::vector<std::int64_t>{0}, Vector{0.0}), 0.0);
  EXPECT_THROW(pcs::neg_log_likelihood(std::vector<std::int64_t>{1}, Vector{0.0}), pcs::ImpossibleObservation);
  EXPECT_THROW(pcs::neg_log_likelihood(std::vector<std::int64_t>{1}, Vector{1.0, 2.0}), pcs::InvalidArgument);
}

TEST(NegLogLikelihood, MinimizedAtCount) {
  for (std::int64_t y : {1, 4, 17}) {
    const std::vector<std::int64_t> counts{y};
    const double at = pcs::neg_log_likelihood(counts, Vector{static_cast<double>(y)});
    for (double d : {-0.5, -0.01, 0.01, 0.5, 3.0}) {
      EXPECT_LT(at, pcs::neg_log_likelihood(counts, Vector{y + d}));
    }
  }
}

TEST(NegLogLikelihood, RatioMatchesExactLikelihood) {
  pcs::CounterRng rng(3);
  for (int t = 0; t < 50; ++t) {
    Vector mu1(4), mu2(4);
    std::vector<std::int64_t> y(4);
    for (int j = 0; j < 4; ++j) {
      mu1[j] = 0.1 + 10.0 * rng.uniform();
      mu2[j] = 0.1 + 10.0 * rng.uniform();
      y[j] = static_cast<std::int64_t>(rng.below(15));
    }
    const double lhs = pcs::neg_log_likelihood(y, mu1) - pcs::neg_log_likelihood(y, mu2);
    double exact1 = 0.0, exact2 = 0.0;
    for (int j = 0; j < 4; ++j) {
      exact1 -= oracle::log_poisson_pmf(static_cast<int>(y[j]), mu1[j]);
      exact2 -= oracle::log_poisson_pmf(static_cast<int>(y[j]), mu2[j]);
    }
    EXPECT_NEAR(lhs, exact1 - exact2, 1e-10);
    EXPECT_NEAR(pcs::exact_neg_log_likelihood(y, mu1), exact1, 1e-10);
  }
}

TEST(NegLogLikelihood, DataTermDropsMass) {
  const std::vector<std::int64_t> y{3, 0, 2};
  const Vector mu{1.0, 2.0, 4.0};
  EXPECT_NEAR(pcs::neg_log_likelihood(y, mu) - pcs::data_term(y, mu), 7.0, 1e-14);
}

TEST(Kl, Examples) {
  EXPECT_EQ(pcs::kl_poisson(Vector{1.0, 3.0}, Vector{1.0, 3.0}), 0.0);
  EXPECT_NEAR(pcs::kl_poisson(Vector{1.0}, Vector{std::numbers::e}), std::numbers::e - 2.0, 1e-15);
  EXPECT_NEAR(pcs::kl_poisson(Vector{0.0}, Vector{2.0}), 2.0, 1e-15);
  EXPECT_THROW(pcs::kl_poisson(Vector{1.0}, Vector{0.0}), pcs::InvalidArgument);
}

TEST(Kl, NonnegativeAndBoundedByChiSquare) {
  pcs::CounterRng rng(8);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.below(5);
    Vector a(n), b(n);
    double min_b = 1e300;
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = 10.0 * rng.uniform();
      b[j] = 0.01 + 10.0 * rng.uniform();
      min_b = std::min(min_b, b[j]);
    }
    const double kl = pcs::kl_poisson(a, b);
    EXPECT_GE(kl, 0.0);
    EXPECT_LE(kl, oracle::sq_dist(a, b) / min_b + 1e-12);
    EXPECT_EQ(pcs::kl_poisson(a, a), 0.0);
  }
}

TEST(Hellinger, Examples) {
  EXPECT_EQ(pcs::hellinger_sq(Vector{2.0}, Vector{2.0}), 0.0);
  EXPECT_EQ(pcs::bhattacharyya_affinity(Vector{2.0}, Vector{2.0}), 1.0);
  EXPECT_DOUBLE_EQ(pcs::hellinger_sq(Vector{1.0}, Vector{0.0}), 1.0);
  EXPECT_THROW(pcs::hellinger_sq(Vector{-1.0}, Vector{0.0}), pcs::InvalidArgument);
  const double h = std::sqrt(2.0) - std::sqrt(3.0);
  EXPECT_NEAR(pcs::bhattacharyya_affinity(Vector{2.0}, Vector{3.0}), std::exp(-0.5 * h * h), 1e-15);
  EXPECT_NEAR(std::exp(-0.5 * h * h), oracle::bhattacharyya_truncated(Vector{2.0}, Vector{3.0}, 200), 1e-10);
}

TEST(Hellinger, AffinityIdentity) {
  pcs::CounterRng rng(10);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.below(3);
    Vector a(n), b(n);
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = 10.0 * rng.uniform();
      b[j] = 10.0 * rng.uniform();
    }
    EXPECT_LE(std::abs(pcs::bhattacharyya_affinity(a, b) - oracle::bhattacharyya_truncated(a, b, 300)), 1e-8);
  }
}
