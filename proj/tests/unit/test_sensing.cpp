#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "pcs/errors.hpp"
#include "pcs/rng.hpp"
#include "pcs/sensing.hpp"

using pcs::SensingMatrix;
using pcs::Vector;

namespace {

std::vector<int> all_signs(const SensingMatrix& sm) {
  std::vector<int> out(sm.signs().begin(), sm.signs().end());
  return out;
}

Vector random_nonnegative(pcs::CounterRng& rng, std::size_t m) {
  Vector f(m);
  for (auto& v : f) v = rng.exponential();
  return f;
}

}  // namespace

TEST(Rademacher, AllPositiveConstructor) {
  const auto sm = SensingMatrix::from_rows({{+1, +1}, {+1, +1}});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(sm.sign(i, j), 1);
}

TEST(Rademacher, SameSeedIdenticalSigns) {
  const auto a = SensingMatrix::rademacher(37, 29, 123);
  const auto b = SensingMatrix::rademacher(37, 29, 123);
  EXPECT_TRUE(std::equal(a.signs().begin(), a.signs().end(), b.signs().begin()));
  EXPECT_EQ(a, b);
  const auto c = SensingMatrix::rademacher(37, 29, 124);
  EXPECT_FALSE(std::equal(a.signs().begin(), a.signs().end(), c.signs().begin()));
}

TEST(Rademacher, EntriesAreSigns) {
  const auto sm = SensingMatrix::rademacher(50, 70, 9);
  for (auto s : sm.signs()) EXPECT_TRUE(s == 1 || s == -1);
}

TEST(Rademacher, ZeroDimensionsRejected) {
  EXPECT_THROW(SensingMatrix::rademacher(0, 3, 1), pcs::InvalidArgument);
  EXPECT_THROW(SensingMatrix::rademacher(3, 0, 1), pcs::InvalidArgument);
}

TEST(Rademacher, SignMeanConcentrates) {
  // Exact tail of the ±0.1 window is 1.39e-3, so one seed misses it rarely.
  EXPECT_NEAR(oracle::binomial_mean_tail(1000, 0.1), 1.39e-3, 1e-5);
  const auto sm = SensingMatrix::rademacher(1000, 1, 1);
  const auto signs = all_signs(sm);
  const double mean = std::accumulate(signs.begin(), signs.end(), 0.0) / 1000.0;
  EXPECT_GE(mean, -0.1);
  EXPECT_LE(mean, 0.1);
}

TEST(FromSigns, WrapsVerbatim) {
  const std::vector<int> z{+1, -1};
  const auto sm = SensingMatrix::from_signs(1, 2, z);
  EXPECT_EQ(sm.sign(0, 0), 1);
  EXPECT_EQ(sm.sign(0, 1), -1);
}

TEST(FromSigns, RejectsNonSigns) {
  const std::vector<int> z{0, 1};
  EXPECT_THROW(SensingMatrix::from_signs(1, 2, z), pcs::InvalidArgument);
  EXPECT_THROW(SensingMatrix::from_signs(2, 2, z), pcs::InvalidArgument);
}

TEST(FromSigns, AllNegativeRowDetected) {
  const auto sm = SensingMatrix::from_rows({{-1, -1}, {+1, +1}});
  EXPECT_FALSE(pcs::verify_row_positivity(sm));
}

TEST(ApplyTilde, HandValues) {
  const auto ones = SensingMatrix::from_rows({{+1, +1}, {+1, +1}});
  const Vector v{1.0, 1.0};
  EXPECT_EQ(ones.apply_tilde(v), (Vector{1.0, 1.0}));

  const auto row = SensingMatrix::from_rows({{+1, -1}});
  EXPECT_EQ(row.apply_tilde(Vector{3.0, 1.0}), (Vector{2.0}));

  const auto sm = SensingMatrix::rademacher(5, 4, 3);
  EXPECT_EQ(sm.apply_tilde(Vector(4, 0.0)), Vector(5, 0.0));
  EXPECT_THROW(sm.apply_tilde(Vector(3, 0.0)), pcs::InvalidArgument);
}

TEST(ApplyShifted, HandValues) {
  const auto ones = SensingMatrix::from_rows({{+1, +1, +1}, {+1, +1, +1}, {+1, +1, +1}, {+1, +1, +1}});
  const Vector f{2.0, 5.0, 3.0};
  for (double v : ones.apply_shifted(f)) EXPECT_DOUBLE_EQ(v, 2.0 * 10.0 / 4.0);

  const auto neg = SensingMatrix::from_rows({{-1, -1}});
  EXPECT_EQ(neg.apply_shifted(Vector{4.0, 7.0}), (Vector{0.0}));
  EXPECT_THROW(neg.apply_shifted(Vector{1.0}), pcs::InvalidArgument);
}

TEST(ApplyShifted, MatchesDenseProduct) {
  pcs::CounterRng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.below(40), m = 1 + rng.below(40);
    const auto sm = SensingMatrix::rademacher(n, m, 1000 + trial);
    Vector f(m);
    for (auto& v : f) v = rng.normal();
    const auto dense = oracle::dense_shifted_product(all_signs(sm), n, m, f);
    const auto fast = sm.apply_shifted(f);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(fast[i], dense[i], 1e-12 * (1.0 + std::abs(dense[i])));
  }
}

TEST(ApplyShifted, FloorImpliedByRowPositivity) {
  const double c = 0.01, intensity = 500.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto sm = SensingMatrix::rademacher(16, 64, seed);
    ASSERT_TRUE(pcs::verify_row_positivity(sm));
    Vector f(64, c * intensity);
    for (double v : sm.apply_shifted(f)) EXPECT_GE(v, 2.0 * c * intensity / 16.0 - 1e-12);
  }
}

TEST(SensingInvariants, PositivityShiftAndLinearity) {
  pcs::CounterRng rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const auto sm = SensingMatrix::rademacher(12, 9, 500 + trial);
    const Vector f = random_nonnegative(rng, 9);
    const auto a = sm.apply_shifted(f);
    const auto t = sm.apply_tilde(f);
    const double total = std::accumulate(f.begin(), f.end(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_GE(a[i], 0.0);
      EXPECT_NEAR(a[i] - t[i], total / 12.0, 1e-12);
    }
    Vector u(9), v(9), w(9);
    for (std::size_t j = 0; j < 9; ++j) {
      u[j] = rng.normal();
      v[j] = rng.normal();
      w[j] = 1.5 * u[j] - 0.25 * v[j];
    }
    const auto tu = sm.apply_tilde(u), tv = sm.apply_tilde(v), tw = sm.apply_tilde(w);
    for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(tw[i], 1.5 * tu[i] - 0.25 * tv[i], 1e-13);
  }
}

TEST(SensingInvariants, StandardBasisIsIsometric) {
  const auto sm = SensingMatrix::rademacher(23, 11, 4);
  for (std::size_t j = 0; j < 11; ++j) {
    Vector e(11, 0.0);
    e[j] = 1.0;
    const auto t = sm.apply_tilde(e);
    double s = 0.0;
    for (double x : t) s += x * x;
    EXPECT_NEAR(23.0 * s, 1.0, 1e-14);
  }
}

TEST(RowPositivity, HandCases) {
  EXPECT_TRUE(pcs::verify_row_positivity(SensingMatrix::from_rows({{+1, -1}, {-1, +1}})));
  EXPECT_FALSE(pcs::verify_row_positivity(SensingMatrix::from_rows({{-1, -1}})));
}

TEST(RowPositivity, NoFailuresAtLargeWidth) {
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    failures += !pcs::verify_row_positivity(SensingMatrix::rademacher(16, 64, pcs::derive_seed(seed, pcs::Stream::matrix)));
  }
  EXPECT_EQ(failures, 0);
}

TEST(ColumnSums, HandCases) {
  const auto ones = SensingMatrix::from_rows({{1, 1}, {1, 1}, {1, 1}, {1, 1}});
  const auto all = pcs::verify_column_sums(ones);
  EXPECT_FALSE(all.holds);
  EXPECT_DOUBLE_EQ(all.max_abs_column_sum, 1.0);

  const auto balanced = SensingMatrix::from_rows({{1, 1}, {1, -1}, {-1, 1}, {-1, -1}});
  const auto bal = pcs::verify_column_sums(balanced);
  EXPECT_TRUE(bal.holds);
  EXPECT_DOUBLE_EQ(bal.max_abs_column_sum, 0.0);
}

TEST(ColumnSums, BoundaryIsInclusive) {
  // N = 8, column with 5 of 8 positive: sum = 2/8 = 1/4 exactly.
  const auto sm = SensingMatrix::from_rows({{1}, {1}, {1}, {1}, {1}, {-1}, {-1}, {-1}});
  const auto r = pcs::verify_column_sums(sm);
  EXPECT_TRUE(r.holds);
  EXPECT_DOUBLE_EQ(r.max_abs_column_sum, 0.25);
}

TEST(ColumnSums, FailureRateMatchesExactBinomial) {
  // A column fails when its sign mean leaves [-1/4, 1/4]; at N=200 that is
  // 2.89e-4 per column and about 1.8% per 64-column matrix.
  const double per_column = oracle::binomial_mean_tail(200, 0.25);
  EXPECT_NEAR(per_column, 2.89e-4, 1e-6);
  const double per_matrix = 1.0 - std::pow(1.0 - per_column, 64);
  const int seeds = 1000;
  int failures = 0;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    failures += !pcs::verify_column_sums(SensingMatrix::rademacher(200, 64, seed)).holds;
  }
  const double expected = seeds * per_matrix;
  EXPECT_LE(std::abs(failures - expected), 4.0 * std::sqrt(expected * (1.0 - per_matrix)));
}

TEST(IntensityBounds, HandCases) {
  const auto balanced = SensingMatrix::from_rows({{1, 1}, {1, -1}, {-1, 1}, {-1, -1}});
  EXPECT_DOUBLE_EQ(pcs::verify_intensity_bounds(balanced, Vector{0.3, 0.7}), 1.0);
  const auto ones = SensingMatrix::from_rows({{1, 1}, {1, 1}});
  EXPECT_DOUBLE_EQ(pcs::verify_intensity_bounds(ones, Vector{2.0, 5.0}), 2.0);
  EXPECT_THROW(pcs::verify_intensity_bounds(ones, Vector{0.0, 0.0}), pcs::InvalidArgument);
  EXPECT_THROW(pcs::verify_intensity_bounds(ones, Vector{-1.0, 2.0}), pcs::InvalidArgument);
}

TEST(IntensityBounds, ImpliedByColumnSums) {
  pcs::CounterRng rng(31);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto sm = SensingMatrix::rademacher(200, 64, seed);
    if (!pcs::verify_column_sums(sm).holds) continue;
    for (int p = 0; p < 20; ++p) {
      const double r = pcs::verify_intensity_bounds(sm, random_nonnegative(rng, 64));
      EXPECT_GE(r, 0.75);
      EXPECT_LE(r, 1.25);
    }
  }
}

TEST(IsometryPairwise, IdenticalPairsCostNothing) {
  const auto sm = SensingMatrix::rademacher(8, 32, 2);
  std::vector<std::pair<Vector, Vector>> pairs;
  Vector u(32, 1.0 / 32.0);
  pairs.emplace_back(u, u);
  const auto est = pcs::isometry_constant_for_pairs(sm, pairs);
  EXPECT_DOUBLE_EQ(est.c2_hat, pcs::kIsometryBracketLow);
  EXPECT_DOUBLE_EQ(est.worst_gap, 0.0);
}

TEST(IsometryPairwise, HadamardDesignIsFinite) {
  const auto sm = SensingMatrix::from_rows({{1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -1, -1}, {1, -1, -1, 1}});
  const auto est = pcs::empirical_isometry_pairwise(sm, 200, 5);
  EXPECT_TRUE(std::isfinite(est.c2_hat));
  EXPECT_TRUE(est.vacuous);
  EXPECT_LT(est.worst_gap, 0.0);
}

TEST(IsometryPairwise, StableAcrossSeeds) {
  double lo = 1e300, hi = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto sm = SensingMatrix::rademacher(64, 256, pcs::derive_seed(seed, pcs::Stream::matrix));
    const auto est = pcs::empirical_isometry_pairwise(sm, 500, pcs::derive_seed(seed, pcs::Stream::isometry));
    EXPECT_FALSE(est.vacuous);
    lo = std::min(lo, est.c2_hat);
    hi = std::max(hi, est.c2_hat);
  }
  EXPECT_LE(hi, 2.0 * lo);
}

TEST(IsometryPairwise, CoversAdversarialPair) {
  // A wide matrix with two identical columns: the pair (e0, e1) is invisible to Z,
  // so only the slack term can cover ‖u - v‖ = √2.
  std::vector<int> z;
  const std::size_t n = 4, m = 64;
  pcs::CounterRng rng(8);
  for (std::size_t i = 0; i < n; ++i) {
    const int s = rng.sign();
    z.push_back(s);
    z.push_back(s);
    for (std::size_t j = 2; j < m; ++j) z.push_back(rng.sign());
  }
  const auto sm = SensingMatrix::from_signs(n, m, z);
  Vector u(m, 0.0), v(m, 0.0);
  u[0] = 1.0;
  v[1] = 1.0;
  std::vector<std::pair<Vector, Vector>> pairs{{u, v}};
  const auto est = pcs::isometry_constant_for_pairs(sm, pairs);
  const double c = est.c2_hat;
  const double slack = c * std::sqrt(std::log(c * m / static_cast<double>(n)) / n);
  EXPECT_GE(slack + 1e-9, std::sqrt(2.0));
  const double c_less = c * (1.0 - 1e-6);
  EXPECT_LT(c_less * std::sqrt(std::log(c_less * m / static_cast<double>(n)) / n), std::sqrt(2.0));
}

TEST(IsometrySphere, StandardBasisAlwaysPasses) {
  const auto sm = SensingMatrix::rademacher(10, 6, 3);
  std::vector<Vector> set;
  for (std::size_t j = 0; j < 6; ++j) {
    Vector e(6, 0.0);
    e[j] = 1.0;
    set.push_back(e);
  }
  EXPECT_DOUBLE_EQ(pcs::empirical_isometry_sphere(sm, set), 1.0);
  EXPECT_DOUBLE_EQ(pcs::empirical_isometry_sphere(sm, std::vector<Vector>{}), 1.0);
}

TEST(IsometrySphere, RejectsNonUnitVector) {
  const auto sm = SensingMatrix::rademacher(10, 2, 3);
  std::vector<Vector> set{{1.0, 1.0}};
  EXPECT_THROW(pcs::empirical_isometry_sphere(sm, set), pcs::InvalidArgument);
}

TEST(IsometrySphere, ConcentratesAtN256) {
  int all_pass = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const auto sm = SensingMatrix::rademacher(256, 64, pcs::derive_seed(s, pcs::Stream::matrix));
    const auto set = pcs::random_unit_vectors(16, 64, pcs::derive_seed(s, pcs::Stream::sphere));
    all_pass += pcs::empirical_isometry_sphere(sm, set) == 1.0;
  }
  EXPECT_GE(all_pass, 95);
}

TEST(PropertyCampaign, DeterministicAndThreadIndependent) {
  pcs::ProbeConfig probes;
  probes.isometry_pairs = 20;
  const auto one = pcs::run_property_campaign(40, 16, 12, 99, probes, 1);
  const auto many = pcs::run_property_campaign(40, 16, 12, 99, probes, 4);
  ASSERT_EQ(one.size(), 12u);
  for (std::size_t t = 0; t < one.size(); ++t) {
    EXPECT_EQ(one[t].seed, many[t].seed);
    EXPECT_EQ(one[t].max_abs_column_sum, many[t].max_abs_column_sum);
    EXPECT_EQ(one[t].intensity_ratio_min, many[t].intensity_ratio_min);
    EXPECT_EQ(one[t].rip_pairwise_c2_estimate, many[t].rip_pairwise_c2_estimate);
    EXPECT_EQ(one[t].rip_sphere_pass_fraction, many[t].rip_sphere_pass_fraction);
    EXPECT_TRUE(one[t].floor_implication_holds);
    EXPECT_TRUE(one[t].intensity_implication_holds);
    EXPECT_GE(one[t].intensity_ratio_min, 0.0);
    EXPECT_LE(one[t].intensity_ratio_max, 2.0);
  }
}
