#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pcs/errors.hpp"
#include "pcs/estimator.hpp"
#include "pcs/experiment.hpp"
#include "pcs/rng.hpp"

using pcs::BasisKind;
using pcs::FeasibleSetSpec;
using pcs::SensingMatrix;
using pcs::Vector;

namespace {

// Every column has N/2 positive entries, so Σ(Af) = I for every f with Σf = I.
SensingMatrix balanced_matrix(std::size_t m) {
  std::vector<std::vector<int>> rows;
  for (int r = 0; r < 4; ++r) {
    std::vector<int> row(m);
    for (std::size_t j = 0; j < m; ++j) row[j] = ((r + j) % 4 < 2) ? 1 : -1;
    rows.push_back(row);
  }
  return SensingMatrix::from_rows(rows);
}

pcs::Observation zero_observation(std::size_t n) {
  pcs::Observation y;
  y.counts.assign(n, 0);
  y.mean_used.assign(n, 0.0);
  return y;
}

pcs::ExperimentConfig planted_config(std::uint64_t seed, double intensity = 1e6) {
  pcs::ExperimentConfig cfg;
  cfg.m = 8;
  cfg.n_meas = 64;
  cfg.intensity = intensity;
  cfg.k_max = 2;
  cfg.signal_model = pcs::SignalModel::planted;
  cfg.planted_support = 2;
  cfg.master_seed = seed;
  return cfg;
}

double brute_minimum(const pcs::Observation& y, const SensingMatrix& sm, const FeasibleSetSpec& spec,
                     const pcs::ObjectiveOptions& opt, std::vector<int>* argmin_levels = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  pcs::GammaEnumerator e(spec, spec.k_max);
  while (auto el = e.next()) {
    const double v = pcs::objective(y, sm, *el, opt);
    if (v < best) {
      best = v;
      if (argmin_levels) *argmin_levels = el->levels;
    }
  }
  return best;
}

}  // namespace

TEST(Objective, ZeroCountsLeaveMassAndPenalty) {
  const auto spec = FeasibleSetSpec::make(8, 100.0, 0.05, BasisKind::identity, 0);
  const auto sm = SensingMatrix::rademacher(6, 8, 1);
  const auto element = pcs::make_element(spec, std::vector<int>(8, 0));
  const auto y = zero_observation(6);
  const auto mass = sm.apply_shifted(element.f_bar.values());
  double total = 0.0;
  for (double v : mass) total += v;
  EXPECT_NEAR(pcs::objective(y, sm, element), total + 2.0 * std::numbers::ln2 * element.penalty_bits, 1e-9);
  const auto r = pcs::solve_exact(y, sm, spec);
  EXPECT_EQ(r.support_size, 0u);
  EXPECT_EQ(r.candidates_evaluated, 1u);
}

TEST(Objective, PenaltyScaleIsAdditive) {
  const auto spec = FeasibleSetSpec::make(8, 100.0, 0.05, BasisKind::identity, 2);
  const auto sm = SensingMatrix::rademacher(6, 8, 1);
  const auto y = pcs::sample_poisson(Vector(6, 20.0), 3);
  pcs::GammaEnumerator e(spec, 2);
  while (auto el = e.next()) {
    pcs::ObjectiveOptions one, two;
    two.penalty_scale = 2.0;
    EXPECT_NEAR(pcs::objective(y, sm, *el, two) - pcs::objective(y, sm, *el, one),
                2.0 * std::numbers::ln2 * el->penalty_bits, 1e-9);
    pcs::ObjectiveOptions bits;
    bits.penalty_unit = pcs::PenaltyUnit::bits;
    EXPECT_NEAR(pcs::objective(y, sm, *el, bits) - pcs::objective(y, sm, *el, one),
                2.0 * (1.0 - std::numbers::ln2) * el->penalty_bits, 1e-9);
  }
}

TEST(Objective, TrueSupportBeatsDisjointSupports) {
  const double intensity = 1e3;
  const auto spec = FeasibleSetSpec::make(4, intensity, 1.0 / 8.0, BasisKind::identity, 2);
  const auto sm = SensingMatrix::rademacher(8, 4, pcs::derive_seed(5, pcs::Stream::matrix));
  ASSERT_TRUE(pcs::verify_row_positivity(sm));
  const auto truth = pcs::make_element(spec, std::vector<int>{1, 0, 1, 0});
  const auto y = pcs::sample_poisson(sm.apply_shifted(truth.f_bar.values()), pcs::derive_seed(5, pcs::Stream::poisson));
  const double true_value = pcs::objective(y, sm, truth);
  pcs::GammaEnumerator e(spec, 2);
  int compared = 0, collisions = 0;
  while (auto el = e.next()) {
    if (el->support_size == 0 || el->levels[0] != 0 || el->levels[2] != 0) continue;
    // Negative levels off the true support can project onto the same signal.
    if (el->f_bar == truth.f_bar) {
      EXPECT_EQ(true_value, pcs::objective(y, sm, *el));
      ++collisions;
      continue;
    }
    EXPECT_LT(true_value, pcs::objective(y, sm, *el));
    ++compared;
  }
  EXPECT_EQ(compared, 7);
  EXPECT_EQ(collisions, 1);
}

TEST(Objective, ImpossibleObservation) {
  const auto spec = FeasibleSetSpec::make(2, 10.0, 0.1, BasisKind::identity, 0);
  const auto sm = SensingMatrix::from_rows({{-1, -1}});
  pcs::Observation y;
  y.counts = {3};
  EXPECT_THROW(pcs::objective(y, sm, pcs::make_element(spec, std::vector<int>{0, 0})), pcs::ImpossibleObservation);
}

TEST(SolveExact, SingletonSet) {
  const auto spec = FeasibleSetSpec::make(5, 50.0, 0.1, BasisKind::dct, 0);
  const auto sm = SensingMatrix::rademacher(9, 5, 2);
  const auto y = pcs::sample_poisson(Vector(9, 5.0), 1);
  const auto r = pcs::solve_exact(y, sm, spec);
  const auto only = pcs::make_element(spec, std::vector<int>(5, 0));
  EXPECT_EQ(r.f_hat, only.f_bar);
  EXPECT_DOUBLE_EQ(r.objective_value, pcs::objective(y, sm, only));
}

TEST(SolveExact, PrunedEqualsExhaustive) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (double intensity : {1e2, 1e4}) {
      const auto cfg = planted_config(seed, intensity);
      const auto inst = pcs::build_instance(cfg);
      const auto y = pcs::sample_poisson(inst.matrix.apply_shifted(inst.f_star.values()), inst.seeds.poisson(0));
      pcs::SolveOptions pruned, full;
      full.prune = false;
      const auto a = pcs::solve_exact(y, inst.matrix, inst.spec, pruned);
      const auto b = pcs::solve_exact(y, inst.matrix, inst.spec, full);
      EXPECT_EQ(a.objective_value, b.objective_value);
      EXPECT_EQ(a.levels, b.levels);
      EXPECT_EQ(a.f_hat, b.f_hat);
      EXPECT_EQ(b.pruned_count, 0u);
      EXPECT_EQ(a.candidates_evaluated + a.pruned_count, b.candidates_evaluated);
      EXPECT_DOUBLE_EQ(b.objective_value, brute_minimum(y, inst.matrix, inst.spec, {}));
    }
  }
}

TEST(SolveExact, NeverAboveAnyCandidate) {
  const auto spec = FeasibleSetSpec::make(6, 300.0, 0.05, BasisKind::dct, 3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto sm = SensingMatrix::rademacher(10, 6, seed);
    // Counts drawn from a point of C, so every row that sees it can be hit.
    const auto source = pcs::project_onto_C(Vector{5, 1, 4, 1, 5, 9}, 0.05, 300.0);
    const auto y = pcs::sample_poisson(sm.apply_shifted(source), seed + 100);
    const auto r = pcs::solve_exact(y, sm, spec);
    pcs::GammaEnumerator e(spec, 3);
    while (auto el = e.next()) EXPECT_LE(r.objective_value, pcs::objective(y, sm, *el));
    // Output lies in the constraint region.
    double sum = 0.0;
    for (double v : r.f_hat.values()) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 300.0, 1e-9 * 300.0);
    for (double v : sm.apply_shifted(r.f_hat.values())) EXPECT_GE(v, 0.0);
  }
}

TEST(SolveExact, PenaltyAloneSelectsEmptySupport) {
  // Data-term objective with y = 0: only the penalty is left, however small.
  const auto sm = balanced_matrix(4);
  const auto spec = FeasibleSetSpec::make(4, 10.0, 0.1, BasisKind::identity, 2);
  pcs::SolveOptions opt;
  opt.objective.likelihood = pcs::LikelihoodForm::data_term;
  opt.objective.penalty_scale = 1e-300;
  const auto r = pcs::solve_exact(zero_observation(4), sm, spec, opt);
  EXPECT_EQ(r.support_size, 0u);
}

TEST(SolveExact, HighIntensityRecoversPlanted) {
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = pcs::build_instance(planted_config(seed));
    recovered += pcs::run_trial(inst, 0).recovered;
  }
  EXPECT_GE(recovered, 45);
}

TEST(SolveExact, DoublingPenaltyNeverGrowsSupport) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto inst = pcs::build_instance(planted_config(seed, 300.0));
    const auto y = pcs::sample_poisson(inst.matrix.apply_shifted(inst.f_star.values()), inst.seeds.poisson(1));
    pcs::SolveOptions one, two;
    two.objective.penalty_scale = 2.0;
    EXPECT_LE(pcs::solve_exact(y, inst.matrix, inst.spec, two).support_size,
              pcs::solve_exact(y, inst.matrix, inst.spec, one).support_size);
  }
}

TEST(SolveExact, DataTermFormMatchesBruteForce) {
  pcs::ObjectiveOptions opt;
  opt.likelihood = pcs::LikelihoodForm::data_term;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto inst = pcs::build_instance(planted_config(seed, 1e3));
    const auto y = pcs::sample_poisson(inst.matrix.apply_shifted(inst.f_star.values()), inst.seeds.poisson(0));
    pcs::SolveOptions so;
    so.objective = opt;
    EXPECT_DOUBLE_EQ(pcs::solve_exact(y, inst.matrix, inst.spec, so).objective_value,
                     brute_minimum(y, inst.matrix, inst.spec, opt));
  }
}

TEST(SolveExact, GuardExceeded) {
  const auto spec = FeasibleSetSpec::make(64, 10.0, 0.01, BasisKind::identity, 5);
  const auto sm = SensingMatrix::rademacher(4, 64, 1);
  EXPECT_THROW(pcs::solve_exact(zero_observation(4), sm, spec), pcs::GuardExceeded);
}

TEST(SolveExact, DimensionChecks) {
  const auto spec = FeasibleSetSpec::make(4, 10.0, 0.1, BasisKind::identity, 1);
  const auto sm = SensingMatrix::rademacher(4, 5, 1);
  EXPECT_THROW(pcs::solve_exact(zero_observation(4), sm, spec), pcs::InvalidArgument);
  const auto sm4 = SensingMatrix::rademacher(4, 4, 1);
  EXPECT_THROW(pcs::solve_exact(zero_observation(3), sm4, spec), pcs::InvalidArgument);
}

TEST(SolveGreedy, ZeroCountsStayEmpty) {
  const auto sm = balanced_matrix(8);
  const auto spec = FeasibleSetSpec::make(8, 100.0, 0.05, BasisKind::identity, 3);
  const auto r = pcs::solve_greedy(zero_observation(4), sm, spec);
  EXPECT_EQ(r.support_size, 0u);
  EXPECT_EQ(r.method, pcs::EstimatorMethod::greedy);

  pcs::SolveOptions opt;
  opt.objective.likelihood = pcs::LikelihoodForm::data_term;
  const auto any = SensingMatrix::rademacher(7, 8, 3);
  EXPECT_EQ(pcs::solve_greedy(zero_observation(7), any, spec, opt).support_size, 0u);
}

TEST(SolveGreedy, NeverBeatsExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = pcs::build_instance(planted_config(seed, seed % 2 ? 1e3 : 1e5));
    const auto y = pcs::sample_poisson(inst.matrix.apply_shifted(inst.f_star.values()), inst.seeds.poisson(2));
    const auto exact = pcs::solve_exact(y, inst.matrix, inst.spec);
    const auto greedy = pcs::solve_greedy(y, inst.matrix, inst.spec);
    EXPECT_GE(greedy.objective_value, exact.objective_value);
    EXPECT_EQ(greedy.objective_value, pcs::objective(y, inst.matrix, pcs::make_element(inst.spec, greedy.levels)));
  }
}

TEST(SolveGreedy, HeadToHeadWithExact) {
  // A single -1 level spreads mass over the other coordinates and beats any
  // single +1, so forward selection usually locks onto the wrong sign pattern.
  // Pilot: 1 of 50 supports match.
  int matches = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = pcs::build_instance(planted_config(seed));
    const auto y = pcs::sample_poisson(inst.matrix.apply_shifted(inst.f_star.values()), inst.seeds.poisson(0));
    const auto exact = pcs::solve_exact(y, inst.matrix, inst.spec);
    const auto greedy = pcs::solve_greedy(y, inst.matrix, inst.spec);
    EXPECT_GE(greedy.objective_value, exact.objective_value);
    EXPECT_GE(greedy.support_size, 1u);
    matches += exact.support() == greedy.support();
  }
  EXPECT_GE(matches, 1);
}

TEST(Estimator, MethodNames) {
  EXPECT_EQ(pcs::parse_estimator_method("greedy"), pcs::EstimatorMethod::greedy);
  EXPECT_EQ(pcs::to_string(pcs::EstimatorMethod::exact), "exact");
  EXPECT_THROW(pcs::parse_estimator_method("em"), pcs::InvalidArgument);
  EXPECT_THROW(pcs::parse_penalty_unit("hartleys"), pcs::InvalidArgument);
}
