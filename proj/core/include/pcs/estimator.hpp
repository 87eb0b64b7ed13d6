#pragma once

// Penalized Poisson maximum-likelihood estimation over the candidate set:
//
//   f̂ = argmin_{f ∈ Γ} [ -log p(y | A f) + 2·pen(f) ].
//
// solve_exact is a pruned exhaustive search over Γ_{k_max}; solve_greedy is a
// forward-selection heuristic for instances too large to enumerate.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "pcs/feasible.hpp"
#include "pcs/likelihood.hpp"
#include "pcs/sensing.hpp"

namespace pcs {

enum class EstimatorMethod { exact, greedy };
enum class PenaltyUnit { nats, bits };
enum class LikelihoodForm { full, data_term };

std::string_view to_string(EstimatorMethod method) noexcept;
EstimatorMethod parse_estimator_method(std::string_view text);
std::string_view to_string(PenaltyUnit unit) noexcept;
PenaltyUnit parse_penalty_unit(std::string_view text);
std::string_view to_string(LikelihoodForm form) noexcept;
LikelihoodForm parse_likelihood_form(std::string_view text);

struct ObjectiveOptions {
  /// nats: the penalty enters as 2·ln2·bits, sharing the likelihood's base.
  PenaltyUnit penalty_unit = PenaltyUnit::nats;
  /// Multiplies pen(f); 2.0 doubles the penalty.
  double penalty_scale = 1.0;
  /// full: Σ[(Af)_j - y_j log(Af)_j]; data_term drops Σ(Af)_j.
  LikelihoodForm likelihood = LikelihoodForm::full;
};

/// 2·pen in the configured unit.
double penalty_cost(double penalty_bits, const ObjectiveOptions& options);

double objective(const Observation& y, const SensingMatrix& sm, const FeasibleElement& element,
                 const ObjectiveOptions& options = {});

struct SolveOptions {
  ObjectiveOptions objective{};
  bool prune = true;
};

struct EstimatorResult {
  IntensitySignal f_hat;
  CoefficientVector theta_hat;  // Wᵀ f̂
  std::vector<int> levels;      // θ_pre of the minimizer
  double objective_value = 0.0;
  std::size_t support_size = 0;
  std::uint64_t candidates_evaluated = 0;
  std::uint64_t pruned_count = 0;
  EstimatorMethod method = EstimatorMethod::exact;

  /// Indices of the nonzero entries of θ_pre.
  std::vector<std::size_t> support() const;
};

/// Global minimizer over ∪_{k <= k_max} Γ_k. Ties go to the smaller support,
/// then the lexicographically smaller level vector.
///
/// Pruning uses a certified lower bound on each row's likelihood term: for any
/// g ∈ C, (Ag)_i lies in an interval fixed by the number of +1 entries in row i,
/// and the convex term t - y log t is bounded below by its minimum over that
/// interval. A candidate (or a whole support size) is skipped only when the
/// exactly accumulated rows plus the bound on the remaining rows exceed the
/// incumbent by a relative margin, so the result equals the unpruned search.
EstimatorResult solve_exact(const Observation& y, const SensingMatrix& sm, const FeasibleSetSpec& spec,
                            const SolveOptions& options = {});

/// Forward selection from θ = 0: each step adds the single coordinate and
/// nonzero level with the best strict objective improvement; stops at k_max or
/// when nothing improves.
EstimatorResult solve_greedy(const Observation& y, const SensingMatrix& sm, const FeasibleSetSpec& spec,
                             const SolveOptions& options = {});

EstimatorResult solve(EstimatorMethod method, const Observation& y, const SensingMatrix& sm,
                      const FeasibleSetSpec& spec, const SolveOptions& options = {});

}  // namespace pcs
