#pragma once

// Risk functionals, the oracle risk bound and the compressible-signal rate
// formulas, plus the Monte-Carlo driver that ties the pipeline together.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcs/estimator.hpp"
#include "pcs/feasible.hpp"

namespace pcs {

/// ‖f*/I - f/I‖₂².
double risk(std::span<const double> f_star, std::span<const double> f, double intensity);

/// risk + 2·pen(f)/I with pen in `unit` (nats: ln2·bits).
double penalized_risk(std::span<const double> f_star, const FeasibleElement& element, double intensity,
                      PenaltyUnit unit = PenaltyUnit::nats);

struct OracleRisk {
  double value = 0.0;
  FeasibleElement argmin;
};

/// Minimum penalized risk over the elements; ties as in the estimator.
/// Throws InvalidArgument on an empty input.
OracleRisk oracle_risk(std::span<const double> f_star, std::span<const FeasibleElement> elements, double intensity,
                       PenaltyUnit unit = PenaltyUnit::nats);
OracleRisk oracle_risk(std::span<const double> f_star, GammaEnumerator& elements, double intensity,
                       PenaltyUnit unit = PenaltyUnit::nats);

struct BoundConfig {
  double c2 = 1.0;  // pairwise isometry constant
  double c4 = 1.0;  // sphere-concentration sample-size constant
  double c = 0.0;   // floor fraction
  double rho = 1.0; // weak-ℓq radius used by the rate constants
  PenaltyUnit unit = PenaltyUnit::nats;

  void validate(std::size_t m_dim) const;
};

/// max(20, 15/c)·N.
double oracle_factor(double c, std::size_t n_meas);

struct AdditiveTerm {
  double value = 0.0;
  /// log(c2·m/N) <= 0: the term is clamped to 0 and the bound is vacuous there.
  bool clamped = false;
};

/// 2·c2²·log(c2·m/N)/N with natural log, clamped at 0.
AdditiveTerm additive_term(std::size_t m_dim, std::size_t n_meas, double c2);

/// N / (2·c4·log₂ m).
double k_star(std::size_t n_meas, std::size_t m_dim, const BoundConfig& cfg);

struct OracleInequality {
  double oracle_factor = 0.0;
  /// min over Γ_k with k <= min(floor(k*), k_max) of R*(f*, Γ_k).
  double oracle_restricted = 0.0;
  std::size_t k_restricted = 0;
  /// min over all enumerated Γ (up to k_max) of R*(f*, f).
  double oracle_collapsed = 0.0;
  std::vector<int> collapsed_argmin;
  AdditiveTerm additive;
  double bound_restricted = 0.0;
  double bound_collapsed = 0.0;
  double k_star = 0.0;
  BoundConfig constants;
};

OracleInequality oracle_inequality(std::span<const double> f_star, const FeasibleSetSpec& spec, std::size_t n_meas,
                             const BoundConfig& cfg);

enum class RateRegime { penalty_dominated, quantization_dominated };
std::string_view to_string(RateRegime regime) noexcept;

struct RateBranch {
  /// (αI/log₂m)^(1/(2α+1)) for the penalty branch, (αm)^(1/(2α+1)) for the quantization branch.
  double k_opt = 0.0;
  /// Sparsity level the bracket is evaluated at: k_opt, or k* when k* < k_opt.
  double k_used = 0.0;
  bool saturated = false;
  /// Bracket h(k) = k^(-2α) + 2k·log₂m/I (penalty) or k^(-2α) + 2k/m (quantization).
  double bracket = 0.0;
  /// constant·N·bracket + additive.
  double value = 0.0;
};

struct RateBound {
  RateRegime regime = RateRegime::penalty_dominated;
  double value = 0.0;  // value of the selected regime's branch
  RateBranch penalty;
  RateBranch quantization;
  /// I == m·ln m: both regimes apply.
  bool on_boundary = false;
  /// max(20, 15/c)·max(1, 2Cρ², 2) with C = q/(2-q) = 1/(2α).
  double constant = 0.0;
  double tail_constant = 0.0;  // C
  double exponent = 0.0;       // 2α/(2α+1)
  double k_star = 0.0;
  bool k_star_below_one = false;
  AdditiveTerm additive;
};

/// Rate bound for a weak-ℓq signal with decay exponent α = 1/q - 1/2.
/// Regime: penalty_dominated iff I <= m·ln m.
RateBound rate_bound(double intensity, std::size_t m_dim, std::size_t n_meas, double alpha, const BoundConfig& cfg);

/// (2α - (2α+1)/p)/(2α+1). Throws InvalidArgument unless p > 1 + 1/(2α).
double beta_exponent(double alpha, double p);

}  // namespace pcs
