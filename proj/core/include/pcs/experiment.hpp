#pragma once

// Reproducible experiment definitions: a flat key/value configuration, the
// seeded instance it describes (matrix, true signal, candidate set) and the
// Monte-Carlo risk driver.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pcs/analysis.hpp"
#include "pcs/estimator.hpp"
#include "pcs/feasible.hpp"
#include "pcs/likelihood.hpp"
#include "pcs/sensing.hpp"
#include "pcs/signals.hpp"

namespace pcs {

enum class SignalModel { weak_lq, planted };
std::string_view to_string(SignalModel model) noexcept;
SignalModel parse_signal_model(std::string_view text);

struct ExperimentConfig {
  std::size_t m = 16;
  std::size_t n_meas = 64;
  double intensity = 1000.0;
  /// Floor fraction c; 0 selects 1/(2m).
  double floor_fraction = 0.0;
  BasisKind basis_kind = BasisKind::identity;
  double q = 1.0;
  double rho = 1.0;
  std::size_t k_max = 2;
  std::size_t trials = 20;
  std::uint64_t master_seed = 1;
  double c2 = 1.0;
  double c4 = 1.0;
  EstimatorMethod estimator_method = EstimatorMethod::exact;
  std::string output_path;
  SignalModel signal_model = SignalModel::weak_lq;
  /// Support size of the planted element (signal_model = planted).
  std::size_t planted_support = 2;
  /// Quantizer levels L; 0 selects the smallest odd integer >= √m.
  int level_count = 0;
  PenaltyUnit penalty_unit = PenaltyUnit::nats;
  double penalty_scale = 1.0;
  LikelihoodForm likelihood = LikelihoodForm::full;

  double resolved_floor_fraction() const noexcept;
  int resolved_level_count() const;

  /// Throws InvalidArgument (or Infeasible for c*m > 1) with an actionable message.
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Sets one configuration key from its text form. Keys match the long CLI flags
/// with dashes replaced by underscores (m, n, intensity, c, basis, q, rho,
/// k_max, trials, seed, c2, c4, method, out, signal, planted_support, levels,
/// penalty_unit, penalty_scale, likelihood). Throws InvalidArgument.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Flat "key = value" text, one key per line, doubles with 17 significant digits.
std::string save_config(const ExperimentConfig& cfg);
/// Parses save_config output; '#' starts a comment, blank lines are ignored.
ExperimentConfig load_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

struct SeedBundle {
  std::uint64_t master = 0;
  std::uint64_t matrix = 0;
  std::uint64_t signal = 0;

  /// Poisson key for one trial: derive_seed(master, poisson, trial).
  std::uint64_t poisson(std::size_t trial) const noexcept;
};

SeedBundle make_seed_bundle(std::uint64_t master) noexcept;

struct Instance {
  ExperimentConfig config;
  SeedBundle seeds;
  SensingMatrix matrix;
  FeasibleSetSpec spec;
  IntensitySignal f_star;
  CoefficientVector theta_star;
  /// Level vector of f* when it was planted in Γ.
  std::optional<std::vector<int>> planted_levels;
  /// Achieved weak-ℓq radius of θ* (weak_lq model only).
  double achieved_rho = 0.0;
  bool row_positive = false;
};

Instance build_instance(const ExperimentConfig& cfg);

struct TrialOutcome {
  Observation observation;
  EstimatorResult result;
  double risk = 0.0;
  /// ‖f̂ - f*‖∞ <= 1e-9·I.
  bool recovered = false;
};

TrialOutcome run_trial(const Instance& instance, std::size_t trial);

struct RiskReport {
  ExperimentConfig config;
  double empirical_risk_mean = 0.0;
  double empirical_risk_stderr = 0.0;
  std::size_t trials = 0;
  std::size_t recovered = 0;
  double oracle_risk = 0.0;      // collapsed (global) oracle penalized risk
  double oracle_restricted = 0.0;
  double risk_bound = 0.0;   // collapsed form
  double bound_restricted = 0.0;
  double bound_collapsed = 0.0;
  double oracle_factor = 0.0;
  double additive = 0.0;
  bool additive_clamped = false;
  double k_star = 0.0;
  RateRegime regime = RateRegime::penalty_dominated;
  double rate_bound = 0.0;
  double alpha = 0.0;
  double achieved_rho = 0.0;
  std::uint64_t master_seed = 0;
};

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

/// Runs `trials` independent Poisson draws on one instance (matrix and f* fixed
/// by the master seed) and reports the empirical risk next to the bounds.
/// Trials run on up to `threads` workers; the report does not depend on the count.
/// An estimator failure is rethrown with its trial index in the message.
RiskReport monte_carlo_risk(const ExperimentConfig& experiment, std::size_t trials, std::uint64_t master_seed,
                            unsigned threads = 0);

}  // namespace pcs
