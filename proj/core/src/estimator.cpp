#include "pcs/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pcs/errors.hpp"

namespace pcs {

std::string_view to_string(EstimatorMethod method) noexcept {
  return method == EstimatorMethod::exact ? "exact" : "greedy";
}

EstimatorMethod parse_estimator_method(std::string_view text) {
  if (text == "exact") return EstimatorMethod::exact;
  if (text == "greedy") return EstimatorMethod::greedy;
  throw InvalidArgument("unknown estimator method '" + std::string(text) + "' (expected exact or greedy)");
}

std::string_view to_string(PenaltyUnit unit) noexcept { return unit == PenaltyUnit::nats ? "nats" : "bits"; }

PenaltyUnit parse_penalty_unit(std::string_view text) {
  if (text == "nats") return PenaltyUnit::nats;
  if (text == "bits") return PenaltyUnit::bits;
  throw InvalidArgument("unknown penalty unit '" + std::string(text) + "' (expected nats or bits)");
}

std::string_view to_string(LikelihoodForm form) noexcept {
  return form == LikelihoodForm::full ? "full" : "data_term";
}

LikelihoodForm parse_likelihood_form(std::string_view text) {
  if (text == "full") return LikelihoodForm::full;
  if (text == "data_term") return LikelihoodForm::data_term;
  throw InvalidArgument("unknown likelihood form '" + std::string(text) + "' (expected full or data_term)");
}

double penalty_cost(double bits, const ObjectiveOptions& options) {
  const double unit = options.penalty_unit == PenaltyUnit::nats ? std::numbers::ln2 : 1.0;
  return 2.0 * options.penalty_scale * unit * bits;
}

namespace {

double row_term(std::int64_t count, double mean, LikelihoodForm form) {
  if (mean == 0.0) {
    if (count > 0) throw ImpossibleObservation("objective: zero detector mean with a positive count");
    return 0.0;
  }
  const double data = count == 0 ? 0.0 : -static_cast<double>(count) * std::log(mean);
  return form == LikelihoodForm::full ? mean + data : data;
}

void check_inputs(const Observation& y, const SensingMatrix& sm, const FeasibleSetSpec& spec) {
  spec.validate();
  if (y.counts.size() != sm.rows()) throw InvalidArgument("observation length does not match N");
  if (sm.cols() != spec.m_dim) throw InvalidArgument("sensing matrix width does not match m");
}

// Lower bound on each row's likelihood term over every g ∈ C.
std::vector<double> row_lower_bounds(const Observation& y, const SensingMatrix& sm, const FeasibleSetSpec& spec,
                                     LikelihoodForm form) {
  const double scale = 2.0 / static_cast<double>(sm.rows());
  const double intensity = spec.total_intensity;
  const double floor_value = spec.floor_fraction * intensity;
  const double m = static_cast<double>(spec.m_dim);
  std::vector<double> bounds(sm.rows());
  for (std::size_t i = 0; i < sm.rows(); ++i) {
    const double p = static_cast<double>(sm.positive_columns(i).size());
    const double lo = scale * floor_value * p;
    const double hi = p == 0.0 ? 0.0 : scale * std::max(lo / scale, intensity - floor_value * (m - p));
    const auto count = y.counts[i];
    if (hi == 0.0) {
      bounds[i] = count > 0 ? std::numeric_limits<double>::infinity() : 0.0;
      continue;
    }
    double t;
    if (form == LikelihoodForm::full) {
      t = std::clamp(static_cast<double>(count), std::max(lo, std::numeric_limits<double>::min()), hi);
    } else {
      t = hi;
    }
    bounds[i] = row_term(count, t, form);
  }
  return bounds;
}

struct Incumbent {
  double value = std::numeric_limits<double>::infinity();
  std::vector<int> levels;
  std::size_t support = 0;
  bool set = false;

  bool improves(double v, const std::vector<int>& lv, std::size_t s) const {
    if (!set) return true;
    if (v < value) return true;
    return v == value && tie_precedes(lv, s, levels, support);
  }
};

double prune_margin(double incumbent) { return 1e-9 * (1.0 + std::abs(incumbent)); }

EstimatorResult finish(const FeasibleSetSpec& spec, const Incumbent& best, EstimatorMethod method,
                       std::uint64_t evaluated, std::uint64_t pruned) {
  FeasibleElement element = make_element(spec, best.levels);
  return EstimatorResult{std::move(element.f_bar),
                         std::move(element.theta_bar),
                         best.levels,
                         best.value,
                         best.support,
                         evaluated,
                         pruned,
                         method};
}

}  // namespace

double objective(const Observation& y, const SensingMatrix& sm, const FeasibleElement& element,
                 const ObjectiveOptions& options) {
  if (y.counts.size() != sm.rows()) throw InvalidArgument("objective: observation length does not match N");
  const Vector mean = sm.apply_shifted(element.f_bar.values());
  double total = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) total += row_term(y.counts[i], mean[i], options.likelihood);
  return total + penalty_cost(element.penalty_bits, options);
}

std::vector<std::size_t> EstimatorResult::support() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    if (levels[j] != 0) out.push_back(j);
  }
  return out;
}

EstimatorResult solve_exact(const Observation& y, const SensingMatrix& sm, const FeasibleSetSpec& spec,
                            const SolveOptions& options) {
  check_inputs(y, sm, spec);
  const double total = gamma_count(spec.m_dim, spec.level_count, spec.k_max);
  if (total > static_cast<double>(kEnumerationGuard)) {
    throw GuardExceeded("solve_exact: |Gamma| = " + std::to_string(total) + " exceeds the enumeration guard");
  }
  const auto form = options.objective.likelihood;
  const std::size_t n = sm.rows();

  // suffix[i] = Σ_{r >= i} lower bound of row r.
  const auto bounds = row_lower_bounds(y, sm, spec, form);
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + bounds[i];

  Incumbent best;
  std::uint64_t evaluated = 0;
  std::uint64_t pruned = 0;
  Vector mean(n);
  ThetaCursor cursor(spec.m_dim, spec.level_count, spec.k_max);
  std::size_t skipped_from_size = spec.k_max + 1;

  while (!cursor.done()) {
    const std::size_t k = cursor.support_size();
    const double pen = penalty_cost(penalty_bits(k, spec.m_dim), options.objective);
    if (options.prune && best.set && suffix[0] + pen > best.value + prune_margin(best.value)) {
      // Penalty grows with k, so every larger support size is excluded too.
      skipped_from_size = k;
      break;
    }
    const FeasibleElement element = make_element(spec, cursor.levels());
    sm.apply_shifted_into(element.f_bar.values(), mean);
    double partial = 0.0;
    bool aborted = false;
    for (std::size_t i = 0; i < n; ++i) {
      partial += row_term(y.counts[i], mean[i], form);
      if (options.prune && best.set && partial + suffix[i + 1] + pen > best.value + prune_margin(best.value)) {
        aborted = true;
        break;
      }
    }
    if (aborted) {
      ++pruned;
    } else {
      ++evaluated;
      const double value = partial + pen;
      if (best.improves(value, cursor.levels(), k)) {
        best.value = value;
        best.levels = cursor.levels();
        best.support = k;
        best.set = true;
      }
    }
    cursor.advance();
  }
  if (skipped_from_size <= spec.k_max) {
    const double before = skipped_from_size == 0 ? 0.0 : gamma_count(spec.m_dim, spec.level_count, skipped_from_size - 1);
    pruned += static_cast<std::uint64_t>(total - before);
  }
  return finish(spec, best, EstimatorMethod::exact, evaluated, pruned);
}

EstimatorResult solve_greedy(const Observation& y, const SensingMatrix& sm, const FeasibleSetSpec& spec,
                             const SolveOptions& options) {
  check_inputs(y, sm, spec);
  const int half = spec.half_levels();
  Incumbent current;
  current.levels.assign(spec.m_dim, 0);
  current.value = objective(y, sm, make_element(spec, current.levels), options.objective);
  current.set = true;
  std::uint64_t evaluated = 1;

  for (std::size_t step = 0; step < spec.k_max && half > 0; ++step) {
    Incumbent candidate;
    std::vector<int> trial = current.levels;
    for (std::size_t j = 0; j < spec.m_dim; ++j) {
      if (current.levels[j] != 0) continue;
      for (int level = -half; level <= half; ++level) {
        if (level == 0) continue;
        trial[j] = level;
        const double value = objective(y, sm, make_element(spec, trial), options.objective);
        ++evaluated;
        if (candidate.improves(value, trial, current.support + 1)) {
          candidate.value = value;
          candidate.levels = trial;
          candidate.support = current.support + 1;
          candidate.set = true;
        }
      }
      trial[j] = 0;
    }
    if (!candidate.set || !(candidate.value < current.value)) break;
    current = std::move(candidate);
  }
  return finish(spec, current, EstimatorMethod::greedy, evaluated, 0);
}

EstimatorResult solve(EstimatorMethod method, const Observation& y, const SensingMatrix& sm,
                      const FeasibleSetSpec& spec, const SolveOptions& options) {
  return method == EstimatorMethod::exact ? solve_exact(y, sm, spec, options) : solve_greedy(y, sm, spec, options);
}

}  // namespace pcs
