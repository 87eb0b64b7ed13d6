#include "pcs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pcs/errors.hpp"

namespace pcs {

double risk(std::span<const double> f_star, std::span<const double> f, double intensity) {
  if (f_star.size() != f.size()) throw InvalidArgument("risk: length mismatch");
  if (!(intensity > 0.0)) throw InvalidArgument("risk: intensity must be positive");
  double total = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double d = f_star[j] / intensity - f[j] / intensity;
    total += d * d;
  }
  return total;
}

double penalized_risk(std::span<const double> f_star, const FeasibleElement& element, double intensity,
                      PenaltyUnit unit) {
  const double pen = unit == PenaltyUnit::nats ? std::numbers::ln2 * element.penalty_bits : element.penalty_bits;
  return risk(f_star, element.f_bar.values(), intensity) + 2.0 * pen / intensity;
}

namespace {

struct OracleTracker {
  double value = std::numeric_limits<double>::infinity();
  std::optional<FeasibleElement> best;

  void offer(double v, const FeasibleElement& e) {
    if (!best || v < value ||
        (v == value && tie_precedes(e.levels, e.support_size, best->levels, best->support_size))) {
      value = v;
      best = e;
    }
  }
};

}  // namespace

OracleRisk oracle_risk(std::span<const double> f_star, std::span<const FeasibleElement> elements, double intensity,
                       PenaltyUnit unit) {
  if (elements.empty()) throw InvalidArgument("oracle_risk: empty candidate set");
  OracleTracker tracker;
  for (const auto& e : elements) tracker.offer(penalized_risk(f_star, e, intensity, unit), e);
  return OracleRisk{tracker.value, std::move(*tracker.best)};
}

OracleRisk oracle_risk(std::span<const double> f_star, GammaEnumerator& elements, double intensity,
                       PenaltyUnit unit) {
  OracleTracker tracker;
  while (auto e = elements.next()) tracker.offer(penalized_risk(f_star, *e, intensity, unit), *e);
  if (!tracker.best) throw InvalidArgument("oracle_risk: empty candidate set");
  return OracleRisk{tracker.value, std::move(*tracker.best)};
}

void BoundConfig::validate(std::size_t m_dim) const {
  if (!(c2 > 0.0)) throw InvalidArgument("bound constant c2 must be positive");
  if (!(c4 > 0.0)) throw InvalidArgument("bound constant c4 must be positive");
  if (!(c > 0.0)) throw InvalidArgument("floor fraction c must be positive");
  if (c * static_cast<double>(m_dim) > 1.0 + 1e-12) throw Infeasible("floor fraction c must satisfy c*m <= 1");
  if (!(rho > 0.0)) throw InvalidArgument("weak-lq radius rho must be positive");
}

double oracle_factor(double c, std::size_t n_meas) {
  if (!(c > 0.0)) throw InvalidArgument("oracle_factor: c must be positive");
  return std::max(20.0, 15.0 / c) * static_cast<double>(n_meas);
}

AdditiveTerm additive_term(std::size_t m_dim, std::size_t n_meas, double c2) {
  if (n_meas == 0) throw InvalidArgument("additive_term: N must be positive");
  const double n = static_cast<double>(n_meas);
  const double arg = std::log(c2 * static_cast<double>(m_dim) / n);
  if (arg <= 0.0) return AdditiveTerm{0.0, true};
  return AdditiveTerm{2.0 * c2 * c2 * arg / n, false};
}

double k_star(std::size_t n_meas, std::size_t m_dim, const BoundConfig& cfg) {
  if (m_dim < 2) throw InvalidArgument("k_star: m must be at least 2");
  return static_cast<double>(n_meas) / (2.0 * cfg.c4 * std::log2(static_cast<double>(m_dim)));
}

OracleInequality oracle_inequality(std::span<const double> f_star, const FeasibleSetSpec& spec, std::size_t n_meas,
                             const BoundConfig& cfg) {
  if (n_meas == 0) throw InvalidArgument("risk_bound: N must be positive");
  if (f_star.size() != spec.m_dim) throw InvalidArgument("risk_bound: f* length does not match m");
  BoundConfig constants = cfg;
  constants.c = spec.floor_fraction;
  constants.validate(spec.m_dim);

  OracleInequality out;
  out.constants = constants;
  out.oracle_factor = oracle_factor(constants.c, n_meas);
  out.additive = additive_term(spec.m_dim, n_meas, constants.c2);
  out.k_star = spec.m_dim >= 2 ? k_star(n_meas, spec.m_dim, constants) : 0.0;
  out.k_restricted = std::min<std::size_t>(spec.k_max, static_cast<std::size_t>(std::floor(out.k_star)));

  // Minimum per support size; Γ_k is nested so the restricted value is a prefix minimum.
  std::vector<OracleTracker> per_size(spec.k_max + 1);
  GammaEnumerator enumerator(spec, spec.k_max);
  while (auto e = enumerator.next()) {
    per_size[e->support_size].offer(penalized_risk(f_star, *e, spec.total_intensity, constants.unit), *e);
  }
  OracleTracker restricted;
  OracleTracker collapsed;
  for (std::size_t k = 0; k <= spec.k_max; ++k) {
    if (!per_size[k].best) continue;
    if (k <= out.k_restricted) restricted.offer(per_size[k].value, *per_size[k].best);
    collapsed.offer(per_size[k].value, *per_size[k].best);
  }
  out.oracle_restricted = restricted.value;
  out.oracle_collapsed = collapsed.value;
  out.collapsed_argmin = collapsed.best->levels;
  out.bound_restricted = out.oracle_factor * out.oracle_restricted + out.additive.value;
  out.bound_collapsed = out.oracle_factor * out.oracle_collapsed + out.additive.value;
  return out;
}

std::string_view to_string(RateRegime regime) noexcept {
  return regime == RateRegime::penalty_dominated ? "penalty_dominated" : "quantization_dominated";
}

namespace {

RateBranch evaluate_branch(double k_opt, double k_star_value, double alpha, double linear_coeff, double scale,
                           double additive) {
  RateBranch b;
  b.k_opt = k_opt;
  b.saturated = k_star_value < k_opt;
  b.k_used = b.saturated ? std::max(k_star_value, 1.0) : k_opt;
  b.bracket = std::pow(b.k_used, -2.0 * alpha) + linear_coeff * b.k_used;
  b.value = scale * b.bracket + additive;
  return b;
}

}  // namespace

RateBound rate_bound(double intensity, std::size_t m_dim, std::size_t n_meas, double alpha, const BoundConfig& cfg) {
  if (!(alpha > 0.0)) throw InvalidArgument("rate_bound: alpha must be positive");
  if (!(intensity > 0.0)) throw InvalidArgument("rate_bound: intensity must be positive");
  if (m_dim < 2) throw InvalidArgument("rate_bound: m must be at least 2");
  cfg.validate(m_dim);

  const double m = static_cast<double>(m_dim);
  const double n = static_cast<double>(n_meas);
  const double log2m = std::log2(m);

  RateBound out;
  out.tail_constant = 1.0 / (2.0 * alpha);
  out.constant = std::max(20.0, 15.0 / cfg.c) * std::max({1.0, 2.0 * out.tail_constant * cfg.rho * cfg.rho, 2.0});
  out.exponent = 2.0 * alpha / (2.0 * alpha + 1.0);
  out.k_star = k_star(n_meas, m_dim, cfg);
  out.k_star_below_one = out.k_star < 1.0;
  out.additive = additive_term(m_dim, n_meas, cfg.c2);

  const double scale = out.constant * n;
  const double inv = 1.0 / (2.0 * alpha + 1.0);
  out.penalty = evaluate_branch(std::pow(alpha * intensity / log2m, inv), out.k_star, alpha, 2.0 * log2m / intensity,
                                scale, out.additive.value);
  out.quantization =
      evaluate_branch(std::pow(alpha * m, inv), out.k_star, alpha, 2.0 / m, scale, out.additive.value);

  const double threshold = m * std::log(m);
  out.on_boundary = std::abs(intensity - threshold) <= 1e-12 * threshold;
  out.regime = intensity <= threshold ? RateRegime::penalty_dominated : RateRegime::quantization_dominated;
  out.value = out.regime == RateRegime::penalty_dominated ? out.penalty.value : out.quantization.value;
  return out;
}

double beta_exponent(double alpha, double p) {
  if (!(alpha > 0.0)) throw InvalidArgument("beta_exponent: alpha must be positive");
  if (!(p > 1.0 + 1.0 / (2.0 * alpha))) {
    throw InvalidArgument("beta_exponent: p must exceed 1 + 1/(2 alpha) for a positive rate");
  }
  return (2.0 * alpha - (2.0 * alpha + 1.0) / p) / (2.0 * alpha + 1.0);
}

}  // namespace pcs
