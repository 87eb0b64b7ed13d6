#include "pcs/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "pcs/errors.hpp"
#include "pcs/parallel.hpp"
#include "pcs/report_io.hpp"
#include "pcs/rng.hpp"

namespace pcs {

std::string_view to_string(SignalModel model) noexcept {
  return model == SignalModel::weak_lq ? "weak_lq" : "planted";
}

SignalModel parse_signal_model(std::string_view text) {
  if (text == "weak_lq") return SignalModel::weak_lq;
  if (text == "planted") return SignalModel::planted;
  throw InvalidArgument("unknown signal model '" + std::string(text) + "' (expected weak_lq or planted)");
}

double ExperimentConfig::resolved_floor_fraction() const noexcept {
  return floor_fraction > 0.0 ? floor_fraction : 1.0 / (2.0 * static_cast<double>(m));
}

int ExperimentConfig::resolved_level_count() const { return level_count > 0 ? level_count : level_count_for(m); }

void ExperimentConfig::validate() const {
  if (m < 2) throw InvalidArgument("m must be at least 2 (got " + std::to_string(m) + ")");
  if (n_meas < 1) throw InvalidArgument("n (number of measurements) must be positive");
  if (!(intensity > 0.0) || !std::isfinite(intensity)) throw InvalidArgument("intensity must be positive and finite");
  if (floor_fraction < 0.0) throw InvalidArgument("c must be positive (or 0 for the default 1/(2m))");
  if (resolved_floor_fraction() * static_cast<double>(m) > 1.0 + 1e-12) {
    throw Infeasible("c*m must not exceed 1; with m = " + std::to_string(m) + " use c <= " +
                     std::to_string(1.0 / static_cast<double>(m)));
  }
  if (!(q > 0.0 && q < 2.0)) throw InvalidArgument("q must lie in (0, 2)");
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  if (k_max > m) throw InvalidArgument("k_max must not exceed m");
  if (trials < 1) throw InvalidArgument("trials must be positive");
  if (!(c2 > 0.0) || !(c4 > 0.0)) throw InvalidArgument("c2 and c4 must be positive");
  if (level_count < 0 || (level_count > 0 && level_count % 2 == 0)) {
    throw InvalidArgument("levels must be a positive odd integer (or 0 for the default)");
  }
  if (level_count > 0 && static_cast<double>(level_count) * level_count < static_cast<double>(m)) {
    throw InvalidArgument("levels must satisfy L >= sqrt(m)");
  }
  if (signal_model == SignalModel::planted && planted_support > m) {
    throw InvalidArgument("planted_support must not exceed m");
  }
  if (!(penalty_scale > 0.0)) throw InvalidArgument("penalty_scale must be positive");
  if (basis_kind == BasisKind::haar && (m & (m - 1)) != 0) {
    throw InvalidArgument("the haar basis requires m to be a power of two");
  }
}

namespace {

template <class T>
T parse_integer(std::string_view key, std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InvalidArgument("config key '" + std::string(key) + "': '" + std::string(text) + "' is not an integer");
  }
  return value;
}

double parse_double(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InvalidArgument("config key '" + std::string(key) + "': '" + std::string(text) + "' is not a number");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "m") cfg.m = parse_integer<std::size_t>(key, value);
  else if (key == "n") cfg.n_meas = parse_integer<std::size_t>(key, value);
  else if (key == "intensity") cfg.intensity = parse_double(key, value);
  else if (key == "c") cfg.floor_fraction = parse_double(key, value);
  else if (key == "basis") cfg.basis_kind = parse_basis_kind(value);
  else if (key == "q") cfg.q = parse_double(key, value);
  else if (key == "rho") cfg.rho = parse_double(key, value);
  else if (key == "k_max") cfg.k_max = parse_integer<std::size_t>(key, value);
  else if (key == "trials") cfg.trials = parse_integer<std::size_t>(key, value);
  else if (key == "seed") cfg.master_seed = parse_integer<std::uint64_t>(key, value);
  else if (key == "c2") cfg.c2 = parse_double(key, value);
  else if (key == "c4") cfg.c4 = parse_double(key, value);
  else if (key == "method") cfg.estimator_method = parse_estimator_method(value);
  else if (key == "out") cfg.output_path = std::string(value);
  else if (key == "signal") cfg.signal_model = parse_signal_model(value);
  else if (key == "planted_support") cfg.planted_support = parse_integer<std::size_t>(key, value);
  else if (key == "levels") cfg.level_count = parse_integer<int>(key, value);
  else if (key == "penalty_unit") cfg.penalty_unit = parse_penalty_unit(value);
  else if (key == "penalty_scale") cfg.penalty_scale = parse_double(key, value);
  else if (key == "likelihood") cfg.likelihood = parse_likelihood_form(value);
  else throw InvalidArgument("unknown config key '" + std::string(key) + "'");
}

std::string save_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "m = " << cfg.m << '\n'
      << "n = " << cfg.n_meas << '\n'
      << "intensity = " << format_double(cfg.intensity) << '\n'
      << "c = " << format_double(cfg.floor_fraction) << '\n'
      << "basis = " << to_string(cfg.basis_kind) << '\n'
      << "q = " << format_double(cfg.q) << '\n'
      << "rho = " << format_double(cfg.rho) << '\n'
      << "k_max = " << cfg.k_max << '\n'
      << "trials = " << cfg.trials << '\n'
      << "seed = " << cfg.master_seed << '\n'
      << "c2 = " << format_double(cfg.c2) << '\n'
      << "c4 = " << format_double(cfg.c4) << '\n'
      << "method = " << to_string(cfg.estimator_method) << '\n'
      << "out = " << cfg.output_path << '\n'
      << "signal = " << to_string(cfg.signal_model) << '\n'
      << "planted_support = " << cfg.planted_support << '\n'
      << "levels = " << cfg.level_count << '\n'
      << "penalty_unit = " << to_string(cfg.penalty_unit) << '\n'
      << "penalty_scale = " << format_double(cfg.penalty_scale) << '\n'
      << "likelihood = " << to_string(cfg.likelihood) << '\n';
  return out.str();
}

ExperimentConfig load_config(std::string_view text, ExperimentConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_config(buffer.str(), std::move(base));
}

std::uint64_t SeedBundle::poisson(std::size_t trial) const noexcept {
  return derive_seed(master, Stream::poisson, trial);
}

SeedBundle make_seed_bundle(std::uint64_t master) noexcept {
  return SeedBundle{master, derive_seed(master, Stream::matrix), derive_seed(master, Stream::signal)};
}

Instance build_instance(const ExperimentConfig& cfg) {
  cfg.validate();
  const SeedBundle seeds = make_seed_bundle(cfg.master_seed);
  const double c = cfg.resolved_floor_fraction();
  FeasibleSetSpec spec =
      FeasibleSetSpec::make(cfg.m, cfg.intensity, c, cfg.basis_kind, cfg.k_max, cfg.resolved_level_count());
  SensingMatrix matrix = SensingMatrix::rademacher(cfg.n_meas, cfg.m, seeds.matrix);
  const bool row_positive = verify_row_positivity(matrix);

  if (cfg.signal_model == SignalModel::planted) {
    CounterRng rng(seeds.signal);
    std::vector<std::size_t> coords(cfg.m);
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    for (std::size_t i = cfg.m; i > 1; --i) std::swap(coords[i - 1], coords[rng.below(i)]);
    std::vector<int> levels(cfg.m, 0);
    const int half = spec.half_levels();
    for (std::size_t r = 0; r < cfg.planted_support && half > 0; ++r) {
      levels[coords[r]] = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(half)));
    }
    FeasibleElement element = make_element(spec, levels);
    return Instance{cfg,
                    seeds,
                    std::move(matrix),
                    std::move(spec),
                    std::move(element.f_bar),
                    std::move(element.theta_bar),
                    std::move(levels),
                    0.0,
                    row_positive};
  }

  const auto& basis = spec.basis;
  WeakLqSample sample = generate_weak_lq(WeakLqParams{cfg.q, cfg.rho}, cfg.m, cfg.intensity, c, basis, seeds.signal);
  return Instance{cfg,
                  seeds,
                  std::move(matrix),
                  std::move(spec),
                  std::move(sample.signal),
                  std::move(sample.coefficients),
                  std::nullopt,
                  sample.achieved_rho,
                  row_positive};
}

TrialOutcome run_trial(const Instance& instance, std::size_t trial) {
  const auto& cfg = instance.config;
  const Vector mean = instance.matrix.apply_shifted(instance.f_star.values());
  Observation y = sample_poisson(mean, instance.seeds.poisson(trial));
  SolveOptions options;
  options.objective = ObjectiveOptions{cfg.penalty_unit, cfg.penalty_scale, cfg.likelihood};
  EstimatorResult result = solve(cfg.estimator_method, y, instance.matrix, instance.spec, options);
  const double r = risk(instance.f_star.values(), result.f_hat.values(), cfg.intensity);
  bool recovered = true;
  for (std::size_t j = 0; j < cfg.m; ++j) {
    if (std::abs(result.f_hat.values()[j] - instance.f_star.values()[j]) > 1e-9 * cfg.intensity) recovered = false;
  }
  return TrialOutcome{std::move(y), std::move(result), r, recovered};
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) return std::accumulate(values.begin(), values.end(), 0.0);
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

// Keeps the error's type so callers can still tell a guard from bad input.
[[noreturn]] void rethrow_with_trial(const Error& e, std::size_t t) {
  const std::string msg = "trial " + std::to_string(t) + ": " + e.what();
  if (dynamic_cast<const ImpossibleObservation*>(&e)) throw ImpossibleObservation(msg);
  if (dynamic_cast<const GuardExceeded*>(&e)) throw GuardExceeded(msg);
  if (dynamic_cast<const Infeasible*>(&e)) throw Infeasible(msg);
  if (dynamic_cast<const InvalidArgument*>(&e)) throw InvalidArgument(msg);
  if (dynamic_cast<const BracketExhausted*>(&e)) throw BracketExhausted(msg);
  throw Error(msg);
}

}  // namespace

RiskReport monte_carlo_risk(const ExperimentConfig& experiment, std::size_t trials, std::uint64_t master_seed,
                            unsigned threads) {
  if (trials == 0) throw InvalidArgument("monte_carlo_risk: trials must be positive");
  ExperimentConfig cfg = experiment;
  cfg.trials = trials;
  cfg.master_seed = master_seed;
  const Instance instance = build_instance(cfg);

  std::vector<double> risks(trials);
  std::vector<char> recovered(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    try {
      const TrialOutcome outcome = run_trial(instance, t);
      risks[t] = outcome.risk;
      recovered[t] = outcome.recovered ? 1 : 0;
    } catch (const Error& e) {
      rethrow_with_trial(e, t);
    }
  });

  RiskReport report;
  report.config = cfg;
  report.trials = trials;
  report.master_seed = master_seed;
  report.empirical_risk_mean = pairwise_sum(risks) / static_cast<double>(trials);
  if (trials > 1) {
    std::vector<double> sq(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      const double d = risks[t] - report.empirical_risk_mean;
      sq[t] = d * d;
    }
    const double variance = pairwise_sum(sq) / static_cast<double>(trials - 1);
    report.empirical_risk_stderr = std::sqrt(variance / static_cast<double>(trials));
  }
  report.recovered = static_cast<std::size_t>(std::count(recovered.begin(), recovered.end(), 1));

  BoundConfig bounds;
  bounds.c2 = cfg.c2;
  bounds.c4 = cfg.c4;
  bounds.c = instance.spec.floor_fraction;
  bounds.rho = cfg.rho;
  bounds.unit = cfg.penalty_unit;
  const OracleInequality t3 = oracle_inequality(instance.f_star.values(), instance.spec, cfg.n_meas, bounds);
  report.oracle_risk = t3.oracle_collapsed;
  report.oracle_restricted = t3.oracle_restricted;
  report.bound_restricted = t3.bound_restricted;
  report.bound_collapsed = t3.bound_collapsed;
  report.risk_bound = t3.bound_collapsed;
  report.oracle_factor = t3.oracle_factor;
  report.additive = t3.additive.value;
  report.additive_clamped = t3.additive.clamped;
  report.k_star = t3.k_star;

  report.alpha = 1.0 / cfg.q - 0.5;
  const RateBound rate = rate_bound(cfg.intensity, cfg.m, cfg.n_meas, report.alpha, bounds);
  report.regime = rate.regime;
  report.rate_bound = rate.value;
  report.achieved_rho = instance.achieved_rho;
  return report;
}

}  // namespace pcs
