#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "pcs/analysis.hpp"
#include "pcs/errors.hpp"
#include "pcs/experiment.hpp"
#include "pcs/feasible.hpp"
#include "pcs/report_io.hpp"
#include "pcs/sensing.hpp"

namespace pcs::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

// One flag per configuration key; the value text goes through set_config_value.
constexpr FlagSpec kFlags[] = {
    {"--m", "m", "signal dimension m"},
    {"--n", "n", "number of measurements N"},
    {"--intensity", "intensity", "total intensity I"},
    {"--c", "c", "floor fraction c (0 selects 1/(2m))"},
    {"--q", "q", "weak-lq exponent, 0 < q < 2"},
    {"--rho", "rho", "weak-lq radius"},
    {"--k-max", "k_max", "largest support size searched"},
    {"--trials", "trials", "Monte-Carlo trials"},
    {"--seed", "seed", "master seed"},
    {"--basis", "basis", "identity|haar|dct"},
    {"--method", "method", "exact|greedy"},
    {"--c2", "c2", "pairwise isometry constant"},
    {"--c4", "c4", "sphere sample-size constant"},
    {"--out", "out", "output file (default: stdout)"},
    {"--signal", "signal", "weak_lq|planted"},
    {"--planted-support", "planted_support", "support size of a planted signal"},
    {"--levels", "levels", "quantizer levels L, odd (0 selects the smallest odd L >= sqrt(m))"},
    {"--penalty-unit", "penalty_unit", "nats|bits"},
    {"--penalty-scale", "penalty_scale", "multiplier on the penalty"},
    {"--likelihood", "likelihood", "full|data_term"},
};

// Collects raw flag text so that a config file can be loaded first and the
// flags given on the command line applied over it.
class ExperimentFlags {
 public:
  ExperimentFlags(CLI::App& app, std::initializer_list<std::string_view> keys) {
    app.add_option("--config", config_path_, "key = value file; flags override its entries");
    for (const auto& f : kFlags) {
      if (keys.size() != 0 && std::find(keys.begin(), keys.end(), f.key) == keys.end()) continue;
      auto& entry = entries_[f.key];
      entry.option = app.add_option(f.flag, entry.text, f.help);
    }
  }
  ExperimentFlags(const ExperimentFlags&) = delete;
  ExperimentFlags& operator=(const ExperimentFlags&) = delete;

  ExperimentConfig resolve(ExperimentConfig base = {}) const {
    if (!config_path_.empty()) base = load_config_file(config_path_, base);
    for (const auto& [key, entry] : entries_) {
      if (entry.option->count() > 0) set_config_value(base, key, entry.text);
    }
    return base;
  }

 private:
  struct Entry {
    std::string text;
    CLI::Option* option = nullptr;
  };
  std::map<std::string, Entry> entries_;
  std::string config_path_;
};

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path + " for writing");
  file << text;
  if (!file.flush()) throw IoError("writing " + path + " failed");
}

// Tables append: an existing file must carry the same header and gets the new
// rows only, so reruns accumulate comparable data.
void emit_table(const std::string& path, const std::string& header, const std::string& rows, std::ostream& out) {
  if (path.empty()) {
    out << header << '\n' << rows;
    return;
  }
  std::error_code ec;
  const bool existing = std::filesystem::exists(path, ec) && std::filesystem::file_size(path, ec) > 0 && !ec;
  if (existing) {
    std::ifstream in(path, std::ios::binary);
    std::string first;
    if (!in || !std::getline(in, first)) throw IoError("cannot read " + path);
    if (first != header) throw IoError(path + " holds a different table; refusing to append");
  }
  std::ofstream file(path, std::ios::binary | std::ios::app);
  if (!file) throw IoError("cannot open " + path + " for writing");
  if (!existing) file << header << '\n';
  file << rows;
  if (!file.flush()) throw IoError("writing " + path + " failed");
}

std::string csv_safe(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '"', '\'');
  return text;
}

int matrix_check(const ExperimentConfig& cfg, std::size_t seeds, const ProbeConfig& probes, std::ostream& out,
                 std::ostream& err) {
  if (cfg.n_meas == 0 || cfg.m == 0) throw InvalidArgument("--n and --m must be positive");
  if (seeds == 0) throw InvalidArgument("--seeds must be positive");
  const auto reports = run_property_campaign(cfg.n_meas, cfg.m, seeds, cfg.master_seed, probes);

  std::size_t row_positive = 0, column_event = 0, violations = 0;
  std::string rows;
  for (const auto& r : reports) {
    row_positive += r.row_positive_entry;
    column_event += r.column_sum_event;
    violations += !r.floor_implication_holds || !r.intensity_implication_holds;
    rows += matrix_report_csv_row(r);
    rows += '\n';
  }
  emit_table(cfg.output_path, matrix_report_csv_header(), rows, out);
  err << "matrices " << reports.size() << ", row_positive " << row_positive << ", col_sum_event " << column_event
      << ", implication violations " << violations << '\n';
  return violations == 0 ? kExitOk : kExitCheckFailed;
}

int recover(const ExperimentConfig& cfg, std::size_t trial, std::ostream& out) {
  cfg.validate();
  const Instance inst = build_instance(cfg);
  const TrialOutcome outcome = run_trial(inst, trial);
  auto j = ordered_json::parse(estimator_result_json(outcome.result, inst.seeds));
  j["trial"] = trial;
  j["poisson_seed"] = inst.seeds.poisson(trial);
  j["m"] = cfg.m;
  j["N"] = cfg.n_meas;
  j["I"] = cfg.intensity;
  j["row_positive"] = inst.row_positive;
  j["risk"] = outcome.risk;
  j["recovered"] = outcome.recovered;
  j["f_star"] = inst.f_star.values();
  if (inst.planted_levels) j["planted_levels"] = *inst.planted_levels;
  emit(cfg.output_path, j.dump(2) + "\n", out);
  return kExitOk;
}

int risk_sweep(const ExperimentConfig& cfg, const std::vector<std::size_t>& sweep, std::ostream& out,
               std::ostream& err) {
  const std::vector<std::size_t> points = sweep.empty() ? std::vector<std::size_t>{cfg.n_meas} : sweep;
  const std::string header = risk_report_csv_header() + ",status";
  const auto columns = static_cast<std::size_t>(std::count(header.begin(), header.end(), ','));
  std::string rows;
  std::size_t failures = 0;
  for (std::size_t n : points) {
    ExperimentConfig point = cfg;
    point.n_meas = n;
    try {
      point.validate();
      rows += risk_report_csv_row(monte_carlo_risk(point, point.trials, point.master_seed)) + ",ok\n";
    } catch (const Error& e) {
      ++failures;
      err << "N = " << n << ": " << e.what() << '\n';
      std::string row = std::to_string(point.m) + "," + std::to_string(n);
      row.append(columns - 1, ',');
      rows += row + "error: " + csv_safe(e.what()) + "\n";
    }
  }
  emit_table(cfg.output_path, header, rows, out);
  return failures == 0 ? kExitOk : kExitGuard;
}

int kraft_check(ExperimentConfig cfg, bool nats, std::ostream& out) {
  if (cfg.k_max == std::numeric_limits<std::size_t>::max()) cfg.k_max = cfg.m;
  const auto spec = FeasibleSetSpec::make(cfg.m, cfg.intensity, cfg.resolved_floor_fraction(), BasisKind::identity,
                                          cfg.k_max, cfg.level_count);
  const KraftReport two = kraft_sum(spec, KraftBase::two);
  std::ostringstream text;
  text << "m = " << cfg.m << "\nlevels = " << spec.level_count << "\nk_max = " << cfg.k_max
       << "\nsupports = " << two.supports_visited << "\ncodewords = " << format_double(two.codewords)
       << "\nkraft_sum_base2 = " << format_double(two.sum) << '\n';
  if (nats) text << "kraft_sum_base_e = " << format_double(kraft_sum(spec, KraftBase::e).sum) << '\n';
  const bool holds = two.sum <= 1.0;
  text << "kraft_gate = " << (holds ? "pass" : "fail") << '\n';
  emit(cfg.output_path, text.str(), out);
  return holds ? kExitOk : kExitCheckFailed;
}

ordered_json branch_json(const RateBranch& b) {
  return {{"k_opt", b.k_opt}, {"k_used", b.k_used}, {"saturated", b.saturated}, {"bracket", b.bracket},
          {"value", b.value}};
}

int bound_eval(const ExperimentConfig& cfg, bool rate_only, std::optional<double> p, std::ostream& out) {
  cfg.validate();
  BoundConfig bc;
  bc.c2 = cfg.c2;
  bc.c4 = cfg.c4;
  bc.c = cfg.resolved_floor_fraction();
  bc.rho = cfg.rho;
  bc.unit = cfg.penalty_unit;
  bc.validate(cfg.m);
  const double alpha = 1.0 / cfg.q - 0.5;
  const AdditiveTerm additive = additive_term(cfg.m, cfg.n_meas, cfg.c2);

  ordered_json j;
  j["m"] = cfg.m;
  j["N"] = cfg.n_meas;
  j["I"] = cfg.intensity;
  j["c"] = bc.c;
  j["q"] = cfg.q;
  j["rho"] = cfg.rho;
  j["alpha"] = alpha;
  j["c2"] = cfg.c2;
  j["c4"] = cfg.c4;
  j["k_max"] = cfg.k_max;
  j["penalty_unit"] = std::string(to_string(cfg.penalty_unit));
  j["oracle_factor"] = oracle_factor(bc.c, cfg.n_meas);
  j["additive"] = additive.value;
  j["additive_clamped"] = additive.clamped;
  j["k_star"] = k_star(cfg.n_meas, cfg.m, bc);

  if (!rate_only) {
    const Instance inst = build_instance(cfg);
    const OracleInequality t = oracle_inequality(inst.f_star.values(), inst.spec, cfg.n_meas, bc);
    j["oracle_restricted"] = t.oracle_restricted;
    j["k_restricted"] = t.k_restricted;
    j["oracle_collapsed"] = t.oracle_collapsed;
    j["collapsed_argmin"] = t.collapsed_argmin;
    j["bound_restricted"] = t.bound_restricted;
    j["bound_collapsed"] = t.bound_collapsed;
  }

  const RateBound rate = rate_bound(cfg.intensity, cfg.m, cfg.n_meas, alpha, bc);
  j["regime"] = std::string(to_string(rate.regime));
  j["on_boundary"] = rate.on_boundary;
  ordered_json regimes = ordered_json::array();
  if (rate.on_boundary || rate.regime == RateRegime::penalty_dominated) regimes.push_back("penalty_dominated");
  if (rate.on_boundary || rate.regime == RateRegime::quantization_dominated) {
    regimes.push_back("quantization_dominated");
  }
  j["regimes"] = regimes;
  j["rate_constant"] = rate.constant;
  j["tail_constant"] = rate.tail_constant;
  j["rate_exponent"] = rate.exponent;
  j["k_star_below_one"] = rate.k_star_below_one;
  j["rate_bound"] = rate.value;
  j["penalty_branch"] = branch_json(rate.penalty);
  j["quantization_branch"] = branch_json(rate.quantization);
  if (p) {
    j["p"] = *p;
    j["beta"] = beta_exponent(alpha, *p);
  }
  emit(cfg.output_path, j.dump(2) + "\n", out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse Poisson recovery experiments", "pcs"};
  app.require_subcommand(1);

  auto* matrix = app.add_subcommand("matrix-check", "random matrix property campaign (CSV)");
  ExperimentFlags matrix_flags(*matrix, {"m", "n", "intensity", "c", "seed", "out"});
  std::size_t seeds = 100;
  ProbeConfig probes;
  matrix->add_option("--seeds", seeds, "number of matrices")->capture_default_str();
  matrix->add_option("--probes", probes.intensity_probes, "random f >= 0 probes per matrix")->capture_default_str();
  matrix->add_option("--pairs", probes.isometry_pairs, "isometry pairs per matrix")->capture_default_str();
  matrix->add_option("--sphere", probes.sphere_size, "sphere set size per matrix")->capture_default_str();

  auto* recover_cmd = app.add_subcommand("recover", "one observation and its estimate (JSON)");
  ExperimentFlags recover_flags(*recover_cmd, {});
  std::size_t trial = 0;
  recover_cmd->add_option("--trial", trial, "trial index selecting the Poisson draw")->capture_default_str();

  auto* sweep_cmd = app.add_subcommand("risk-sweep", "empirical risk and bounds over N (CSV)");
  ExperimentFlags sweep_flags(*sweep_cmd, {});
  std::vector<std::size_t> sweep;
  sweep_cmd->add_option("--sweep", sweep, "comma-separated N values (default: --n)")->delimiter(',');

  auto* kraft_cmd = app.add_subcommand("kraft-check", "exhaustive Kraft sum of the penalty");
  ExperimentFlags kraft_flags(*kraft_cmd, {"m", "k_max", "levels", "intensity", "c", "out"});
  bool nats = false;
  kraft_cmd->add_flag("--nats", nats, "also print the base-e sum (the gate stays base 2)");

  auto* bound_cmd = app.add_subcommand("bound-eval", "oracle inequality and rate constants (JSON)");
  ExperimentFlags bound_flags(*bound_cmd, {});
  bool rate_only = false;
  std::optional<double> p;
  bound_cmd->add_flag("--rate-only", rate_only, "skip the oracle risk, which enumerates the candidate set");
  bound_cmd->add_option("--p", p, "also report the exponent beta for N ~ I^p");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\nrun with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (matrix->parsed()) {
      const auto cfg = matrix_flags.resolve();
      probes.intensity = cfg.intensity;
      probes.floor_fraction = cfg.floor_fraction;
      return matrix_check(cfg, seeds, probes, out, err);
    }
    if (recover_cmd->parsed()) return recover(recover_flags.resolve(), trial, out);
    if (sweep_cmd->parsed()) return risk_sweep(sweep_flags.resolve(), sweep, out, err);
    if (kraft_cmd->parsed()) {
      ExperimentConfig base;
      base.k_max = std::numeric_limits<std::size_t>::max();  // unset: exhaustive
      return kraft_check(kraft_flags.resolve(base), nats, out);
    }
    return bound_eval(bound_flags.resolve(), rate_only, p, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitGuard;
  }
}

}  // namespace pcs::cli
