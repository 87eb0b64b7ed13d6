#include "pcs/report_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "pcs/errors.hpp"

namespace pcs {

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

namespace {

const char* flag(bool b) { return b ? "1" : "0"; }

double parse_number(const std::string& token, const char* what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw InvalidArgument(std::string("signal file: bad ") + what + " '" + token + "'");
  }
  return value;
}

}  // namespace

std::string matrix_report_csv_header() {
  return "seed,N,m,row_positive,col_sum_event,max_col_sum,intensity_ratio_min,intensity_ratio_max,c2_hat,"
         "sphere_pass_fraction";
}

std::string matrix_report_csv_row(const MatrixPropertyReport& r) {
  std::ostringstream out;
  out << r.seed << ',' << r.n_meas << ',' << r.m_dim << ',' << flag(r.row_positive_entry) << ','
      << flag(r.column_sum_event) << ',' << format_double(r.max_abs_column_sum) << ','
      << format_double(r.intensity_ratio_min) << ',' << format_double(r.intensity_ratio_max) << ','
      << format_double(r.rip_pairwise_c2_estimate) << ',' << format_double(r.rip_sphere_pass_fraction);
  return out.str();
}

void write_matrix_reports_csv(std::ostream& out, std::span<const MatrixPropertyReport> reports) {
  out << matrix_report_csv_header() << '\n';
  for (const auto& r : reports) out << matrix_report_csv_row(r) << '\n';
}

std::string risk_report_csv_header() {
  return "m,N,I,c,q,rho,alpha,k_max,trials,emp_risk_mean,emp_risk_stderr,oracle_risk,bound_restricted,"
         "bound_collapsed,k_star,regime,rate_bound,master_seed";
}

std::string risk_report_csv_row(const RiskReport& r) {
  const auto& c = r.config;
  std::ostringstream out;
  out << c.m << ',' << c.n_meas << ',' << format_double(c.intensity) << ','
      << format_double(c.resolved_floor_fraction()) << ',' << format_double(c.q) << ',' << format_double(c.rho)
      << ',' << format_double(r.alpha) << ',' << c.k_max << ',' << r.trials << ','
      << format_double(r.empirical_risk_mean) << ',' << format_double(r.empirical_risk_stderr) << ','
      << format_double(r.oracle_risk) << ',' << format_double(r.bound_restricted) << ','
      << format_double(r.bound_collapsed) << ',' << format_double(r.k_star) << ',' << to_string(r.regime) << ','
      << format_double(r.rate_bound) << ',' << r.master_seed;
  return out.str();
}

std::string risk_report_json(const RiskReport& r) {
  const auto& c = r.config;
  nlohmann::ordered_json j;
  j["m"] = c.m;
  j["N"] = c.n_meas;
  j["I"] = c.intensity;
  j["c"] = c.resolved_floor_fraction();
  j["q"] = c.q;
  j["rho"] = c.rho;
  j["alpha"] = r.alpha;
  j["k_max"] = c.k_max;
  j["basis"] = std::string(to_string(c.basis_kind));
  j["method"] = std::string(to_string(c.estimator_method));
  j["trials"] = r.trials;
  j["recovered"] = r.recovered;
  j["emp_risk_mean"] = r.empirical_risk_mean;
  j["emp_risk_stderr"] = r.empirical_risk_stderr;
  j["oracle_risk"] = r.oracle_risk;
  j["oracle_restricted"] = r.oracle_restricted;
  j["oracle_factor"] = r.oracle_factor;
  j["additive"] = r.additive;
  j["additive_clamped"] = r.additive_clamped;
  j["bound_restricted"] = r.bound_restricted;
  j["bound_collapsed"] = r.bound_collapsed;
  j["k_star"] = r.k_star;
  j["regime"] = std::string(to_string(r.regime));
  j["rate_bound"] = r.rate_bound;
  j["achieved_rho"] = r.achieved_rho;
  j["master_seed"] = r.master_seed;
  return j.dump(2);
}

std::string estimator_result_json(const EstimatorResult& result, const SeedBundle& seeds) {
  nlohmann::ordered_json j;
  j["method"] = std::string(to_string(result.method));
  j["objective_nats"] = result.objective_value;
  j["support"] = result.support();
  j["theta_bar"] = result.theta_hat.coeffs;
  j["f_hat"] = result.f_hat.values();
  j["candidates_evaluated"] = result.candidates_evaluated;
  j["pruned_count"] = result.pruned_count;
  j["seed_bundle"] = {{"master", seeds.master}, {"matrix", seeds.matrix}, {"signal", seeds.signal}};
  return j.dump(2);
}

void write_observation_csv(std::ostream& out, const Observation& y) {
  out << "index,count,mean_used\n";
  for (std::size_t i = 0; i < y.counts.size(); ++i) {
    out << i << ',' << y.counts[i] << ',' << (i < y.mean_used.size() ? format_double(y.mean_used[i]) : "") << '\n';
  }
}

void write_signal(std::ostream& out, const IntensitySignal& signal, BasisKind basis) {
  out << signal.size() << ' ' << format_double(signal.total_intensity()) << ' ' << to_string(basis) << '\n';
  for (double v : signal.values()) out << format_double(v) << '\n';
}

SignalFile read_signal(std::istream& in) {
  std::string m_text, i_text, basis_text;
  if (!(in >> m_text >> i_text >> basis_text)) throw InvalidArgument("signal file: missing 'm I basis' header");
  std::size_t m = 0;
  {
    const auto [ptr, ec] = std::from_chars(m_text.data(), m_text.data() + m_text.size(), m);
    if (ec != std::errc{} || ptr != m_text.data() + m_text.size() || m == 0) {
      throw InvalidArgument("signal file: bad dimension '" + m_text + "'");
    }
  }
  const double intensity = parse_number(i_text, "intensity");
  const BasisKind basis = parse_basis_kind(basis_text);
  Vector values(m);
  std::string token;
  for (std::size_t j = 0; j < m; ++j) {
    if (!(in >> token)) throw InvalidArgument("signal file: expected " + std::to_string(m) + " values");
    values[j] = parse_number(token, "value");
  }
  if (in >> token) throw InvalidArgument("signal file: trailing data after " + std::to_string(m) + " values");
  return SignalFile{IntensitySignal(std::move(values), intensity), basis};
}

}  // namespace pcs
