#include "pcs/sensing.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <cmath>
#include <numeric>
#include <string>

#include "pcs/errors.hpp"
#include "pcs/parallel.hpp"
#include "pcs/rng.hpp"

namespace pcs {

SensingMatrix::SensingMatrix(std::size_t n_meas, std::size_t m_dim, std::uint64_t seed,
                             std::vector<std::int8_t> signs)
    : n_meas_(n_meas), m_dim_(m_dim), seed_(seed), signs_(std::move(signs)) {
  row_offsets_.reserve(n_meas_ + 1);
  row_offsets_.push_back(0);
  col_positive_.assign(m_dim_, 0);
  for (std::size_t i = 0; i < n_meas_; ++i) {
    for (std::size_t j = 0; j < m_dim_; ++j) {
      if (signs_[i * m_dim_ + j] > 0) {
        positive_cols_.push_back(static_cast<std::uint32_t>(j));
        ++col_positive_[j];
      }
    }
    row_offsets_.push_back(static_cast<std::uint32_t>(positive_cols_.size()));
  }
}

SensingMatrix SensingMatrix::rademacher(std::size_t n_meas, std::size_t m_dim, std::uint64_t seed) {
  if (n_meas == 0 || m_dim == 0) throw InvalidArgument("sensing matrix dimensions must be positive");
  CounterRng rng(seed);
  std::vector<std::int8_t> signs(n_meas * m_dim);
  // One 32-bit word supplies 32 signs.
  std::uint32_t word = 0;
  unsigned bits_left = 0;
  for (auto& s : signs) {
    if (bits_left == 0) {
      word = rng();
      bits_left = 32;
    }
    s = (word & 1u) ? 1 : -1;
    word >>= 1;
    --bits_left;
  }
  return SensingMatrix(n_meas, m_dim, seed, std::move(signs));
}

SensingMatrix SensingMatrix::from_signs(std::size_t n_meas, std::size_t m_dim, std::span<const int> signs) {
  if (n_meas == 0 || m_dim == 0) throw InvalidArgument("sensing matrix dimensions must be positive");
  if (signs.size() != n_meas * m_dim) throw InvalidArgument("sign array size does not match N*m");
  std::vector<std::int8_t> stored(signs.size());
  for (std::size_t k = 0; k < signs.size(); ++k) {
    if (signs[k] != 1 && signs[k] != -1) {
      throw InvalidArgument("sign entry " + std::to_string(k) + " is " + std::to_string(signs[k]) +
                            ", expected +1 or -1");
    }
    stored[k] = static_cast<std::int8_t>(signs[k]);
  }
  return SensingMatrix(n_meas, m_dim, 0, std::move(stored));
}

SensingMatrix SensingMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  if (rows.empty() || rows.front().empty()) throw InvalidArgument("sensing matrix dimensions must be positive");
  const std::size_t m = rows.front().size();
  std::vector<int> flat;
  flat.reserve(rows.size() * m);
  for (const auto& row : rows) {
    if (row.size() != m) throw InvalidArgument("ragged sign rows");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return from_signs(rows.size(), m, flat);
}

std::span<const std::uint32_t> SensingMatrix::positive_columns(std::size_t row) const noexcept {
  return std::span<const std::uint32_t>(positive_cols_).subspan(row_offsets_[row],
                                                                row_offsets_[row + 1] - row_offsets_[row]);
}

Vector SensingMatrix::apply_tilde(std::span<const double> v) const {
  if (v.size() != m_dim_) throw InvalidArgument("apply_tilde: vector length does not match m");
  Vector out(n_meas_, 0.0);
  const double scale = 1.0 / static_cast<double>(n_meas_);
  for (std::size_t i = 0; i < n_meas_; ++i) {
    const std::int8_t* row = signs_.data() + i * m_dim_;
    double acc = 0.0;
    for (std::size_t j = 0; j < m_dim_; ++j) acc += row[j] > 0 ? v[j] : -v[j];
    out[i] = acc * scale;
  }
  return out;
}

void SensingMatrix::apply_shifted_into(std::span<const double> f, std::span<double> out) const {
  if (f.size() != m_dim_) throw InvalidArgument("apply_shifted: vector length does not match m");
  if (out.size() != n_meas_) throw InvalidArgument("apply_shifted: output length does not match N");
  const double scale = 2.0 / static_cast<double>(n_meas_);
  for (std::size_t i = 0; i < n_meas_; ++i) {
    double acc = 0.0;
    for (const auto j : positive_columns(i)) acc += f[j];
    out[i] = acc * scale;
  }
}

Vector SensingMatrix::apply_shifted(std::span<const double> f) const {
  Vector out(n_meas_);
  apply_shifted_into(f, out);
  return out;
}

bool verify_row_positivity(const SensingMatrix& sm) {
  for (std::size_t i = 0; i < sm.rows(); ++i) {
    if (sm.positive_columns(i).empty()) return false;
  }
  return true;
}

ColumnSumCheck verify_column_sums(const SensingMatrix& sm) {
  // Column sum of Ã is (2·pos_j - N)/N; compare 4·|2·pos_j - N| <= N in integers.
  const auto n = static_cast<long long>(sm.rows());
  ColumnSumCheck check{true, 0.0};
  long long worst = 0;
  for (std::size_t j = 0; j < sm.cols(); ++j) {
    const long long s = 2 * static_cast<long long>(sm.column_positive_count(j)) - n;
    worst = std::max(worst, std::llabs(s));
    if (4 * std::llabs(s) > n) check.holds = false;
  }
  check.max_abs_column_sum = static_cast<double>(worst) / static_cast<double>(n);
  return check;
}

double verify_intensity_bounds(const SensingMatrix& sm, std::span<const double> f) {
  if (f.size() != sm.cols()) throw InvalidArgument("verify_intensity_bounds: vector length does not match m");
  double total = 0.0;
  double weighted = 0.0;
  const double n = static_cast<double>(sm.rows());
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (!(f[j] >= 0.0)) throw InvalidArgument("verify_intensity_bounds: f must be nonnegative");
    total += f[j];
    // Σ_i A(i, j) = 2·pos_j/N.
    weighted += f[j] * (2.0 * static_cast<double>(sm.column_positive_count(j)) / n);
  }
  if (!(total > 0.0)) throw InvalidArgument("verify_intensity_bounds: total intensity must be positive");
  return weighted / total;
}

namespace {

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

// √2·N·‖Ãd‖₂ = √2·‖Zd‖₂.
double isometry_gap(const SensingMatrix& sm, std::span<const double> u, std::span<const double> v) {
  Vector d(u.size());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = u[j] - v[j];
  const Vector ad = sm.apply_tilde(d);
  const double lhs = norm2(d);
  const double rhs = std::sqrt(2.0) * static_cast<double>(sm.rows()) * norm2(ad);
  return lhs - rhs;
}

double isometry_slack(double c, double m, double n) {
  const double arg = std::log(c * m / n);
  return arg > 0.0 ? c * std::sqrt(arg / n) : 0.0;
}

IsometryEstimate solve_isometry_constant(std::size_t n_meas, std::size_t m_dim, double worst_gap,
                                         std::size_t pairs) {
  IsometryEstimate est;
  est.worst_gap = worst_gap;
  est.vacuous = n_meas >= m_dim;
  est.pairs = pairs;
  const double m = static_cast<double>(m_dim);
  const double n = static_cast<double>(n_meas);
  double lo = kIsometryBracketLow;
  double hi = kIsometryBracketHigh;
  if (worst_gap <= isometry_slack(lo, m, n)) {
    est.c2_hat = lo;
    return est;
  }
  if (worst_gap > isometry_slack(hi, m, n)) {
    throw BracketExhausted("isometry constant exceeds the search bracket [1, 1000]");
  }
  // Slack is nondecreasing in c.
  for (int iter = 0; iter < 200 && hi - lo > 1e-12 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (worst_gap <= isometry_slack(mid, m, n)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  est.c2_hat = hi;
  return est;
}

// Symmetric Dirichlet(1) point on the ℓ1 sphere, optionally with random signs.
Vector l1_sphere_sample(CounterRng& rng, std::size_t m, bool signed_entries) {
  Vector v(m);
  double total = 0.0;
  for (auto& x : v) {
    x = rng.exponential();
    total += x;
  }
  for (auto& x : v) {
    x /= total;
    if (signed_entries) x *= rng.sign();
  }
  return v;
}

}  // namespace

IsometryEstimate isometry_constant_for_pairs(const SensingMatrix& sm,
                                             std::span<const std::pair<Vector, Vector>> pairs) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [u, v] : pairs) {
    if (u.size() != sm.cols() || v.size() != sm.cols()) {
      throw InvalidArgument("isometry pair length does not match m");
    }
    worst = std::max(worst, isometry_gap(sm, u, v));
  }
  if (pairs.empty()) worst = 0.0;
  return solve_isometry_constant(sm.rows(), sm.cols(), worst, pairs.size());
}

IsometryEstimate empirical_isometry_pairwise(const SensingMatrix& sm, std::size_t n_pairs, std::uint64_t seed) {
  if (n_pairs == 0) throw InvalidArgument("empirical_isometry_pairwise: n_pairs must be positive");
  CounterRng rng(seed);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < n_pairs; ++p) {
    const bool signed_entries = (p % 2) == 1;
    const Vector u = l1_sphere_sample(rng, sm.cols(), signed_entries);
    const Vector v = l1_sphere_sample(rng, sm.cols(), signed_entries);
    worst = std::max(worst, isometry_gap(sm, u, v));
  }
  return solve_isometry_constant(sm.rows(), sm.cols(), worst, n_pairs);
}

double empirical_isometry_sphere(const SensingMatrix& sm, std::span<const Vector> sphere_set) {
  if (sphere_set.empty()) return 1.0;
  std::size_t passed = 0;
  const double n = static_cast<double>(sm.rows());
  for (const auto& s : sphere_set) {
    if (s.size() != sm.cols()) throw InvalidArgument("sphere vector length does not match m");
    const double norm = norm2(s);
    if (std::abs(norm - 1.0) > 1e-12) throw InvalidArgument("sphere vector is not unit length");
    const double a = norm2(sm.apply_tilde(s));
    const double energy = n * a * a;
    if (energy >= 0.5 && energy <= 1.5) ++passed;
  }
  return static_cast<double>(passed) / static_cast<double>(sphere_set.size());
}

std::vector<Vector> random_unit_vectors(std::size_t count, std::size_t m_dim, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<Vector> out;
  out.reserve(count);
  while (out.size() < count) {
    Vector v(m_dim);
    for (auto& x : v) x = rng.normal();
    const double norm = norm2(v);
    if (norm == 0.0) continue;
    // Normalize, then correct the residual rounding once more.
    for (auto& x : v) x /= norm;
    const double again = norm2(v);
    for (auto& x : v) x /= again;
    out.push_back(std::move(v));
  }
  return out;
}

MatrixPropertyReport matrix_property_report(const SensingMatrix& sm, const ProbeConfig& probes,
                                            std::uint64_t probe_seed) {
  MatrixPropertyReport rep;
  rep.seed = sm.seed();
  rep.n_meas = sm.rows();
  rep.m_dim = sm.cols();
  rep.row_positive_entry = verify_row_positivity(sm);
  const ColumnSumCheck cols = verify_column_sums(sm);
  rep.column_sum_event = cols.holds;
  rep.max_abs_column_sum = cols.max_abs_column_sum;

  const std::size_t m = sm.cols();
  const double intensity = probes.intensity;
  const double c = probes.floor_fraction > 0.0 ? probes.floor_fraction : 1.0 / static_cast<double>(m);
  const double n = static_cast<double>(sm.rows());

  CounterRng rng(derive_seed(probe_seed, Stream::probe));
  rep.intensity_ratio_min = std::numeric_limits<double>::infinity();
  rep.intensity_ratio_max = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < std::max<std::size_t>(probes.intensity_probes, 1); ++p) {
    // Exponential entries give generic f >= 0; every other probe is sparse.
    Vector f(m);
    for (auto& x : f) x = (p % 2 == 1 && rng.uniform() < 0.75) ? 0.0 : rng.exponential();
    if (std::accumulate(f.begin(), f.end(), 0.0) == 0.0) f[rng.below(m)] = 1.0;
    const double ratio = verify_intensity_bounds(sm, f);
    rep.intensity_ratio_min = std::min(rep.intensity_ratio_min, ratio);
    rep.intensity_ratio_max = std::max(rep.intensity_ratio_max, ratio);
    if (rep.column_sum_event && (ratio < 0.75 || ratio > 1.25)) rep.intensity_implication_holds = false;
  }

  if (rep.row_positive_entry) {
    const double floor_level = 2.0 * c * intensity / n - 1e-12;
    Vector f(m, c * intensity);
    const Vector af = sm.apply_shifted(f);
    if (*std::min_element(af.begin(), af.end()) < floor_level) rep.floor_implication_holds = false;
    // Random signals above the floor as well.
    for (std::size_t p = 0; p < probes.intensity_probes; ++p) {
      Vector g(m);
      for (auto& x : g) x = c * intensity + intensity * rng.exponential();
      const Vector ag = sm.apply_shifted(g);
      if (*std::min_element(ag.begin(), ag.end()) < floor_level) rep.floor_implication_holds = false;
    }
  }

  if (probes.isometry_pairs > 0) {
    rep.rip_pairwise_c2_estimate =
        empirical_isometry_pairwise(sm, probes.isometry_pairs, derive_seed(probe_seed, Stream::isometry))
            .c2_hat;
  }
  const auto sphere = random_unit_vectors(probes.sphere_size, m, derive_seed(probe_seed, Stream::sphere));
  rep.rip_sphere_pass_fraction = empirical_isometry_sphere(sm, sphere);
  return rep;
}

std::vector<MatrixPropertyReport> run_property_campaign(std::size_t n_meas, std::size_t m_dim,
                                                        std::size_t trials, std::uint64_t master_seed,
                                                        const ProbeConfig& probes, unsigned threads) {
  if (n_meas == 0 || m_dim == 0) throw InvalidArgument("sensing matrix dimensions must be positive");
  std::vector<MatrixPropertyReport> out(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    const std::uint64_t key = derive_seed(master_seed, Stream::matrix, t);
    const auto sm = SensingMatrix::rademacher(n_meas, m_dim, key);
    out[t] = matrix_property_report(sm, probes, derive_seed(master_seed, Stream::probe, t));
  });
  return out;
}

}  // namespace pcs
