#pragma once

// Shifted Rademacher sensing matrices and empirical checks of the matrix
// properties the risk bound depends on.
//
// Only the sign matrix Z is stored. The scaled view Ã = Z/N and the shifted,
// positivity-preserving view A = Ã + (1/N)·1 are applied on the fly, so A's
// entries are exactly 0 or 2/N.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pcs {

using Vector = std::vector<double>;

class SensingMatrix {
 public:
  /// Independent fair signs drawn from the counter-based generator keyed by `seed`.
  static SensingMatrix rademacher(std::size_t n_meas, std::size_t m_dim, std::uint64_t seed);

  /// Wraps a row-major N×m array of ±1 verbatim.
  static SensingMatrix from_signs(std::size_t n_meas, std::size_t m_dim, std::span<const int> signs);
  static SensingMatrix from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t rows() const noexcept { return n_meas_; }
  std::size_t cols() const noexcept { return m_dim_; }
  std::uint64_t seed() const noexcept { return seed_; }

  int sign(std::size_t i, std::size_t j) const noexcept { return signs_[i * m_dim_ + j]; }
  std::span<const std::int8_t> signs() const noexcept { return signs_; }

  /// Column indices j with Z(i, j) = +1, i.e. the support of row i of A.
  std::span<const std::uint32_t> positive_columns(std::size_t row) const noexcept;
  /// Number of +1 entries in column j.
  std::size_t column_positive_count(std::size_t col) const noexcept { return col_positive_[col]; }

  /// (1/N)·Z·v.
  Vector apply_tilde(std::span<const double> v) const;
  /// A·f where A = Ã + (1/N)·1, computed as (2/N)·Σ_{j: Z(i,j)=+1} f_j.
  Vector apply_shifted(std::span<const double> f) const;
  /// apply_shifted into a caller-provided buffer of length N.
  void apply_shifted_into(std::span<const double> f, std::span<double> out) const;

  bool operator==(const SensingMatrix& other) const = default;

 private:
  SensingMatrix(std::size_t n_meas, std::size_t m_dim, std::uint64_t seed, std::vector<std::int8_t> signs);

  std::size_t n_meas_ = 0;
  std::size_t m_dim_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::int8_t> signs_;
  std::vector<std::uint32_t> row_offsets_;
  std::vector<std::uint32_t> positive_cols_;
  std::vector<std::uint32_t> col_positive_;
};

struct ColumnSumCheck {
  bool holds = false;           // |Σ_i Ã(i, j)| <= 1/4 for every column j
  double max_abs_column_sum = 0.0;
};

/// True iff every row of Z has at least one +1.
bool verify_row_positivity(const SensingMatrix& sm);

ColumnSumCheck verify_column_sums(const SensingMatrix& sm);

/// (Σ_ij A(i, j) f_j) / I with I = Σ f. Requires f >= 0 and I > 0.
double verify_intensity_bounds(const SensingMatrix& sm, std::span<const double> f);

struct IsometryEstimate {
  double c2_hat = 1.0;
  /// Largest observed ‖u-v‖₂ - √2·N·‖Ã(u-v)‖₂ over the sampled pairs.
  double worst_gap = 0.0;
  /// N >= m: the pairwise statement carries no information.
  bool vacuous = false;
  std::size_t pairs = 0;
};

inline constexpr double kIsometryBracketLow = 1.0;
inline constexpr double kIsometryBracketHigh = 1.0e3;

/// Smallest c in [1, 1e3] with ‖u-v‖₂ <= √2·N·‖Ã(u-v)‖₂ + c·sqrt(log(c·m/N)/N) over
/// `n_pairs` sampled pairs on the ℓ1 unit sphere. Half of the pairs are drawn
/// from the nonnegative orthant, half with independent random signs; magnitudes
/// are symmetric Dirichlet(1). A negative log is treated as zero slack.
/// Throws BracketExhausted when even c = 1e3 does not cover the worst pair.
IsometryEstimate empirical_isometry_pairwise(const SensingMatrix& sm, std::size_t n_pairs, std::uint64_t seed);

/// Same search over explicit pairs, for deterministic checks.
IsometryEstimate isometry_constant_for_pairs(const SensingMatrix& sm,
                                             std::span<const std::pair<Vector, Vector>> pairs);

/// Fraction of unit vectors s with 1/2 <= N·‖Ãs‖₂² <= 3/2; 1 for an empty set.
double empirical_isometry_sphere(const SensingMatrix& sm, std::span<const Vector> sphere_set);

/// Random unit vectors in R^m (normalized Gaussians).
std::vector<Vector> random_unit_vectors(std::size_t count, std::size_t m_dim, std::uint64_t seed);

struct ProbeConfig {
  std::size_t intensity_probes = 20;
  std::size_t isometry_pairs = 100;
  std::size_t sphere_size = 16;
  double floor_fraction = 0.0;  // 0 selects 1/m
  double intensity = 1.0;
};

struct MatrixPropertyReport {
  std::uint64_t seed = 0;
  std::size_t n_meas = 0;
  std::size_t m_dim = 0;
  bool row_positive_entry = false;
  bool column_sum_event = false;
  double max_abs_column_sum = 0.0;
  double intensity_ratio_min = 0.0;
  double intensity_ratio_max = 0.0;
  double rip_pairwise_c2_estimate = 0.0;
  double rip_sphere_pass_fraction = 0.0;
  /// Deterministic implications; both must hold for every matrix.
  bool floor_implication_holds = true;      // row positivity => A(f) >= 2cI/N for f >= cI
  bool intensity_implication_holds = true;  // column sums => ratio in [3/4, 5/4]
};

/// Runs every check on one matrix. Probe randomness is keyed by `probe_seed`.
MatrixPropertyReport matrix_property_report(const SensingMatrix& sm, const ProbeConfig& probes,
                                            std::uint64_t probe_seed);

/// One report per trial; trial t uses matrix key derive_seed(master, matrix, t).
/// Runs on up to `threads` workers; output order is by trial index.
std::vector<MatrixPropertyReport> run_property_campaign(std::size_t n_meas, std::size_t m_dim,
                                                        std::size_t trials, std::uint64_t master_seed,
                                                        const ProbeConfig& probes, unsigned threads = 0);

}  // namespace pcs
