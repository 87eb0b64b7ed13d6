#pragma once

// Orthonormal bases, compressible signal generation, best-k-term approximation
// and coefficient quantization.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcs {

using Vector = std::vector<double>;

enum class BasisKind { identity, haar, dct };

std::string_view to_string(BasisKind kind) noexcept;
/// Accepts "identity", "haar" or "dct"; throws InvalidArgument otherwise.
BasisKind parse_basis_kind(std::string_view text);

/// An orthonormal m×m matrix W. synth computes Wθ, analyze computes Wᵀf.
///
/// haar: multilevel orthonormal Haar transform; coefficient 0 is the scaling
///       coefficient (constant atom), then detail coefficients from coarsest to
///       finest. Requires m to be a power of two.
/// dct:  orthonormal DCT-II; column k of W is the k-th cosine atom.
class OrthonormalBasis {
 public:
  OrthonormalBasis(BasisKind kind, std::size_t m_dim);

  BasisKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return m_dim_; }

  Vector synth(std::span<const double> theta) const;
  Vector analyze(std::span<const double> f) const;
  void synth_into(std::span<const double> theta, std::span<double> out) const;

  /// Column j of W (the j-th atom).
  Vector atom(std::size_t j) const;

  bool operator==(const OrthonormalBasis& other) const noexcept {
    return kind_ == other.kind_ && m_dim_ == other.m_dim_;
  }

 private:
  BasisKind kind_;
  std::size_t m_dim_;
  std::shared_ptr<const std::vector<double>> dct_;  // row-major W for the dct kind
};

/// A nonnegative intensity vector with its declared total intensity I.
class IntensitySignal {
 public:
  /// Validates values >= 0 and |Σ values - I| <= 1e-9·I.
  IntensitySignal(Vector values, double total_intensity);

  const Vector& values() const noexcept { return values_; }
  double total_intensity() const noexcept { return total_intensity_; }
  std::size_t size() const noexcept { return values_.size(); }

  bool operator==(const IntensitySignal&) const = default;

 private:
  Vector values_;
  double total_intensity_;
};

struct CoefficientVector {
  Vector coeffs;
  OrthonormalBasis basis;

  Vector synth() const { return basis.synth(coeffs); }
};

/// Weak-ℓq ball parameters: |θ_(j)| <= ρ·I·j^(-1/q).
struct WeakLqParams {
  double q = 1.0;
  double rho = 1.0;

  double alpha() const noexcept { return 1.0 / q - 0.5; }
  /// Throws InvalidArgument unless 0 < q < 2 and rho > 0.
  void validate() const;
};

struct WeakLqSample {
  IntensitySignal signal;
  CoefficientVector coefficients;
  /// Smallest ρ' with |θ_(j)| <= ρ'·I·j^(-1/q) for the returned coefficients.
  double achieved_rho;
};

/// Draws magnitudes ρ·I·j^(-1/q) assigned to a random permutation of the
/// coordinates with random signs (the largest magnitude is kept positive),
/// synthesizes, projects onto {f >= cI, Σf = I} and re-analyzes.
WeakLqSample generate_weak_lq(const WeakLqParams& params, std::size_t m_dim, double intensity,
                              double floor_fraction, const OrthonormalBasis& basis, std::uint64_t seed);

/// Smallest ρ' such that sorted magnitudes obey |θ_(j)| <= ρ'·I·j^(-1/q).
double weak_lq_radius(std::span<const double> theta, double intensity, double q);

/// Keeps the k largest-magnitude entries; ties go to the smaller index.
Vector best_k_term(std::span<const double> theta, std::size_t k);

/// Entry k (k = 0..m) is ‖θ/I - θ^(k)/I‖₂².
Vector approximation_profile(std::span<const double> theta, double intensity);

/// Smallest odd integer >= √m.
int level_count_for(std::size_t m_dim);

/// Quantization step 2I/L; level j sits at j·2I/L for |j| <= (L-1)/2. These are
/// the midpoints of L equal bins covering [-I, I], so 0 is always a level.
double quantization_step(double intensity, int level_count) noexcept;

/// Nearest level index per entry. Requires ‖θ‖∞ <= I.
std::vector<int> quantize_indices(std::span<const double> theta, double intensity, int level_count);

/// Quantization with L = level_count_for(m).
Vector quantize(std::span<const double> theta, double intensity, std::size_t m_dim);
Vector quantize_with_levels(std::span<const double> theta, double intensity, int level_count);

}  // namespace pcs
