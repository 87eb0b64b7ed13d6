#pragma once

// The countable candidate set: quantized coefficient vectors θ (the set Θ),
// their synthesized signals projected onto C = {g >= cI·1, Σg = I}, and the
// three-part prefix code that prices each θ.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pcs/signals.hpp"

namespace pcs {

/// Guard on how many items a single enumeration may visit.
inline constexpr std::uint64_t kEnumerationGuard = 10'000'000;

struct FeasibleSetSpec {
  std::size_t m_dim = 0;
  double total_intensity = 0.0;
  double floor_fraction = 0.0;
  OrthonormalBasis basis{BasisKind::identity, 1};
  int level_count = 1;
  std::size_t k_max = 0;

  /// level_count = 0 selects level_count_for(m). Throws InvalidArgument or
  /// Infeasible (c*m > 1) on violations.
  static FeasibleSetSpec make(std::size_t m_dim, double total_intensity, double floor_fraction, BasisKind basis,
                              std::size_t k_max, int level_count = 0);

  void validate() const;
  int half_levels() const noexcept { return (level_count - 1) / 2; }
  double step() const noexcept { return quantization_step(total_intensity, level_count); }
};

struct FeasibleElement {
  /// θ_pre as integer level indices; coefficient j equals levels[j]·step.
  std::vector<int> levels;
  CoefficientVector theta_pre;
  IntensitySignal f_bar;
  CoefficientVector theta_bar;
  double penalty_bits = 0.0;
  std::size_t support_size = 0;
};

/// ℓ2 projection onto {g >= cI·1, Σg = I}: shift by cI and project onto the
/// simplex of radius I(1 - cm) with the sort-and-threshold rule.
Vector project_onto_C(std::span<const double> f, double floor_fraction, double intensity);

/// log₂(m+1) + (3/2)·k·log₂(m).
double penalty_bits(std::size_t support_size, std::size_t m_dim);

/// Builds the element for a level vector (length m, |level| <= (L-1)/2).
FeasibleElement make_element(const FeasibleSetSpec& spec, std::span<const int> levels);

/// Number of θ with support size at most k: Σ_{j<=k} C(m, j)(L-1)^j.
double gamma_count(std::size_t m_dim, int level_count, std::size_t k);

/// log₂[C(m,k)·m^(k/2)].
double gamma_k_log2_size(std::size_t m_dim, std::size_t k);

enum class KraftBase { two, e };

struct KraftReport {
  double sum = 0.0;
  std::uint64_t supports_visited = 0;
  double codewords = 0.0;
};

/// Σ over θ in Θ with ‖θ‖₀ <= k_max of base^(-penalty_bits(θ)). Every support is
/// visited; the (L-1)^k level assignments on a support share one code length
/// and are added as a block. Throws GuardExceeded when the number of supports
/// exceeds kEnumerationGuard.
KraftReport kraft_sum(const FeasibleSetSpec& spec, KraftBase base = KraftBase::two);

/// Walks θ level vectors with ‖θ‖₀ <= k: support sizes ascending, supports in
/// lexicographic order, nonzero levels in increasing order (last position fastest).
class ThetaCursor {
 public:
  ThetaCursor(std::size_t m_dim, int level_count, std::size_t k);

  /// Level vector of the current θ; valid until the next call to advance().
  const std::vector<int>& levels() const noexcept { return levels_; }
  std::size_t support_size() const noexcept { return support_.size(); }
  std::span<const std::size_t> support() const noexcept { return support_; }
  bool done() const noexcept { return done_; }
  void advance();

 private:
  bool next_support();
  void reset_levels();

  std::size_t m_dim_;
  int half_;
  std::size_t k_max_;
  std::vector<std::size_t> support_;
  std::vector<int> slot_;  // index into the nonzero level list per support position
  std::vector<int> levels_;
  bool done_ = false;
};

/// Yields every element of Γ_k (support size <= k) exactly once, in ThetaCursor order.
class GammaEnumerator {
 public:
  /// Throws GuardExceeded when gamma_count exceeds kEnumerationGuard, and
  /// InvalidArgument when k > spec.k_max.
  GammaEnumerator(const FeasibleSetSpec& spec, std::size_t k);

  std::optional<FeasibleElement> next();
  double size() const noexcept { return count_; }

 private:
  const FeasibleSetSpec* spec_;
  ThetaCursor cursor_;
  double count_;
};

/// Strict ordering used for ties: smaller support first, then lexicographic level vector.
bool tie_precedes(std::span<const int> a, std::size_t support_a, std::span<const int> b, std::size_t support_b);

}  // namespace pcs
