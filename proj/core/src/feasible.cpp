#include "pcs/feasible.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "pcs/errors.hpp"

namespace pcs {

namespace {

void check_floor(double floor_fraction, std::size_t m_dim) {
  if (!(floor_fraction >= 0.0)) throw InvalidArgument("floor fraction c must be nonnegative");
  if (floor_fraction * static_cast<double>(m_dim) > 1.0 + 1e-12) {
    throw Infeasible("floor fraction c = " + std::to_string(floor_fraction) + " with m = " + std::to_string(m_dim) +
                     " gives c*m > 1; the constraint set is empty");
  }
}

double log2_binomial(std::size_t n, std::size_t k) {
  return (std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
          std::lgamma(static_cast<double>(n - k) + 1.0)) /
         std::log(2.0);
}

double binomial(std::size_t n, std::size_t k) {
  double result = 1.0;
  for (std::size_t i = 1; i <= k; ++i) result = result * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(result);
}

// Next k-combination of {0..m-1} in lexicographic order.
bool next_combination(std::vector<std::size_t>& comb, std::size_t m) {
  const std::size_t k = comb.size();
  for (std::size_t pos = k; pos-- > 0;) {
    if (comb[pos] < m - k + pos) {
      ++comb[pos];
      for (std::size_t q = pos + 1; q < k; ++q) comb[q] = comb[q - 1] + 1;
      return true;
    }
  }
  return false;
}

int nonzero_level(int slot, int half) { return slot < half ? slot - half : slot - half + 1; }

}  // namespace

FeasibleSetSpec FeasibleSetSpec::make(std::size_t m_dim, double total_intensity, double floor_fraction,
                                      BasisKind basis, std::size_t k_max, int level_count) {
  if (m_dim == 0) throw InvalidArgument("m must be positive");
  FeasibleSetSpec spec{m_dim, total_intensity, floor_fraction, OrthonormalBasis(basis, m_dim),
                       level_count == 0 ? level_count_for(m_dim) : level_count, k_max};
  spec.validate();
  return spec;
}

void FeasibleSetSpec::validate() const {
  if (m_dim == 0) throw InvalidArgument("m must be positive");
  if (basis.dim() != m_dim) throw InvalidArgument("basis dimension does not match m");
  if (!(total_intensity > 0.0) || !std::isfinite(total_intensity)) {
    throw InvalidArgument("total intensity I must be positive and finite");
  }
  if (!(floor_fraction > 0.0)) throw InvalidArgument("floor fraction c must be positive");
  check_floor(floor_fraction, m_dim);
  if (level_count < 1 || level_count % 2 == 0) throw InvalidArgument("level count L must be a positive odd integer");
  if (static_cast<double>(level_count) * level_count < static_cast<double>(m_dim)) {
    throw InvalidArgument("level count L must satisfy L >= sqrt(m)");
  }
  if (k_max > m_dim) throw InvalidArgument("k_max must not exceed m");
}

Vector project_onto_C(std::span<const double> f, double floor_fraction, double intensity) {
  const std::size_t m = f.size();
  if (m == 0) throw InvalidArgument("project_onto_C: empty vector");
  if (!(intensity > 0.0)) throw InvalidArgument("project_onto_C: intensity must be positive");
  check_floor(floor_fraction, m);

  const double floor_value = floor_fraction * intensity;
  const double radius = std::max(0.0, intensity * (1.0 - floor_fraction * static_cast<double>(m)));
  Vector out(m, floor_value);
  if (radius == 0.0) return out;

  Vector shifted(m);
  for (std::size_t j = 0; j < m; ++j) shifted[j] = f[j] - floor_value;
  Vector sorted = shifted;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    cumulative += sorted[r];
    const double candidate = (cumulative - radius) / static_cast<double>(r + 1);
    if (sorted[r] - candidate > 0.0) threshold = candidate;
  }
  for (std::size_t j = 0; j < m; ++j) out[j] = floor_value + std::max(shifted[j] - threshold, 0.0);
  return out;
}

double penalty_bits(std::size_t support_size, std::size_t m_dim) {
  if (m_dim == 0) throw InvalidArgument("penalty_bits: m must be positive");
  if (support_size > m_dim) throw InvalidArgument("penalty_bits: support size exceeds m");
  const double m = static_cast<double>(m_dim);
  return std::log2(m + 1.0) + 1.5 * static_cast<double>(support_size) * std::log2(m);
}

FeasibleElement make_element(const FeasibleSetSpec& spec, std::span<const int> levels) {
  if (levels.size() != spec.m_dim) throw InvalidArgument("make_element: level vector length does not match m");
  const int half = spec.half_levels();
  const double step = spec.step();
  Vector coeffs(spec.m_dim);
  std::size_t support = 0;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    if (levels[j] < -half || levels[j] > half) throw InvalidArgument("make_element: level index out of range");
    if (levels[j] != 0) ++support;
    coeffs[j] = levels[j] * step;
  }
  const Vector f = spec.basis.synth(coeffs);
  Vector f_bar = project_onto_C(f, spec.floor_fraction, spec.total_intensity);
  Vector theta_bar = spec.basis.analyze(f_bar);
  return FeasibleElement{std::vector<int>(levels.begin(), levels.end()),
                         CoefficientVector{std::move(coeffs), spec.basis},
                         IntensitySignal(std::move(f_bar), spec.total_intensity),
                         CoefficientVector{std::move(theta_bar), spec.basis},
                         penalty_bits(support, spec.m_dim),
                         support};
}

double gamma_count(std::size_t m_dim, int level_count, std::size_t k) {
  double total = 0.0;
  const double nonzero = static_cast<double>(level_count - 1);
  for (std::size_t j = 0; j <= std::min(k, m_dim); ++j) total += binomial(m_dim, j) * std::pow(nonzero, j);
  return total;
}

double gamma_k_log2_size(std::size_t m_dim, std::size_t k) {
  if (k > m_dim) throw InvalidArgument("gamma_k_log2_size: k exceeds m");
  if (k == 0) return 0.0;
  return log2_binomial(m_dim, k) + 0.5 * static_cast<double>(k) * std::log2(static_cast<double>(m_dim));
}

KraftReport kraft_sum(const FeasibleSetSpec& spec, KraftBase base) {
  spec.validate();
  const std::size_t m = spec.m_dim;
  double supports = 0.0;
  for (std::size_t k = 0; k <= spec.k_max; ++k) supports += binomial(m, k);
  if (supports > static_cast<double>(kEnumerationGuard)) {
    throw GuardExceeded("kraft_sum: " + std::to_string(static_cast<std::uint64_t>(supports)) +
                        " supports exceed the enumeration guard");
  }
  const double log_base = base == KraftBase::two ? std::log(2.0) : 1.0;
  const double log_nonzero = spec.level_count > 1 ? std::log(static_cast<double>(spec.level_count - 1)) : 0.0;

  KraftReport report;
  for (std::size_t k = 0; k <= spec.k_max; ++k) {
    if (k > 0 && spec.level_count == 1) break;
    // All (L-1)^k level assignments on a support share this weight.
    const double block = std::exp(static_cast<double>(k) * log_nonzero - penalty_bits(k, m) * log_base);
    std::vector<std::size_t> comb(k);
    std::iota(comb.begin(), comb.end(), std::size_t{0});
    do {
      report.sum += block;
      report.codewords += std::exp(static_cast<double>(k) * log_nonzero);
      ++report.supports_visited;
    } while (next_combination(comb, m));
  }
  return report;
}

ThetaCursor::ThetaCursor(std::size_t m_dim, int level_count, std::size_t k)
    : m_dim_(m_dim), half_((level_count - 1) / 2), k_max_(std::min(k, m_dim)), levels_(m_dim, 0) {
  if (m_dim == 0) throw InvalidArgument("ThetaCursor: m must be positive");
  if (level_count < 1 || level_count % 2 == 0) throw InvalidArgument("ThetaCursor: level count must be odd");
}

void ThetaCursor::reset_levels() {
  std::fill(levels_.begin(), levels_.end(), 0);
  slot_.assign(support_.size(), 0);
  for (std::size_t p = 0; p < support_.size(); ++p) levels_[support_[p]] = nonzero_level(0, half_);
}

bool ThetaCursor::next_support() {
  if (!support_.empty() && next_combination(support_, m_dim_)) return true;
  const std::size_t size = support_.size() + 1;
  if (size > k_max_ || half_ == 0) return false;
  support_.resize(size);
  std::iota(support_.begin(), support_.end(), std::size_t{0});
  return true;
}

void ThetaCursor::advance() {
  if (done_) return;
  const int slots = 2 * half_;
  for (std::size_t p = support_.size(); p-- > 0;) {
    if (slot_[p] + 1 < slots) {
      ++slot_[p];
      levels_[support_[p]] = nonzero_level(slot_[p], half_);
      for (std::size_t q = p + 1; q < support_.size(); ++q) {
        slot_[q] = 0;
        levels_[support_[q]] = nonzero_level(0, half_);
      }
      return;
    }
  }
  if (!next_support()) {
    done_ = true;
    return;
  }
  reset_levels();
}

GammaEnumerator::GammaEnumerator(const FeasibleSetSpec& spec, std::size_t k)
    : spec_(&spec), cursor_(spec.m_dim, spec.level_count, k), count_(gamma_count(spec.m_dim, spec.level_count, k)) {
  if (k > spec.k_max) throw InvalidArgument("enumerate_gamma: k exceeds k_max");
  if (count_ > static_cast<double>(kEnumerationGuard)) {
    throw GuardExceeded("enumerate_gamma: |Gamma_k| = " + std::to_string(count_) + " exceeds the enumeration guard");
  }
}

std::optional<FeasibleElement> GammaEnumerator::next() {
  if (cursor_.done()) return std::nullopt;
  FeasibleElement element = make_element(*spec_, cursor_.levels());
  cursor_.advance();
  return element;
}

bool tie_precedes(std::span<const int> a, std::size_t support_a, std::span<const int> b, std::size_t support_b) {
  if (support_a != support_b) return support_a < support_b;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace pcs
