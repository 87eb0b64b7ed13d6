#include "pcs/signals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "pcs/errors.hpp"
#include "pcs/feasible.hpp"
#include "pcs/rng.hpp"

namespace pcs {

std::string_view to_string(BasisKind kind) noexcept {
  switch (kind) {
    case BasisKind::identity: return "identity";
    case BasisKind::haar: return "haar";
    case BasisKind::dct: return "dct";
  }
  return "unknown";
}

BasisKind parse_basis_kind(std::string_view text) {
  if (text == "identity") return BasisKind::identity;
  if (text == "haar") return BasisKind::haar;
  if (text == "dct") return BasisKind::dct;
  throw InvalidArgument("unknown basis kind '" + std::string(text) + "' (expected identity, haar or dct)");
}

namespace {

bool is_power_of_two(std::size_t m) { return m != 0 && (m & (m - 1)) == 0; }

std::shared_ptr<const std::vector<double>> make_dct_matrix(std::size_t m) {
  auto w = std::make_shared<std::vector<double>>(m * m);
  const double md = static_cast<double>(m);
  for (std::size_t n = 0; n < m; ++n) {
    for (std::size_t k = 0; k < m; ++k) {
      const double scale = k == 0 ? std::sqrt(1.0 / md) : std::sqrt(2.0 / md);
      (*w)[n * m + k] =
          scale * std::cos(std::numbers::pi * (2.0 * static_cast<double>(n) + 1.0) * static_cast<double>(k) /
                           (2.0 * md));
    }
  }
  return w;
}

void haar_analyze(std::span<const double> f, std::span<double> out) {
  const std::size_t m = f.size();
  std::vector<double> work(f.begin(), f.end());
  std::vector<double> next(m);
  for (std::size_t len = m; len > 1; len /= 2) {
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < half; ++i) {
      next[i] = (work[2 * i] + work[2 * i + 1]) * std::numbers::sqrt2 / 2.0;
      out[half + i] = (work[2 * i] - work[2 * i + 1]) * std::numbers::sqrt2 / 2.0;
    }
    std::copy_n(next.begin(), half, work.begin());
  }
  out[0] = work[0];
}

void haar_synth(std::span<const double> theta, std::span<double> out) {
  const std::size_t m = theta.size();
  std::vector<double> work(m);
  std::vector<double> next(m);
  work[0] = theta[0];
  for (std::size_t len = 1; len < m; len *= 2) {
    for (std::size_t i = 0; i < len; ++i) {
      const double a = work[i];
      const double d = theta[len + i];
      next[2 * i] = (a + d) * std::numbers::sqrt2 / 2.0;
      next[2 * i + 1] = (a - d) * std::numbers::sqrt2 / 2.0;
    }
    std::copy_n(next.begin(), 2 * len, work.begin());
  }
  std::copy(work.begin(), work.end(), out.begin());
}

}  // namespace

OrthonormalBasis::OrthonormalBasis(BasisKind kind, std::size_t m_dim) : kind_(kind), m_dim_(m_dim) {
  if (m_dim == 0) throw InvalidArgument("basis dimension must be positive");
  if (kind == BasisKind::haar && !is_power_of_two(m_dim)) {
    throw InvalidArgument("haar basis requires m to be a power of two, got " + std::to_string(m_dim));
  }
  if (kind == BasisKind::dct) dct_ = make_dct_matrix(m_dim);
}

void OrthonormalBasis::synth_into(std::span<const double> theta, std::span<double> out) const {
  if (theta.size() != m_dim_ || out.size() != m_dim_) throw InvalidArgument("synth: dimension mismatch");
  switch (kind_) {
    case BasisKind::identity:
      std::copy(theta.begin(), theta.end(), out.begin());
      break;
    case BasisKind::haar:
      haar_synth(theta, out);
      break;
    case BasisKind::dct: {
      const auto& w = *dct_;
      for (std::size_t n = 0; n < m_dim_; ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < m_dim_; ++k) acc += w[n * m_dim_ + k] * theta[k];
        out[n] = acc;
      }
      break;
    }
  }
}

Vector OrthonormalBasis::synth(std::span<const double> theta) const {
  Vector out(m_dim_);
  synth_into(theta, out);
  return out;
}

Vector OrthonormalBasis::analyze(std::span<const double> f) const {
  if (f.size() != m_dim_) throw InvalidArgument("analyze: dimension mismatch");
  Vector out(m_dim_);
  switch (kind_) {
    case BasisKind::identity:
      std::copy(f.begin(), f.end(), out.begin());
      break;
    case BasisKind::haar:
      haar_analyze(f, out);
      break;
    case BasisKind::dct: {
      const auto& w = *dct_;
      for (std::size_t k = 0; k < m_dim_; ++k) {
        double acc = 0.0;
        for (std::size_t n = 0; n < m_dim_; ++n) acc += w[n * m_dim_ + k] * f[n];
        out[k] = acc;
      }
      break;
    }
  }
  return out;
}

Vector OrthonormalBasis::atom(std::size_t j) const {
  if (j >= m_dim_) throw InvalidArgument("atom index out of range");
  Vector e(m_dim_, 0.0);
  e[j] = 1.0;
  return synth(e);
}

IntensitySignal::IntensitySignal(Vector values, double total_intensity)
    : values_(std::move(values)), total_intensity_(total_intensity) {
  if (!(total_intensity_ >= 0.0) || !std::isfinite(total_intensity_)) {
    throw InvalidArgument("total intensity must be finite and nonnegative");
  }
  double sum = 0.0;
  for (double v : values_) {
    if (!(v >= 0.0)) throw InvalidArgument("intensity signal has a negative or NaN entry");
    sum += v;
  }
  if (std::abs(sum - total_intensity_) > 1e-9 * total_intensity_) {
    throw InvalidArgument("intensity signal sum does not match its declared total intensity");
  }
}

void WeakLqParams::validate() const {
  if (!(q > 0.0 && q < 2.0)) throw InvalidArgument("weak-lq exponent q must lie in (0, 2)");
  if (!(rho > 0.0)) throw InvalidArgument("weak-lq radius rho must be positive");
}

double weak_lq_radius(std::span<const double> theta, double intensity, double q) {
  if (!(intensity > 0.0)) throw InvalidArgument("weak_lq_radius: intensity must be positive");
  std::vector<double> mags(theta.size());
  std::transform(theta.begin(), theta.end(), mags.begin(), [](double x) { return std::abs(x); });
  std::sort(mags.begin(), mags.end(), std::greater<>());
  // Log domain: j^(-1/q) underflows for small q.
  double best_log = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < mags.size(); ++j) {
    if (mags[j] == 0.0) break;
    const double log_rho = std::log(mags[j]) - std::log(intensity) + std::log(static_cast<double>(j + 1)) / q;
    best_log = std::max(best_log, log_rho);
  }
  return std::exp(best_log);
}

WeakLqSample generate_weak_lq(const WeakLqParams& params, std::size_t m_dim, double intensity,
                              double floor_fraction, const OrthonormalBasis& basis, std::uint64_t seed) {
  params.validate();
  if (basis.dim() != m_dim) throw InvalidArgument("generate_weak_lq: basis dimension does not match m");
  if (!(intensity > 0.0)) throw InvalidArgument("generate_weak_lq: intensity must be positive");
  if (!(floor_fraction >= 0.0)) throw InvalidArgument("generate_weak_lq: floor fraction must be nonnegative");
  if (floor_fraction * static_cast<double>(m_dim) > 1.0) {
    throw Infeasible("generate_weak_lq: c*m > 1 leaves the constraint set empty");
  }

  CounterRng rng(seed);
  std::vector<std::size_t> order(m_dim);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Fisher-Yates with the counter generator.
  for (std::size_t i = m_dim; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  Vector theta(m_dim, 0.0);
  for (std::size_t j = 0; j < m_dim; ++j) {
    const double magnitude = params.rho * intensity * std::pow(static_cast<double>(j + 1), -1.0 / params.q);
    const int sign = j == 0 ? 1 : rng.sign();
    theta[order[j]] = sign * magnitude;
  }
  const Vector f = basis.synth(theta);
  Vector projected = project_onto_C(f, floor_fraction, intensity);
  Vector coeffs = basis.analyze(projected);
  const double rho = weak_lq_radius(coeffs, intensity, params.q);
  return WeakLqSample{IntensitySignal(std::move(projected), intensity), CoefficientVector{std::move(coeffs), basis},
                      rho};
}

Vector best_k_term(std::span<const double> theta, std::size_t k) {
  if (k > theta.size()) throw InvalidArgument("best_k_term: k exceeds the vector length");
  std::vector<std::size_t> order(theta.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(theta[a]) > std::abs(theta[b]); });
  Vector out(theta.size(), 0.0);
  for (std::size_t r = 0; r < k; ++r) out[order[r]] = theta[order[r]];
  return out;
}

Vector approximation_profile(std::span<const double> theta, double intensity) {
  if (!(intensity > 0.0)) throw InvalidArgument("approximation_profile: intensity must be positive");
  const std::size_t m = theta.size();
  std::vector<double> sq(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double x = theta[j] / intensity;
    sq[j] = x * x;
  }
  std::sort(sq.begin(), sq.end(), std::greater<>());
  // Tail sums accumulated from the smallest entry up, so entry m is exactly 0
  // and the sequence is nonincreasing in floating point.
  Vector profile(m + 1, 0.0);
  for (std::size_t k = m; k-- > 0;) profile[k] = profile[k + 1] + sq[k];
  return profile;
}

int level_count_for(std::size_t m_dim) {
  if (m_dim == 0) throw InvalidArgument("level_count_for: m must be positive");
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(m_dim)));
  while (r * r < m_dim) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= m_dim) --r;
  if (r % 2 == 0) ++r;
  return static_cast<int>(r);
}

double quantization_step(double intensity, int level_count) noexcept {
  return 2.0 * intensity / static_cast<double>(level_count);
}

std::vector<int> quantize_indices(std::span<const double> theta, double intensity, int level_count) {
  if (!(intensity > 0.0)) throw InvalidArgument("quantize: intensity must be positive");
  if (level_count < 1 || level_count % 2 == 0) throw InvalidArgument("quantize: level count must be odd");
  const double step = quantization_step(intensity, level_count);
  const int half = (level_count - 1) / 2;
  std::vector<int> idx(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    if (!(std::abs(theta[j]) <= intensity)) throw InvalidArgument("quantize: |theta| exceeds the intensity I");
    const double r = std::round(theta[j] / step);
    idx[j] = std::clamp(static_cast<int>(r), -half, half);
  }
  return idx;
}

Vector quantize_with_levels(std::span<const double> theta, double intensity, int level_count) {
  const auto idx = quantize_indices(theta, intensity, level_count);
  const double step = quantization_step(intensity, level_count);
  Vector out(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) out[j] = idx[j] * step;
  return out;
}

Vector quantize(std::span<const double> theta, double intensity, std::size_t m_dim) {
  return quantize_with_levels(theta, intensity, level_count_for(m_dim));
}

}  // namespace pcs
