#pragma once

// Poisson observations, likelihoods and divergences between Poisson vectors.
// Natural logarithms throughout.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pcs {

using Vector = std::vector<double>;

struct Observation {
  std::vector<std::int64_t> counts;
  Vector mean_used;
  std::uint64_t seed = 0;
};

/// One Poisson draw. Sequential-search inversion for mean < 30, Hörmann's
/// transformed rejection (PTRS) otherwise. Mean 0 returns 0.
template <class Rng>
std::int64_t poisson_draw(Rng& rng, double mean);

/// Independent Poisson counts per coordinate from the generator keyed by `seed`.
Observation sample_poisson(std::span<const double> mean, std::uint64_t seed);

/// Σ_j [mean_j - y_j·log(mean_j)]; the Σ log(y_j!) term is dropped.
/// Coordinates with mean 0 and count 0 contribute 0; mean 0 with a positive
/// count throws ImpossibleObservation.
double neg_log_likelihood(std::span<const std::int64_t> counts, std::span<const double> mean);
double neg_log_likelihood(const Observation& y, std::span<const double> mean);

/// Σ_j -y_j·log(mean_j): the data term without the total-mass term.
double data_term(std::span<const std::int64_t> counts, std::span<const double> mean);

/// Full -log p(y | mean), including Σ log(y_j!).
double exact_neg_log_likelihood(std::span<const std::int64_t> counts, std::span<const double> mean);

/// Σ_j [μ1·log(μ1/μ2) - μ1 + μ2]. Requires μ2 > 0 wherever μ1 > 0.
double kl_poisson(std::span<const double> mu1, std::span<const double> mu2);

/// Σ_j (√μ1 - √μ2)².
double hellinger_sq(std::span<const double> mu1, std::span<const double> mu2);

/// ∫√(p(y|μ1)p(y|μ2)) dν = exp(-½·hellinger_sq(μ1, μ2)).
double bhattacharyya_affinity(std::span<const double> mu1, std::span<const double> mu2);

}  // namespace pcs

#include "pcs/detail/poisson_draw.hpp"
