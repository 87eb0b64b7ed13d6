#include "pcs/likelihood.hpp"

#include <cmath>
#include <string>

#include "pcs/errors.hpp"
#include "pcs/rng.hpp"

namespace pcs {

namespace {

void check_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw InvalidArgument(std::string(what) + ": length mismatch");
}

}  // namespace

Observation sample_poisson(std::span<const double> mean, std::uint64_t seed) {
  Observation obs;
  obs.seed = seed;
  obs.mean_used.assign(mean.begin(), mean.end());
  obs.counts.resize(mean.size());
  CounterRng rng(seed);
  for (std::size_t j = 0; j < mean.size(); ++j) {
    if (!(mean[j] >= 0.0) || !std::isfinite(mean[j])) {
      throw InvalidArgument("sample_poisson: mean entry " + std::to_string(j) + " is negative or not finite");
    }
    obs.counts[j] = poisson_draw(rng, mean[j]);
  }
  return obs;
}

double neg_log_likelihood(std::span<const std::int64_t> counts, std::span<const double> mean) {
  check_same_size(counts.size(), mean.size(), "neg_log_likelihood");
  double total = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (!(mean[j] >= 0.0)) throw InvalidArgument("neg_log_likelihood: negative mean");
    if (mean[j] == 0.0) {
      if (counts[j] > 0) {
        throw ImpossibleObservation("neg_log_likelihood: zero mean with positive count at index " +
                                    std::to_string(j));
      }
      continue;
    }
    total += mean[j] - static_cast<double>(counts[j]) * std::log(mean[j]);
  }
  return total;
}

double neg_log_likelihood(const Observation& y, std::span<const double> mean) {
  return neg_log_likelihood(y.counts, mean);
}

double data_term(std::span<const std::int64_t> counts, std::span<const double> mean) {
  check_same_size(counts.size(), mean.size(), "data_term");
  double total = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) continue;
    if (!(mean[j] > 0.0)) {
      throw ImpossibleObservation("data_term: zero mean with positive count at index " + std::to_string(j));
    }
    total -= static_cast<double>(counts[j]) * std::log(mean[j]);
  }
  return total;
}

double exact_neg_log_likelihood(std::span<const std::int64_t> counts, std::span<const double> mean) {
  double total = neg_log_likelihood(counts, mean);
  for (const auto y : counts) total += std::lgamma(static_cast<double>(y) + 1.0);
  return total;
}

double kl_poisson(std::span<const double> mu1, std::span<const double> mu2) {
  check_same_size(mu1.size(), mu2.size(), "kl_poisson");
  double total = 0.0;
  for (std::size_t j = 0; j < mu1.size(); ++j) {
    if (!(mu1[j] >= 0.0) || !(mu2[j] >= 0.0)) throw InvalidArgument("kl_poisson: negative mean");
    if (mu1[j] == 0.0) {
      total += mu2[j];
      continue;
    }
    if (mu2[j] == 0.0) throw InvalidArgument("kl_poisson: mu2 must be positive wherever mu1 is positive");
    total += mu1[j] * std::log(mu1[j] / mu2[j]) - mu1[j] + mu2[j];
  }
  return total;
}

double hellinger_sq(std::span<const double> mu1, std::span<const double> mu2) {
  check_same_size(mu1.size(), mu2.size(), "hellinger_sq");
  double total = 0.0;
  for (std::size_t j = 0; j < mu1.size(); ++j) {
    if (!(mu1[j] >= 0.0) || !(mu2[j] >= 0.0)) throw InvalidArgument("hellinger_sq: negative mean");
    const double d = std::sqrt(mu1[j]) - std::sqrt(mu2[j]);
    total += d * d;
  }
  return total;
}

double bhattacharyya_affinity(std::span<const double> mu1, std::span<const double> mu2) {
  return std::exp(-0.5 * hellinger_sq(mu1, mu2));
}

}  // namespace pcs
