#pragma once

#include "tailfx/common.hpp"
#include "tailfx/estimator.hpp"
#include "tailfx/rng.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tailfx {

struct BootstrapResult {
  double point = 0.0;             // statistic on the original data
  std::vector<double> resampled;  // successful resample statistics, in order
  double level = 0.95;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t n_failed = 0;
};

namespace detail {

inline ObservationSet resample_rows(const ObservationSet& data, Rng& rng) {
  const auto n = data.size();
  ObservationSet out;
  out.confounders.resize(n, data.confounders.cols());
  out.treatment.resize(n);
  out.outcome.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto j = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(n));
    out.confounders.row(i) = data.confounders.row(j);
    out.treatment[i] = data.treatment[j];
    out.outcome[i] = data.outcome[j];
  }
  return out;
}

}  // namespace detail

// Percentile bootstrap for a vector-valued statistic. All components share
// one resample index stream, so component k matches a scalar bootstrap_ci run
// with the same seed. Resample b draws its rows from seed derive_seed(seed, b);
// refits that throw a tailfx::Error are counted, and the run aborts once more
// than 10% of the B resamples have failed.
inline std::vector<BootstrapResult> bootstrap_ci_many(
    const ObservationSet& data,
    const std::function<std::vector<double>(const ObservationSet&)>& statistic,
    std::size_t n_statistics, std::size_t B, double level, std::uint64_t seed) {
  if (B < 100) throw DomainError("bootstrap: need B >= 100 resamples");
  if (!(level > 0.0 && level < 1.0))
    throw DomainError("bootstrap: level must be in (0,1)");
  if (n_statistics == 0) throw DomainError("bootstrap: no statistics");
  data.validate();

  // Errors on the original data are the caller's problem, not a resample
  // failure.
  const std::vector<double> point = statistic(data);
  if (point.size() != n_statistics)
    throw DomainError("bootstrap: statistic arity mismatch");

  std::vector<std::vector<double>> draws(n_statistics);
  for (auto& v : draws) v.reserve(B);
  std::size_t n_failed = 0;
  std::string first_failure;
  const std::size_t max_failures = B / 10;
  for (std::size_t b = 0; b < B; ++b) {
    Rng rng(derive_seed(seed, b));
    const ObservationSet resample = detail::resample_rows(data, rng);
    try {
      const std::vector<double> value = statistic(resample);
      if (value.size() != n_statistics)
        throw DomainError("bootstrap: statistic arity mismatch");
      for (std::size_t s = 0; s < n_statistics; ++s)
        draws[s].push_back(value[s]);
    } catch (const Error& e) {
      ++n_failed;
      if (first_failure.empty()) first_failure = e.what();
      if (n_failed > max_failures)
        throw BootstrapDegeneracyError(
            "bootstrap: " + std::to_string(n_failed) + " of " +
            std::to_string(b + 1) + " resamples failed (tolerance " +
            std::to_string(max_failures) + " of " + std::to_string(B) +
            "); first failure: " + first_failure);
    }
  }

  std::vector<BootstrapResult> results(n_statistics);
  const double tail = 0.5 * (1.0 - level);
  for (std::size_t s = 0; s < n_statistics; ++s) {
    results[s].point = point[s];
    results[s].resampled = draws[s];
    results[s].level = level;
    results[s].lower = empirical_quantile(draws[s], tail);
    results[s].upper = empirical_quantile(draws[s], 1.0 - tail);
    results[s].n_failed = n_failed;
  }
  return results;
}

// Percentile bootstrap confidence interval for a scalar statistic of the
// sample: rows (x_i, t_i, y_i) are drawn with replacement, the statistic is
// recomputed per resample, and the interval takes the empirical quantiles at
// (1-level)/2 and 1-(1-level)/2 of the successful evaluations.
inline BootstrapResult bootstrap_ci(
    const ObservationSet& data,
    const std::function<double(const ObservationSet&)>& statistic,
    std::size_t B, double level, std::uint64_t seed) {
  auto wrapped = [&statistic](const ObservationSet& sample) {
    return std::vector<double>{statistic(sample)};
  };
  return bootstrap_ci_many(data, wrapped, 1, B, level, seed)[0];
}

}  // namespace tailfx
