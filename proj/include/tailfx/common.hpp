#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace tailfx {

// Base class for every recoverable error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument values (levels outside (0,1), negative scales, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Rank-deficient design matrix.
class SingularDesignError : public Error {
 public:
  using Error::Error;
};

// Too few observations for the requested fit.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// The exceedance set is too small for the outcome model; carries q and |S|.
class InsufficientExceedancesError : public InsufficientDataError {
 public:
  InsufficientExceedancesError(double level, std::size_t n_exceedances,
                               std::size_t required)
      : InsufficientDataError(
            "exceedance set too small: level q=" + std::to_string(level) +
            " left |S|=" + std::to_string(n_exceedances) + ", need at least " +
            std::to_string(required)),
        level_(level),
        n_exceedances_(n_exceedances) {}

  double level() const { return level_; }
  std::size_t n_exceedances() const { return n_exceedances_; }

 private:
  double level_;
  std::size_t n_exceedances_;
};

// Iterative solver exhausted its budget; carries the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd last_iterate)
      : Error(what), last_iterate_(std::move(last_iterate)) {}

  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }

 private:
  Eigen::VectorXd last_iterate_;
};

// More than the tolerated share of bootstrap resamples failed to refit.
class BootstrapDegeneracyError : public Error {
 public:
  using Error::Error;
};

// More than the tolerated share of benchmark replications failed.
class ExcessiveFailuresError : public Error {
 public:
  using Error::Error;
};

// Empirical quantile with linear interpolation between order statistics:
// with m sorted values v[0..m-1], returns v[h] interpolated at h = (m-1)p
// (the 1-based index formula (m-1)p + 1).
inline double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw DomainError("empirical_quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0))
    throw DomainError("empirical_quantile: p must be in [0,1]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

inline void require_all_finite(const Eigen::Ref<const Eigen::MatrixXd>& m,
                               const char* name) {
  if (!m.allFinite())
    throw DomainError(std::string(name) + ": non-finite entries");
}

}  // namespace tailfx
