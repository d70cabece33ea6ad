#pragma once

#include "tailfx/common.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace tailfx {

namespace detail {

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Derives an independent child seed from a master seed and a stream index.
// Every module draws its randomness from streams split this way, so a single
// top-level seed reproduces an entire run.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return detail::splitmix64_mix(master ^ ((stream + 1) * 0x9E3779B97F4A7C15ULL));
}

// Inverse standard-normal CDF. Acklam's rational approximation polished with
// one Halley step against erfc, accurate to ~1e-15 over (0,1).
inline double standard_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("standard_normal_quantile: p must be in (0,1)");
  if (p > 0.5) return -standard_normal_quantile(1.0 - p);

  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};

  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }

  // Halley refinement; x <= 0 here so erfc sees a nonnegative argument.
  const double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = err * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

inline double standard_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Deterministic random source. Wraps mt19937_64 but performs every
// distributional transform itself, so a given seed yields the same stream of
// variates on any platform and in any build mode.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0,1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1); safe to feed through logs and quantile functions.
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // One engine draw per variate (inverse-CDF).
  double normal() { return standard_normal_quantile(uniform_open()); }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Standard exponential, mean 1.
  double exponential() { return -std::log1p(-uniform()); }

  bool bernoulli(double p) { return uniform() < p; }

  // Pareto with unit scale and unit tail index: P(X > x) = 1/x for x >= 1.
  double pareto_unit() { return 1.0 / (1.0 - uniform()); }

  // Gamma(shape, 1) via Marsaglia-Tsang, with the usual boost for shape < 1.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw DomainError("Rng::gamma: shape must be > 0");
    if (shape < 1.0) {
      const double u = uniform_open();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform_open();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

  // Student-t with dof degrees of freedom. An infinite dof collapses to the
  // plain normal draw, consuming exactly the same engine state as normal().
  double student_t(double dof) {
    if (!(dof > 0.0)) throw DomainError("Rng::student_t: dof must be > 0");
    const double z = normal();
    if (std::isinf(dof)) return z;
    const double w = chi_squared(dof);
    return z * std::sqrt(dof / w);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tailfx
