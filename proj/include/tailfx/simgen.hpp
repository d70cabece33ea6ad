#pragma once

#include "tailfx/common.hpp"
#include "tailfx/estimator.hpp"
#include "tailfx/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>

namespace tailfx {

// Piecewise-linear dose-response with apex 5 at t = c: rises with `slope`
// until c, declines with `slope` after it.
inline double kink_dose_response(double t, double c, double slope) {
  return 5.0 - slope * std::abs(t - c);
}

struct GeneratedSample {
  ObservationSet data;
  double true_omega = 0.0;  // analytic tail slope of the scenario
  std::function<double(double)> true_mu;  // tail dose-response when known
  Eigen::VectorXd hidden_confounder;      // diagnostics only; usually empty
};

// Worked single-confounder example: a binary trait shifts the treatment, and
// the treatment effect differs by trait above the kink at t = 1.
// Tail slope: 0.75 * 1 + 0.25 * 2 = 1.25.
inline GeneratedSample gen_simple_51(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw DomainError("gen_simple_51: need n >= 1");
  Rng rng(seed);
  GeneratedSample out;
  out.data.confounders.resize(n, 1);
  out.data.treatment.resize(n);
  out.data.outcome.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x1 = rng.bernoulli(0.75) ? 1.0 : 0.0;
    const double t = x1 + rng.normal();
    double y;
    if (t > 1.0)
      y = (x1 == 1.0 ? t : 2.0 * t) + rng.normal();
    else
      y = 2.0 - t + rng.normal();
    out.data.confounders(i, 0) = x1;
    out.data.treatment[i] = t;
    out.data.outcome[i] = y;
  }
  out.true_omega = 1.25;
  out.true_mu = [](double t) { return t > 1.0 ? 1.25 * t : 2.0 - t; };
  return out;
}

enum class NoiseLaw { kGaussianSd10, kExpMean10, kPareto11 };

inline const char* noise_law_name(NoiseLaw law) {
  switch (law) {
    case NoiseLaw::kGaussianSd10: return "gaussian";
    case NoiseLaw::kExpMean10: return "exponential";
    case NoiseLaw::kPareto11: return "pareto";
  }
  return "?";
}

// High-dimensional scenario: equicorrelated Gaussian confounders (pairwise
// correlation 0.1 via a one-factor construction), treatment linear in X with
// a chosen noise law, outcome following the kink response with c = slope = 1.
// Tail slope: -1.
inline GeneratedSample gen_highdim_b1(Eigen::Index n, Eigen::Index d,
                                      NoiseLaw noise, std::uint64_t seed) {
  if (n < 1 || d < 1) throw DomainError("gen_highdim_b1: need n, d >= 1");
  Rng rng(seed);
  Eigen::VectorXd a(d), b(d);
  for (Eigen::Index j = 0; j < d; ++j) a[j] = rng.normal(1.0, 1.0);
  for (Eigen::Index j = 0; j < d; ++j) b[j] = rng.normal(-1.0, 1.0);

  const double shared = std::sqrt(0.1), own = std::sqrt(0.9);
  GeneratedSample out;
  out.data.confounders.resize(n, d);
  out.data.treatment.resize(n);
  out.data.outcome.resize(n);
  Eigen::VectorXd x(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z0 = rng.normal();
    for (Eigen::Index j = 0; j < d; ++j) x[j] = shared * z0 + own * rng.normal();
    double eps_t = 0.0;
    switch (noise) {
      case NoiseLaw::kGaussianSd10: eps_t = 10.0 * rng.normal(); break;
      case NoiseLaw::kExpMean10: eps_t = 10.0 * rng.exponential(); break;
      case NoiseLaw::kPareto11: eps_t = rng.pareto_unit(); break;
    }
    const double t = a.dot(x) + eps_t;
    const double y = kink_dose_response(t, 1.0, 1.0) + b.dot(x) + rng.normal();
    out.data.confounders.row(i) = x;
    out.data.treatment[i] = t;
    out.data.outcome[i] = y;
  }
  out.true_omega = -1.0;
  out.true_mu = [](double t) {
    return t >= 1.0 ? 6.0 - t : 4.0 + t;  // confounder terms average to zero
  };
  return out;
}

// Rows from the dim-variate Gumbel copula with parameter alpha >= 1 via the
// Marshall-Olkin frailty construction: V positive-stable with index 1/alpha
// (Chambers-Mallows-Stuck), U_j = exp(-(E_j / V)^(1/alpha)). alpha = 1 gives
// independent uniforms.
inline Eigen::MatrixXd gumbel_copula_sample(Eigen::Index dim, double alpha,
                                            Eigen::Index n, Rng& rng) {
  if (!(alpha >= 1.0))
    throw DomainError("gumbel_copula_sample: alpha must be >= 1");
  if (dim < 1 || n < 0) throw DomainError("gumbel_copula_sample: bad sizes");
  const double a = 1.0 / alpha;
  Eigen::MatrixXd u(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    double v = 1.0;
    if (alpha > 1.0) {
      const double w = M_PI * rng.uniform_open();
      const double e = rng.exponential();
      v = std::sin(a * w) / std::pow(std::sin(w), 1.0 / a) *
          std::pow(std::sin((1.0 - a) * w) / e, (1.0 - a) / a);
    }
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double ej = rng.exponential();
      u(i, j) = std::exp(-std::pow(ej / v, a));
    }
  }
  return u;
}

// Smooth random function of x in R^dim: a seeded Fourier sum with Gaussian
// amplitudes and frequencies and uniform phases. Bounded with bounded
// derivatives; reproducible from the generator state consumed to build it.
class RandomFourierFunction {
 public:
  RandomFourierFunction(Eigen::Index dim, Rng& rng, int n_terms = 10)
      : weights_(n_terms), frequencies_(n_terms, dim), phases_(n_terms) {
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_terms));
    for (int k = 0; k < n_terms; ++k) {
      weights_[k] = norm * rng.normal();
      for (Eigen::Index j = 0; j < dim; ++j) frequencies_(k, j) = rng.normal();
      phases_[k] = 2.0 * M_PI * rng.uniform();
    }
  }

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    double value = 0.0;
    for (Eigen::Index k = 0; k < weights_.size(); ++k)
      value += weights_[k] * std::cos(frequencies_.row(k).dot(x) + phases_[k]);
    return value;
  }

 private:
  Eigen::VectorXd weights_;
  Eigen::MatrixXd frequencies_;
  Eigen::VectorXd phases_;
};

// Copula scenario: three standard-normal confounders and a unit-exponential
// treatment coupled through a Gumbel copula with parameter alpha; the outcome
// mixes slopes omega/2 and 3*omega/2 on either side of X1 = 0 above t = 1.
// Tail slope: omega (the X1 split is even).
inline GeneratedSample gen_copula_b3(Eigen::Index n, double alpha, double omega,
                                     std::uint64_t seed) {
  if (n < 1) throw DomainError("gen_copula_b3: need n >= 1");
  Rng rng(seed);
  const RandomFourierFunction f(3, rng);
  const Eigen::MatrixXd u = gumbel_copula_sample(4, alpha, n, rng);

  GeneratedSample out;
  out.data.confounders.resize(n, 3);
  out.data.treatment.resize(n);
  out.data.outcome.resize(n);
  Eigen::VectorXd x(3);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j)
      x[j] = standard_normal_quantile(u(i, j));
    const double t = -std::log1p(-u(i, 3));
    const double fx = f(x);
    double y;
    if (t > 1.0)
      y = (x[0] > 0.0 ? 0.5 * omega : 1.5 * omega) * t + fx + rng.normal();
    else
      y = -10.0 * t + 15.0 + fx + rng.normal();
    out.data.confounders.row(i) = x;
    out.data.treatment[i] = t;
    out.data.outcome[i] = y;
  }
  out.true_omega = omega;
  return out;
}

// Hidden-confounder scenario: H ~ N(1,1) drives both treatment and outcome
// with strength delta but is withheld from the emitted data (kept only in
// hidden_confounder for diagnostics). Tail slope: omega for every delta.
inline GeneratedSample gen_hidden_b4(Eigen::Index n, double delta, double omega,
                                     std::uint64_t seed) {
  if (n < 1) throw DomainError("gen_hidden_b4: need n >= 1");
  Rng rng(seed);
  GeneratedSample out;
  out.data.confounders.resize(n, 1);
  out.data.treatment.resize(n);
  out.data.outcome.resize(n);
  out.hidden_confounder.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x1 = rng.bernoulli(0.75) ? 1.0 : 0.0;
    const double h = rng.normal(1.0, 1.0);
    const double t = delta * h + x1 + rng.normal();
    double y;
    if (t > 1.0)
      y = delta * h + (x1 == 1.0 ? 2.0 / 3.0 : 6.0 / 3.0) * omega * t +
          rng.normal();
    else
      y = delta * h + 3.0 - 2.0 * t + rng.normal();
    out.data.confounders(i, 0) = x1;
    out.data.treatment[i] = t;
    out.data.outcome[i] = y;
    out.hidden_confounder[i] = h;
  }
  out.true_omega = omega;
  out.true_mu = [omega, delta](double t) {
    return t > 1.0 ? omega * t + delta : 3.0 - 2.0 * t + delta;
  };
  return out;
}

// Extremal-region scenario: T = X + Student-t noise (Gaussian when nu is
// infinite), outcome following the kink response with apex at c and slope
// |X|. Tail slope: -E|X| = -sqrt(2/pi).
inline GeneratedSample gen_extremal_b5(Eigen::Index n, double c, double nu,
                                       std::uint64_t seed) {
  if (n < 1) throw DomainError("gen_extremal_b5: need n >= 1");
  if (!(nu > 0.0)) throw DomainError("gen_extremal_b5: need nu > 0");
  Rng rng(seed);
  GeneratedSample out;
  out.data.confounders.resize(n, 1);
  out.data.treatment.resize(n);
  out.data.outcome.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = rng.normal();
    const double t = x + rng.student_t(nu);
    const double y = kink_dose_response(t, c, std::abs(x)) + rng.normal();
    out.data.confounders(i, 0) = x;
    out.data.treatment[i] = t;
    out.data.outcome[i] = y;
  }
  const double mean_abs = std::sqrt(2.0 / M_PI);
  out.true_omega = -mean_abs;
  out.true_mu = [c, mean_abs](double t) {
    return 5.0 - mean_abs * std::abs(t - c);
  };
  return out;
}

// Scenario dispatch shared by the benchmark harness and the CLI.
enum class Scenario { kSimple51, kHighdimB1, kCopulaB3, kHiddenB4, kExtremalB5 };

struct ScenarioSpec {
  Scenario variant = Scenario::kSimple51;
  Eigen::Index n = 500;
  // highdim_b1
  Eigen::Index d = 5;
  NoiseLaw noise = NoiseLaw::kExpMean10;
  // copula_b3 / hidden_b4
  double alpha = 1.0;
  double omega = 1.0;
  double delta = 0.0;
  // extremal_b5
  double c = 1.0;
  double nu = std::numeric_limits<double>::infinity();

  GeneratedSample generate(std::uint64_t seed) const {
    switch (variant) {
      case Scenario::kSimple51: return gen_simple_51(n, seed);
      case Scenario::kHighdimB1: return gen_highdim_b1(n, d, noise, seed);
      case Scenario::kCopulaB3: return gen_copula_b3(n, alpha, omega, seed);
      case Scenario::kHiddenB4: return gen_hidden_b4(n, delta, omega, seed);
      case Scenario::kExtremalB5: return gen_extremal_b5(n, c, nu, seed);
    }
    throw DomainError("ScenarioSpec: unknown variant");
  }

  std::string params_label() const {
    auto fmt = [](double v) {
      if (std::isinf(v)) return std::string("inf");
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%g", v);
      return std::string(buf);
    };
    switch (variant) {
      case Scenario::kSimple51:
        return "";
      case Scenario::kHighdimB1:
        return "d=" + std::to_string(d) + ",noise=" + noise_law_name(noise);
      case Scenario::kCopulaB3:
        return "alpha=" + fmt(alpha) + ",omega=" + fmt(omega);
      case Scenario::kHiddenB4:
        return "delta=" + fmt(delta) + ",omega=" + fmt(omega);
      case Scenario::kExtremalB5:
        return "nu=" + fmt(nu) + ",c=" + fmt(c);
    }
    return "";
  }

  std::string name() const {
    switch (variant) {
      case Scenario::kSimple51: return "simple_51";
      case Scenario::kHighdimB1: return "highdim_b1";
      case Scenario::kCopulaB3: return "copula_b3";
      case Scenario::kHiddenB4: return "hidden_b4";
      case Scenario::kExtremalB5: return "extremal_b5";
    }
    return "?";
  }
};

}  // namespace tailfx
