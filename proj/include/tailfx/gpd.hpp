#pragma once

#include "tailfx/common.hpp"
#include "tailfx/nelder_mead.hpp"
#include "tailfx/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace tailfx {

// Generalized Pareto parameters. Support starts at `location`; for
// shape < 0 it ends at location - scale/shape.
struct GpdParams {
  double location = 0.0;
  double scale = 1.0;
  double shape = 0.0;

  void validate() const {
    if (!(scale > 0.0)) throw DomainError("GpdParams: scale must be > 0");
    if (!std::isfinite(location) || !std::isfinite(scale) ||
        !std::isfinite(shape))
      throw DomainError("GpdParams: parameters must be finite");
  }
};

inline double gpd_cdf(double x, const GpdParams& p) {
  p.validate();
  const double z = (x - p.location) / p.scale;
  if (z <= 0.0) return 0.0;
  if (p.shape == 0.0) return -std::expm1(-z);
  const double t = p.shape * z;
  if (t <= -1.0) return 1.0;  // at or beyond the upper endpoint (shape < 0)
  return -std::expm1(-std::log1p(t) / p.shape);
}

inline double gpd_quantile(double prob, const GpdParams& p) {
  p.validate();
  if (!(prob >= 0.0 && prob < 1.0))
    throw DomainError("gpd_quantile: probability must be in [0,1)");
  if (p.shape == 0.0) return p.location - p.scale * std::log1p(-prob);
  return p.location +
         p.scale * std::expm1(-p.shape * std::log1p(-prob)) / p.shape;
}

// Inverse-CDF sampling; one uniform draw per variate.
inline std::vector<double> gpd_sample(const GpdParams& p, std::size_t n,
                                      Rng& rng) {
  p.validate();
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(gpd_quantile(rng.uniform(), p));
  return out;
}

// Tail model fitted to threshold excesses: sigma(x) = exp(w . [1, x]) with a
// shape held constant across covariates. When the fit used a constant scale,
// `scale_link` has the single intercept entry.
struct GpdFit {
  Eigen::VectorXd scale_link;
  double shape = 0.0;
  double log_likelihood = 0.0;
  std::size_t n_exceedances = 0;
  bool covariate_scale = false;

  double scale_at(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (!covariate_scale) return std::exp(scale_link[0]);
    if (x.size() + 1 != scale_link.size())
      throw DomainError("GpdFit::scale_at: covariate width mismatch");
    return std::exp(scale_link[0] + scale_link.tail(x.size()).dot(x));
  }
};

namespace detail {

// Below this magnitude the shape is treated as zero and the exponential
// log-likelihood limit is used.
inline constexpr double kShapeEpsilon = 1e-6;
inline constexpr double kSupportPenalty = 1e10;

// Negative log-likelihood of GPD excesses with log-linked scale. Parameter
// vector is (w..., shape). Points outside the likelihood support are handled
// by a penalty that slopes back toward feasibility.
inline double gpd_negloglik(const Eigen::VectorXd& params,
                            const Eigen::VectorXd& excesses,
                            const Eigen::MatrixXd& design) {
  const auto k = excesses.size();
  const auto p = design.cols();
  const double shape = params[p];
  if (!(shape > -0.95 && shape < 10.0))
    return kSupportPenalty + std::abs(shape);

  Eigen::VectorXd eta = design * params.head(p);
  double penalty = 0.0;
  double nll = 0.0;
  const bool exponential_limit = std::abs(shape) < kShapeEpsilon;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (eta[i] > 700.0 || eta[i] < -700.0) {
      penalty += std::abs(eta[i]) - 700.0;
      continue;
    }
    const double z = excesses[i] * std::exp(-eta[i]);
    if (exponential_limit) {
      nll += eta[i] + z;
    } else {
      const double t = shape * z;
      if (t <= -1.0 + 1e-12) {
        penalty += -(t + 1.0) + 1e-6;
        continue;
      }
      nll += eta[i] + (1.0 + 1.0 / shape) * std::log1p(t);
    }
  }
  if (penalty > 0.0) return kSupportPenalty + penalty;
  return nll;
}

}  // namespace detail

// Maximum-likelihood GPD fit to positive excesses. `covariates` supplies the
// rows x_i for the log-linked scale; it is ignored when covariate_scale is
// false. Starts from method-of-moments values and refines with Nelder-Mead.
inline GpdFit fit_gpd_mle(const Eigen::VectorXd& excesses,
                          const Eigen::MatrixXd& covariates,
                          bool covariate_scale) {
  const auto k = excesses.size();
  if (k < 5)
    throw InsufficientDataError("fit_gpd_mle: need at least 5 excesses, got " +
                                std::to_string(k));
  if ((excesses.array() <= 0.0).any())
    throw DomainError("fit_gpd_mle: excesses must be strictly positive");
  require_all_finite(excesses, "fit_gpd_mle excesses");
  if (covariate_scale) {
    if (covariates.rows() != k)
      throw DomainError("fit_gpd_mle: covariate rows must match excess count");
    require_all_finite(covariates, "fit_gpd_mle covariates");
  }

  const Eigen::Index d = covariate_scale ? covariates.cols() : 0;
  Eigen::MatrixXd design(k, d + 1);
  design.col(0).setOnes();
  if (d > 0) design.rightCols(d) = covariates;

  // Moment start: shape from the excess coefficient of variation, scale from
  // the mean.
  const double mean = excesses.mean();
  const double var =
      (excesses.array() - mean).square().sum() / static_cast<double>(k - 1);
  double shape0 = 0.0;
  double scale0 = mean;
  if (var > 1e-300) {
    shape0 = 0.5 * (1.0 - mean * mean / var);
    scale0 = 0.5 * mean * (mean * mean / var + 1.0);
  }
  shape0 = std::clamp(shape0, -0.4, 2.0);
  scale0 = std::max(scale0, 1e-8);

  Eigen::VectorXd start = Eigen::VectorXd::Zero(d + 2);
  start[0] = std::log(scale0);
  start[d + 1] = shape0;

  auto objective = [&](const Eigen::VectorXd& params) {
    return detail::gpd_negloglik(params, excesses, design);
  };

  SimplexOptions opt;
  opt.initial_step = 0.25;
  SimplexResult res = minimize_simplex(objective, start, opt);
  if (!res.converged)
    throw ConvergenceError(
        "fit_gpd_mle: optimizer exhausted its budget (evals=" +
            std::to_string(res.evaluations) +
            ", nll=" + std::to_string(res.value) + ")",
        res.x);
  if (res.value >= detail::kSupportPenalty)
    throw ConvergenceError("fit_gpd_mle: optimizer stuck outside support",
                           res.x);

  GpdFit fit;
  fit.scale_link = res.x.head(d + 1);
  fit.shape = res.x[d + 1];
  if (std::abs(fit.shape) < detail::kShapeEpsilon) fit.shape = 0.0;
  fit.log_likelihood = -res.value;
  fit.n_exceedances = static_cast<std::size_t>(k);
  fit.covariate_scale = covariate_scale;
  return fit;
}

}  // namespace tailfx
