#pragma once

#include "tailfx/common.hpp"
#include "tailfx/gpd.hpp"
#include "tailfx/ols.hpp"
#include "tailfx/quantile_regression.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace tailfx {

// One observational sample: confounder rows X, treatment T, outcome Y.
struct ObservationSet {
  Eigen::MatrixXd confounders;  // n x d
  Eigen::VectorXd treatment;    // n
  Eigen::VectorXd outcome;      // n

  Eigen::Index size() const { return treatment.size(); }

  void validate() const {
    const auto n = treatment.size();
    if (n < 1) throw DomainError("ObservationSet: empty sample");
    if (confounders.rows() != n || outcome.size() != n)
      throw DomainError("ObservationSet: component lengths differ");
    require_all_finite(confounders, "ObservationSet confounders");
    require_all_finite(treatment, "ObservationSet treatment");
    require_all_finite(outcome, "ObservationSet outcome");
  }
};

// Which fitted tail parameters feed the outcome model.
enum class ThetaFeatures { kTauOnly, kTauAndSigma };

struct FitConfig {
  double level = 0.95;     // threshold quantile q
  bool covariate_scale = false;
  ThetaFeatures theta_features = ThetaFeatures::kTauOnly;
  bool outcome_intercept = true;
};

// Coefficients of the tail-linear outcome model
//   E[Y | T = t, features phi] = level_coefficients . phi
//                                + (slope_coefficients . phi) * t,
// fitted on the exceedance set. The feature vector phi(x) holds the fitted
// tail parameters selected by FitConfig::theta_features, with a leading
// constant coordinate when FitConfig::outcome_intercept is set (which makes
// both the level and the slope affine in the tail parameters).
struct TailOutcomeModel {
  Eigen::VectorXd level_coefficients;
  Eigen::VectorXd slope_coefficients;
};

// Result of the two-step fit: threshold model, tail distribution model,
// outcome model, and the exceedance index set. Theta-feature rows for all n
// training points are retained for population-level averaging.
struct ExtremeEffectModel {
  QuantileFit threshold;
  GpdFit tail_dist;
  TailOutcomeModel outcome;
  std::vector<std::size_t> exceedance_indices;  // ascending
  FitConfig config;
  Eigen::MatrixXd training_thetas;  // n x m

  Eigen::Index n_train() const { return training_thetas.rows(); }
  Eigen::Index theta_width() const { return training_thetas.cols(); }
};

namespace detail {

inline Eigen::VectorXd with_leading_one(
    const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd row(x.size() + 1);
  row[0] = 1.0;
  row.tail(x.size()) = x;
  return row;
}

inline Eigen::Index theta_feature_width(const FitConfig& config) {
  return (config.outcome_intercept ? 1 : 0) + 1 +
         (config.theta_features == ThetaFeatures::kTauAndSigma ? 1 : 0);
}

inline Eigen::Index outcome_design_width(const FitConfig& config) {
  return 2 * theta_feature_width(config);
}

}  // namespace detail

// Two-step fit of the extreme-treatment-effect model:
//   1. quantile regression of T on [1, X] at level q gives the threshold
//      tau(x); the exceedance set S collects rows with t_i strictly above it;
//      a GPD with log-linked scale and constant shape is fitted to the
//      excesses over S.
//   2. the tail-linear outcome model is fitted by least squares on S with
//      design { theta-features, theta-features * t }.
inline ExtremeEffectModel fit_extreme_effect(const ObservationSet& data,
                                             const FitConfig& config = {}) {
  data.validate();
  if (!(config.level > 0.0 && config.level < 1.0))
    throw DomainError("fit_extreme_effect: level must be in (0,1)");
  const auto n = data.size();
  const auto d = data.confounders.cols();

  Eigen::MatrixXd design(n, d + 1);
  design.col(0).setOnes();
  design.rightCols(d) = data.confounders;

  QuantileRegressionOptions qr_options;
  qr_options.intercept_column = true;
  ExtremeEffectModel model;
  model.config = config;
  model.threshold =
      quantile_regression(design, data.treatment, config.level, qr_options);

  Eigen::VectorXd tau = design * model.threshold.coefficients;
  for (Eigen::Index i = 0; i < n; ++i)
    if (data.treatment[i] > tau[i])
      model.exceedance_indices.push_back(static_cast<std::size_t>(i));

  const auto k = static_cast<Eigen::Index>(model.exceedance_indices.size());
  const Eigen::Index min_required = detail::outcome_design_width(config) + 1;
  if (k < min_required)
    throw InsufficientExceedancesError(config.level,
                                       model.exceedance_indices.size(),
                                       static_cast<std::size_t>(min_required));

  Eigen::VectorXd excesses(k);
  Eigen::MatrixXd exceed_x(k, d);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto i = static_cast<Eigen::Index>(model.exceedance_indices[j]);
    excesses[j] = data.treatment[i] - tau[i];
    exceed_x.row(j) = data.confounders.row(i);
  }
  model.tail_dist = fit_gpd_mle(excesses, exceed_x, config.covariate_scale);

  const Eigen::Index m = detail::theta_feature_width(config);
  const Eigen::Index c = config.outcome_intercept ? 1 : 0;
  model.training_thetas.resize(n, m);
  if (c) model.training_thetas.col(0).setOnes();
  model.training_thetas.col(c) = tau;
  if (config.theta_features == ThetaFeatures::kTauAndSigma) {
    for (Eigen::Index i = 0; i < n; ++i)
      model.training_thetas(i, c + 1) =
          model.tail_dist.scale_at(data.confounders.row(i).transpose());
  }

  Eigen::MatrixXd outcome_design(k, 2 * m);
  Eigen::VectorXd outcome_response(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto i = static_cast<Eigen::Index>(model.exceedance_indices[j]);
    outcome_design.block(j, 0, 1, m) = model.training_thetas.row(i);
    outcome_design.block(j, m, 1, m) =
        model.training_thetas.row(i) * data.treatment[i];
    outcome_response[j] = data.outcome[i];
  }
  const OlsFit outcome_fit = ols(outcome_design, outcome_response);
  model.outcome.level_coefficients = outcome_fit.coefficients.head(m);
  model.outcome.slope_coefficients = outcome_fit.coefficients.tail(m);
  return model;
}

// Covariate-conditional tail parameters (tau(x), sigma(x), shape).
inline GpdParams tail_params_at(const ExtremeEffectModel& model,
                                const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() + 1 != model.threshold.coefficients.size())
    throw DomainError("tail_params_at: covariate width mismatch");
  GpdParams params;
  params.location = model.threshold.predict(detail::with_leading_one(x));
  params.scale = model.tail_dist.scale_at(x);
  params.shape = model.tail_dist.shape;
  return params;
}

namespace detail {

inline Eigen::VectorXd theta_features_at(
    const ExtremeEffectModel& model,
    const Eigen::Ref<const Eigen::VectorXd>& x) {
  const GpdParams params = tail_params_at(model, x);
  Eigen::VectorXd features(model.theta_width());
  Eigen::Index j = 0;
  if (model.config.outcome_intercept) features[j++] = 1.0;
  features[j++] = params.location;
  if (model.config.theta_features == ThetaFeatures::kTauAndSigma)
    features[j] = params.scale;
  return features;
}

}  // namespace detail

// Population-level response extrapolation at treatment level t: the
// tail-linear model evaluated at every training point's fitted features and
// averaged over all n rows.
inline double dose_response(const ExtremeEffectModel& model, double t) {
  const Eigen::VectorXd level_part =
      model.training_thetas * model.outcome.level_coefficients;
  const Eigen::VectorXd slope_part =
      model.training_thetas * model.outcome.slope_coefficients;
  return level_part.mean() + slope_part.mean() * t;
}

// Response extrapolation for a specific covariate profile x.
inline double dose_response_at(const ExtremeEffectModel& model,
                               const Eigen::Ref<const Eigen::VectorXd>& x,
                               double t) {
  const Eigen::VectorXd features = detail::theta_features_at(model, x);
  return model.outcome.level_coefficients.dot(features) +
         model.outcome.slope_coefficients.dot(features) * t;
}

// Population-level tail slope: the per-unit change of dose_response in t.
inline double tail_slope(const ExtremeEffectModel& model) {
  return (model.training_thetas * model.outcome.slope_coefficients).mean();
}

// Tail slope for a specific covariate profile.
inline double tail_slope_at(const ExtremeEffectModel& model,
                            const Eigen::Ref<const Eigen::VectorXd>& x) {
  return model.outcome.slope_coefficients.dot(
      detail::theta_features_at(model, x));
}

// Full-data linear regression Y ~ [1, T, X]; returns the treatment
// coefficient. Used only as a bias reference in benchmarks.
inline double naive_ols_slope(const ObservationSet& data) {
  data.validate();
  const auto n = data.size();
  const auto d = data.confounders.cols();
  if (n <= d + 2)
    throw InsufficientDataError("naive_ols_slope: sample too small");
  Eigen::MatrixXd design(n, d + 2);
  design.col(0).setOnes();
  design.col(1) = data.treatment;
  design.rightCols(d) = data.confounders;
  return ols(design, data.outcome).coefficients[1];
}

}  // namespace tailfx
