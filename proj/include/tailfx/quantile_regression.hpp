#pragma once

#include "tailfx/common.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace tailfx {

// Pinball (check) loss: residual * level for nonnegative residuals,
// residual * (level - 1) otherwise. Minimizing its sum yields the
// level-quantile.
inline double pinball_loss(double residual, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw DomainError("pinball_loss: level must be in (0,1)");
  return residual >= 0.0 ? residual * level : residual * (level - 1.0);
}

struct QuantileFit {
  Eigen::VectorXd coefficients;
  double level = 0.5;
  bool intercept_column = false;  // whether column 0 of the design was 1s

  double predict(const Eigen::Ref<const Eigen::VectorXd>& design_row) const {
    if (design_row.size() != coefficients.size())
      throw DomainError("QuantileFit::predict: design width mismatch");
    return coefficients.dot(design_row);
  }
};

struct QuantileRegressionOptions {
  bool intercept_column = false;
  double epsilon_floor = 1e-8;
  double epsilon_decay = 0.1;
  int max_inner_iterations = 100;
  double step_tolerance = 1e-12;
};

// Linear quantile regression by iteratively reweighted least squares on a
// smoothed pinball loss. The smoothing width is annealed down to
// epsilon_floor; a subgradient check at the final iterate decides whether the
// solve counts as converged.
inline QuantileFit quantile_regression(
    const Eigen::Ref<const Eigen::MatrixXd>& design,
    const Eigen::Ref<const Eigen::VectorXd>& response, double level,
    const QuantileRegressionOptions& options = {}) {
  const auto n = design.rows();
  const auto p = design.cols();
  if (!(level > 0.0 && level < 1.0))
    throw DomainError("quantile_regression: level must be in (0,1)");
  if (response.size() != n)
    throw DomainError("quantile_regression: response length mismatch");
  if (n <= p)
    throw InsufficientDataError(
        "quantile_regression: need more rows than columns");
  require_all_finite(design, "quantile_regression design");
  require_all_finite(response, "quantile_regression response");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < p)
    throw SingularDesignError("quantile_regression: design is rank-deficient");

  Eigen::VectorXd beta = qr.solve(response);  // least-squares start

  const double response_scale =
      std::max(1.0, response.cwiseAbs().maxCoeff());
  double epsilon = std::max(1e-2 * response_scale, options.epsilon_floor);

  Eigen::VectorXd residuals(n), weights(n);
  for (;;) {
    for (int inner = 0; inner < options.max_inner_iterations; ++inner) {
      residuals = response - design * beta;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double side = residuals[i] >= 0.0 ? level : 1.0 - level;
        weights[i] = side / std::max(std::abs(residuals[i]), epsilon);
      }
      weights /= weights.mean();  // conditioning only; solution unchanged

      Eigen::MatrixXd xtwx =
          design.transpose() * weights.asDiagonal() * design;
      Eigen::VectorXd xtwy =
          design.transpose() * (weights.asDiagonal() * response);
      Eigen::VectorXd beta_new = xtwx.ldlt().solve(xtwy);
      const double step = (beta_new - beta).cwiseAbs().maxCoeff();
      beta = beta_new;
      if (step <= options.step_tolerance * (1.0 + beta.cwiseAbs().maxCoeff()))
        break;
    }
    if (epsilon <= options.epsilon_floor) break;
    epsilon = std::max(epsilon * options.epsilon_decay, options.epsilon_floor);
  }

  // Subgradient optimality: away from near-zero residuals the loss gradient
  // is fixed per sign; rows inside the tie band contribute slack. An exact
  // minimizer interpolates up to p rows, and the smoothed solution may sit a
  // little off that vertex (the displacement grows when level*n is nearly an
  // integer), so the check grants each column slack worth p+1 extra rows on
  // top of the in-band ones. Gross non-convergence still trips it, because
  // its imbalance scales with n rather than p.
  residuals = response - design * beta;
  const double tie_band = 1e3 * options.epsilon_floor * response_scale;
  const double heavy_side = std::max(level, 1.0 - level);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd slack = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (residuals[i] > tie_band) {
      grad -= level * design.row(i).transpose();
    } else if (residuals[i] < -tie_band) {
      grad += (1.0 - level) * design.row(i).transpose();
    } else {
      slack += design.row(i).cwiseAbs().transpose();
    }
  }
  const Eigen::VectorXd column_max = design.cwiseAbs().colwise().maxCoeff();
  const double column_scale = design.cwiseAbs().colwise().sum().maxCoeff();
  for (Eigen::Index j = 0; j < p; ++j) {
    const double allowance = slack[j] +
                             static_cast<double>(p + 1) * heavy_side *
                                 column_max[j] +
                             1e-6 * std::max(1.0, column_scale);
    if (std::abs(grad[j]) > allowance)
      throw ConvergenceError(
          "quantile_regression: subgradient check failed on column " +
              std::to_string(j),
          beta);
  }

  QuantileFit fit;
  fit.coefficients = beta;
  fit.level = level;
  fit.intercept_column = options.intercept_column;
  return fit;
}

}  // namespace tailfx
