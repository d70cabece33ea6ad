#pragma once

#include "tailfx/common.hpp"

#include <Eigen/Dense>

namespace tailfx {

struct OlsFit {
  Eigen::VectorXd coefficients;
  double residual_ss = 0.0;
};

// Ordinary least squares via column-pivoted QR.
inline OlsFit ols(const Eigen::Ref<const Eigen::MatrixXd>& design,
                  const Eigen::Ref<const Eigen::VectorXd>& response) {
  const auto m = design.rows();
  const auto p = design.cols();
  if (response.size() != m) throw DomainError("ols: response length mismatch");
  if (m <= p) throw InsufficientDataError("ols: need more rows than columns");
  require_all_finite(design, "ols design");
  require_all_finite(response, "ols response");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < p)
    throw SingularDesignError("ols: design is rank-deficient");

  OlsFit fit;
  fit.coefficients = qr.solve(response);
  fit.residual_ss = (response - design * fit.coefficients).squaredNorm();
  return fit;
}

}  // namespace tailfx
