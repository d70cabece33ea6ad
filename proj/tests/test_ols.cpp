#include "tailfx/ols.hpp"
#include "tailfx/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace tailfx;

TEST_CASE("exact fit and mean") {
  Eigen::MatrixXd design(12, 2);
  Eigen::VectorXd response(12);
  for (int i = 0; i < 12; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = 0.5 * i;
    response[i] = 4.0 - design(i, 1);
  }
  const OlsFit fit = ols(design, response);
  CHECK(fit.coefficients[0] == Catch::Approx(4.0).margin(1e-10));
  CHECK(fit.coefficients[1] == Catch::Approx(-1.0).margin(1e-10));
  CHECK(fit.residual_ss == Catch::Approx(0.0).margin(1e-18));

  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(5, 1);
  Eigen::VectorXd y(5);
  y << 6.0, 7.0, 8.0, 7.0, 7.0;
  CHECK(ols(ones, y).coefficients[0] == Catch::Approx(7.0));
}

TEST_CASE("noise-free random design is recovered exactly") {
  Rng rng(17);
  Eigen::MatrixXd design(50, 3);
  Eigen::VectorXd truth(3);
  truth << 2.0, -0.3, 1.7;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 3; ++j) design(i, j) = rng.normal();
  const OlsFit fit = ols(design, design * truth);
  CHECK((fit.coefficients - truth).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("residuals are orthogonal to the design") {
  Rng rng(23);
  Eigen::MatrixXd design(200, 4);
  Eigen::VectorXd response(200);
  for (int i = 0; i < 200; ++i) {
    design(i, 0) = 1.0;
    for (int j = 1; j < 4; ++j) design(i, j) = rng.normal();
    response[i] = 1.0 + design(i, 1) - 2.0 * design(i, 3) + rng.normal();
  }
  const OlsFit fit = ols(design, response);
  const Eigen::VectorXd normal_eq =
      design.transpose() * (response - design * fit.coefficients);
  CHECK(normal_eq.cwiseAbs().maxCoeff() <
        1e-8 * response.cwiseAbs().maxCoeff());
}

TEST_CASE("rank deficiency and shape errors") {
  Eigen::MatrixXd design(10, 2);
  design.col(0).setOnes();
  design.col(1) = -3.0 * design.col(0);
  Eigen::VectorXd response = Eigen::VectorXd::Zero(10);
  CHECK_THROWS_AS(ols(design, response), SingularDesignError);

  Eigen::MatrixXd square = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd y3 = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(ols(square, y3), InsufficientDataError);
}
