#include "tailfx/gpd.hpp"
#include "tailfx/rng.hpp"

#include "test_helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace tailfx;

TEST_CASE("cdf closed-form values") {
  CHECK(gpd_cdf(0.0, {0.0, 1.0, 0.3}) == 0.0);
  CHECK(gpd_cdf(2.0, {2.0, 0.5, -0.2}) == 0.0);
  CHECK(gpd_cdf(1.0, {0.0, 1.0, 0.0}) ==
        Catch::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(gpd_cdf(1.0, {0.0, 1.0, 1.0}) == Catch::Approx(0.5).epsilon(1e-12));
  // below support and above a finite upper endpoint
  CHECK(gpd_cdf(-3.0, {0.0, 1.0, 0.5}) == 0.0);
  CHECK(gpd_cdf(10.0, {0.0, 1.0, -0.5}) == 1.0);
}

TEST_CASE("quantile closed-form values") {
  CHECK(gpd_quantile(0.0, {3.0, 2.0, 0.7}) == Catch::Approx(3.0));
  CHECK(gpd_quantile(0.5, {0.0, 1.0, 1.0}) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(gpd_quantile(0.5, {0.0, 1.0, 0.0}) ==
        Catch::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(gpd_quantile(1.0, {0.0, 1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(gpd_quantile(-0.1, {0.0, 1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(gpd_quantile(0.5, {0.0, -1.0, 0.0}), DomainError);
}

TEST_CASE("cdf then quantile is the identity") {
  for (double shape : {-0.4, 0.0, 0.3, 1.0}) {
    const GpdParams params{1.5, 2.0, shape};
    for (int i = 1; i <= 99; ++i) {
      const double p = static_cast<double>(i) / 100.0;
      CHECK(gpd_cdf(gpd_quantile(p, params), params) ==
            Catch::Approx(p).margin(1e-10));
    }
  }
}

TEST_CASE("cdf is monotone and continuous in the shape near zero") {
  const GpdParams near{0.0, 1.0, 1e-8};
  const GpdParams zero{0.0, 1.0, 0.0};
  double prev = -1.0;
  for (double x = 0.0; x <= 40.0; x += 0.25) {
    CHECK(std::abs(gpd_cdf(x, near) - gpd_cdf(x, zero)) < 1e-6);
    const double c = gpd_cdf(x, near);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("sampler is deterministic and matches the GPD mean") {
  const GpdParams params{0.0, 1.0, 0.5};
  Rng rng_a(2023), rng_b(2023);
  const auto a = gpd_sample(params, 1000, rng_a);
  const auto b = gpd_sample(params, 1000, rng_b);
  CHECK(a == b);

  Rng rng_c(555);
  CHECK(gpd_sample(params, 0, rng_c).empty());

  const auto big = gpd_sample(params, 100000, rng_c);
  CHECK(testkit::mean_of(big) == Catch::Approx(2.0).margin(0.1));
}

TEST_CASE("mle recovers constant-scale parameters") {
  struct Case { double scale, shape; };
  for (const Case c : {Case{2.0, 0.3}, Case{1.0, 0.0}, Case{1.0, -0.2}}) {
    Rng rng(1000 + static_cast<std::uint64_t>(c.scale * 10 + c.shape * 100));
    Eigen::VectorXd excesses(10000);
    const GpdParams truth{0.0, c.scale, c.shape};
    for (int i = 0; i < excesses.size(); ++i)
      excesses[i] = gpd_quantile(rng.uniform(), truth);
    const GpdFit fit = fit_gpd_mle(excesses, Eigen::MatrixXd(), false);
    CHECK(std::exp(fit.scale_link[0]) == Catch::Approx(c.scale).margin(0.1));
    CHECK(fit.shape == Catch::Approx(c.shape).margin(0.1));
    CHECK(fit.n_exceedances == 10000);
  }
}

TEST_CASE("mle on exponential data finds shape near zero") {
  Rng rng(77);
  Eigen::VectorXd excesses(10000);
  for (int i = 0; i < excesses.size(); ++i) excesses[i] = rng.exponential();
  const GpdFit fit = fit_gpd_mle(excesses, Eigen::MatrixXd(), false);
  CHECK(fit.shape == Catch::Approx(0.0).margin(0.05));
  CHECK(std::exp(fit.scale_link[0]) == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("mle with a covariate-linked scale recovers the link") {
  Rng rng(99);
  const int k = 8000;
  Eigen::VectorXd excesses(k);
  Eigen::MatrixXd covariates(k, 1);
  const double w0 = 0.4, w1 = -0.7, shape = 0.2;
  for (int i = 0; i < k; ++i) {
    const double x = rng.normal();
    covariates(i, 0) = x;
    const GpdParams row{0.0, std::exp(w0 + w1 * x), shape};
    excesses[i] = gpd_quantile(rng.uniform(), row);
  }
  const GpdFit fit = fit_gpd_mle(excesses, covariates, true);
  CHECK(fit.covariate_scale);
  CHECK(fit.scale_link[0] == Catch::Approx(w0).margin(0.1));
  CHECK(fit.scale_link[1] == Catch::Approx(w1).margin(0.1));
  CHECK(fit.shape == Catch::Approx(shape).margin(0.1));

  Eigen::VectorXd x_probe(1);
  x_probe << 2.0;
  CHECK(fit.scale_at(x_probe) ==
        Catch::Approx(std::exp(fit.scale_link[0] + 2.0 * fit.scale_link[1])));
}

TEST_CASE("mle finite-difference gradient vanishes at the optimum") {
  Rng rng(3);
  Eigen::VectorXd excesses(5000);
  const GpdParams truth{0.0, 2.0, 0.3};
  for (int i = 0; i < excesses.size(); ++i)
    excesses[i] = gpd_quantile(rng.uniform(), truth);
  const GpdFit fit = fit_gpd_mle(excesses, Eigen::MatrixXd(), false);

  Eigen::MatrixXd design = Eigen::MatrixXd::Ones(excesses.size(), 1);
  auto nll = [&](const Eigen::VectorXd& params) {
    return tailfx::detail::gpd_negloglik(params, excesses, design);
  };
  Eigen::VectorXd at(2);
  at << fit.scale_link[0], fit.shape;
  const Eigen::VectorXd grad = testkit::finite_difference_gradient(nll, at);
  const double scale = std::max(1.0, std::abs(nll(at)));
  CHECK(grad.cwiseAbs().maxCoeff() < 1e-4 * scale);
}

TEST_CASE("mle error paths") {
  Eigen::VectorXd three(3);
  three << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(fit_gpd_mle(three, Eigen::MatrixXd(), false),
                  InsufficientDataError);

  Eigen::VectorXd with_zero(6);
  with_zero << 1.0, 2.0, 3.0, 0.0, 1.0, 2.0;
  CHECK_THROWS_AS(fit_gpd_mle(with_zero, Eigen::MatrixXd(), false), DomainError);
}
