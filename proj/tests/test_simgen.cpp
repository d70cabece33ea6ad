#include "tailfx/simgen.hpp"
#include "tailfx/rng.hpp"

#include "test_helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace tailfx;

TEST_CASE("kink response values") {
  CHECK(kink_dose_response(2.0, 2.0, 3.0) == 5.0);
  CHECK(kink_dose_response(2.0, 2.0, 100.0) == 5.0);
  CHECK(kink_dose_response(3.0, 2.0, 3.0) == Catch::Approx(2.0));
  CHECK(kink_dose_response(1.0, 2.0, 3.0) == Catch::Approx(2.0));
  // apex is the maximum
  for (double t = -5.0; t < 9.0; t += 0.37)
    CHECK(kink_dose_response(t, 2.0, 3.0) <= 5.0);
}

TEST_CASE("simple worked example") {
  const GeneratedSample sample = gen_simple_51(100000, 17);
  CHECK(sample.true_omega == 1.25);
  CHECK(sample.true_mu(4.0) == Catch::Approx(5.0));

  // conditional mean of Y given X1=1, T>1 is T itself
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < sample.data.size(); ++i) {
    if (sample.data.confounders(i, 0) == 1.0 && sample.data.treatment[i] > 1.0) {
      sum += sample.data.outcome[i] - sample.data.treatment[i];
      ++count;
    }
  }
  CHECK(count > 10000);
  CHECK(sum / count == Catch::Approx(0.0).margin(0.1));

  const GeneratedSample again = gen_simple_51(100, 4);
  const GeneratedSample again2 = gen_simple_51(100, 4);
  CHECK((again.data.treatment.array() == again2.data.treatment.array()).all());
  CHECK((again.data.outcome.array() == again2.data.outcome.array()).all());
}

TEST_CASE("high-dimensional scenario has the factor correlation structure") {
  const Eigen::Index n = 100000, d = 5;
  const GeneratedSample sample =
      gen_highdim_b1(n, d, NoiseLaw::kGaussianSd10, 23);
  CHECK(sample.true_omega == -1.0);

  std::vector<std::vector<double>> cols(d, std::vector<double>(n));
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < n; ++i) cols[j][i] = sample.data.confounders(i, j);
  for (Eigen::Index j = 0; j < d; ++j) {
    CHECK(testkit::variance_of(cols[j]) == Catch::Approx(1.0).margin(0.02));
    for (Eigen::Index l = j + 1; l < d; ++l)
      CHECK(testkit::correlation_of(cols[j], cols[l]) ==
            Catch::Approx(0.1).margin(0.01));
  }
}

TEST_CASE("highdim noise laws shift the treatment as expected") {
  const Eigen::Index n = 60000;
  const GeneratedSample exp_noise =
      gen_highdim_b1(n, 2, NoiseLaw::kExpMean10, 31);
  // T = a.x + eps; E[a.x] = 0, E[eps] = 10 for the exponential law
  CHECK(exp_noise.data.treatment.mean() == Catch::Approx(10.0).margin(0.5));

  const GeneratedSample pareto_noise =
      gen_highdim_b1(n, 2, NoiseLaw::kPareto11, 32);
  double over = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    over += pareto_noise.data.treatment[i] > 50.0;
  CHECK(over / static_cast<double>(n) ==
        Catch::Approx(0.02).margin(0.01));  // survival ~ 1/x tail
}

TEST_CASE("gumbel copula: independence, kendall tau, uniform margins") {
  Rng rng(47);
  const Eigen::Index n = 100000;

  for (double alpha : {1.0, 2.0}) {
    Rng local(derive_seed(47, static_cast<std::uint64_t>(alpha * 10)));
    const Eigen::MatrixXd u = gumbel_copula_sample(2, alpha, n, local);
    std::vector<double> a(n), b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a[i] = u(i, 0);
      b[i] = u(i, 1);
    }
    CHECK(testkit::kendall_tau(a, b) ==
          Catch::Approx(1.0 - 1.0 / alpha).margin(0.01));
    // Kolmogorov-Smirnov uniformity at the 1% level
    CHECK(testkit::ks_statistic_uniform(a) < 1.628 / std::sqrt(n));
    CHECK(testkit::ks_statistic_uniform(b) < 1.628 / std::sqrt(n));
  }

  CHECK_THROWS_AS(gumbel_copula_sample(2, 0.5, 10, rng), DomainError);
}

TEST_CASE("copula scenario marginals and slope parameter") {
  const GeneratedSample sample = gen_copula_b3(100000, 1.7, 5.0, 3);
  CHECK(sample.true_omega == 5.0);
  CHECK(sample.data.treatment.mean() == Catch::Approx(1.0).margin(0.02));
  CHECK(sample.data.treatment.minCoeff() >= 0.0);
  // confounder margins are standard normal
  for (Eigen::Index j = 0; j < 3; ++j) {
    std::vector<double> col(100000);
    for (Eigen::Index i = 0; i < 100000; ++i)
      col[i] = sample.data.confounders(i, j);
    CHECK(testkit::mean_of(col) == Catch::Approx(0.0).margin(0.02));
    CHECK(testkit::variance_of(col) == Catch::Approx(1.0).margin(0.02));
  }
}

TEST_CASE("random smooth function is seed-stable and bounded") {
  Rng rng_a(5), rng_b(5);
  const RandomFourierFunction f(3, rng_a), g(3, rng_b);
  Rng probe(6);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd x(3);
    x << probe.normal(), probe.normal(), probe.normal();
    CHECK(f(x) == g(x));
    CHECK(std::abs(f(x)) < 10.0);  // sum of 10 cosines with ~N(0,1/10) weights
  }
}

TEST_CASE("hidden-confounder scenario") {
  const GeneratedSample sample = gen_hidden_b4(100000, 0.0, 5.0, 29);
  CHECK(sample.true_omega == 5.0);
  CHECK(sample.true_mu(2.0) == Catch::Approx(10.0));
  CHECK(sample.data.confounders.cols() == 1);  // H is withheld
  CHECK(sample.hidden_confounder.size() == sample.data.size());

  // with delta = 0 the hidden path is severed
  std::vector<double> h(100000), t(100000);
  for (Eigen::Index i = 0; i < 100000; ++i) {
    h[i] = sample.hidden_confounder[i];
    t[i] = sample.data.treatment[i];
  }
  CHECK(testkit::correlation_of(h, t) == Catch::Approx(0.0).margin(0.02));

  const GeneratedSample strong = gen_hidden_b4(50000, 5.0, 5.0, 30);
  std::vector<double> h2(50000), t2(50000);
  for (Eigen::Index i = 0; i < 50000; ++i) {
    h2[i] = strong.hidden_confounder[i];
    t2[i] = strong.data.treatment[i];
  }
  CHECK(testkit::correlation_of(h2, t2) > 0.9);
}

TEST_CASE("extremal scenario") {
  const GeneratedSample sample = gen_extremal_b5(1000, 1.0, 2.0, 11);
  CHECK(sample.true_omega == Catch::Approx(-0.7979).margin(5e-5));
  CHECK(sample.true_mu(1.0) == Catch::Approx(5.0));
  CHECK_THROWS_AS(gen_extremal_b5(100, 1.0, 0.0, 1), DomainError);
  CHECK_THROWS_AS(gen_extremal_b5(0, 1.0, 2.0, 1), DomainError);

  // infinite-dof noise path equals a plain normal draw stream
  const double inf = std::numeric_limits<double>::infinity();
  const GeneratedSample g1 = gen_extremal_b5(500, 3.0, inf, 99);
  Rng manual(99);
  for (Eigen::Index i = 0; i < 500; ++i) {
    const double x = manual.normal();
    const double t = x + manual.normal();
    manual.normal();  // outcome noise
    CHECK(g1.data.confounders(i, 0) == x);
    CHECK(g1.data.treatment[i] == t);
  }
}

TEST_CASE("scenario dispatch and labels") {
  ScenarioSpec spec;
  spec.variant = Scenario::kExtremalB5;
  spec.n = 50;
  spec.nu = std::numeric_limits<double>::infinity();
  spec.c = 2.0;
  const GeneratedSample sample = spec.generate(8);
  CHECK(sample.data.size() == 50);
  CHECK(spec.name() == "extremal_b5");
  CHECK(spec.params_label() == "nu=inf,c=2");

  ScenarioSpec b1;
  b1.variant = Scenario::kHighdimB1;
  b1.d = 25;
  b1.noise = NoiseLaw::kGaussianSd10;
  CHECK(b1.params_label() == "d=25,noise=gaussian");
}

TEST_CASE("every generator's true slope matches its construction") {
  CHECK(gen_simple_51(10, 1).true_omega == Catch::Approx(0.75 * 1 + 0.25 * 2));
  CHECK(gen_highdim_b1(10, 3, NoiseLaw::kExpMean10, 1).true_omega == -1.0);
  CHECK(gen_copula_b3(10, 2.0, 7.5, 1).true_omega ==
        Catch::Approx(0.5 * (7.5 / 2.0) + 0.5 * (3.0 * 7.5 / 2.0)));
  CHECK(gen_hidden_b4(10, 1.0, 6.0, 1).true_omega ==
        Catch::Approx(0.75 * (2.0 / 3.0) * 6.0 + 0.25 * 2.0 * 6.0));
  CHECK(gen_extremal_b5(10, 1.0, 2.0, 1).true_omega ==
        Catch::Approx(-std::sqrt(2.0 / M_PI)));
}
