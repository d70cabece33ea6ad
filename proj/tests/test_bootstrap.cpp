#include "tailfx/bootstrap.hpp"
#include "tailfx/rng.hpp"

#include "test_helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace tailfx;

namespace {

ObservationSet gaussian_outcome_data(Eigen::Index n, std::uint64_t seed,
                                     double mean = 0.0) {
  Rng rng(seed);
  ObservationSet data;
  data.confounders.resize(n, 1);
  data.treatment.resize(n);
  data.outcome.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.confounders(i, 0) = rng.normal();
    data.treatment[i] = rng.normal();
    data.outcome[i] = mean + rng.normal();
  }
  return data;
}

double outcome_mean(const ObservationSet& data) { return data.outcome.mean(); }

}  // namespace

TEST_CASE("constant statistic collapses the interval") {
  ObservationSet data = gaussian_outcome_data(80, 3);
  data.outcome.setConstant(4.25);
  const BootstrapResult res = bootstrap_ci(data, outcome_mean, 200, 0.95, 10);
  CHECK(res.point == 4.25);
  CHECK(res.lower == 4.25);
  CHECK(res.upper == 4.25);
  CHECK(res.n_failed == 0);
  CHECK(res.resampled.size() == 200);
}

TEST_CASE("half-width of the mean interval matches the CLT") {
  const ObservationSet data = gaussian_outcome_data(400, 8);
  const BootstrapResult res = bootstrap_ci(data, outcome_mean, 2000, 0.95, 99);
  const double halfwidth = 0.5 * (res.upper - res.lower);
  CHECK(halfwidth == Catch::Approx(1.96 / 20.0).epsilon(0.20));
  CHECK(res.lower <= res.point);
  CHECK(res.upper >= res.point);
}

TEST_CASE("same seed reproduces the result exactly") {
  const ObservationSet data = gaussian_outcome_data(150, 21);
  const BootstrapResult a = bootstrap_ci(data, outcome_mean, 300, 0.9, 777);
  const BootstrapResult b = bootstrap_ci(data, outcome_mean, 300, 0.9, 777);
  CHECK(a.resampled == b.resampled);
  CHECK(a.lower == b.lower);
  CHECK(a.upper == b.upper);
}

TEST_CASE("widening the level never narrows the interval") {
  const ObservationSet data = gaussian_outcome_data(150, 33);
  double prev_lo = 0.0, prev_hi = 0.0;
  bool first = true;
  for (double level : {0.5, 0.8, 0.9, 0.95, 0.99}) {
    const BootstrapResult res = bootstrap_ci(data, outcome_mean, 400, level, 5);
    if (!first) {
      CHECK(res.lower <= prev_lo + 1e-14);
      CHECK(res.upper >= prev_hi - 1e-14);
    }
    prev_lo = res.lower;
    prev_hi = res.upper;
    first = false;
  }
}

TEST_CASE("coverage of the mean at level 0.95") {
  int covered = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const ObservationSet data =
        gaussian_outcome_data(200, derive_seed(910, rep), 1.5);
    const BootstrapResult res =
        bootstrap_ci(data, outcome_mean, 200, 0.95, derive_seed(911, rep));
    covered += (res.lower <= 1.5 && 1.5 <= res.upper);
  }
  CHECK(covered >= 90);
}

TEST_CASE("vector statistic shares the resample stream with the scalar form") {
  const ObservationSet data = gaussian_outcome_data(120, 55);
  auto both = [](const ObservationSet& d) {
    return std::vector<double>{d.outcome.mean(), d.treatment.mean()};
  };
  const auto many = bootstrap_ci_many(data, both, 2, 250, 0.9, 4242);
  const BootstrapResult scalar = bootstrap_ci(data, outcome_mean, 250, 0.9, 4242);
  CHECK(many[0].resampled == scalar.resampled);
  CHECK(many[0].lower == scalar.lower);
  CHECK(many[1].point == Catch::Approx(data.treatment.mean()));
}

TEST_CASE("failures are tolerated up to ten percent") {
  const ObservationSet data = gaussian_outcome_data(100, 60);
  int calls = 0;
  auto sometimes_fails = [&calls](const ObservationSet& d) {
    ++calls;
    if (calls % 25 == 0) throw InsufficientDataError("synthetic failure");
    return d.outcome.mean();
  };
  const BootstrapResult res =
      bootstrap_ci(data, sometimes_fails, 200, 0.95, 1);
  CHECK(res.n_failed == 8);  // 4% of 200
  CHECK(res.resampled.size() + res.n_failed == 200);
}

TEST_CASE("excessive failures abort loudly") {
  const ObservationSet data = gaussian_outcome_data(100, 61);
  int calls = 0;
  auto mostly_fails = [&calls](const ObservationSet& d) {
    ++calls;
    if (calls % 4 == 0) throw InsufficientDataError("synthetic failure");
    return d.outcome.mean();
  };
  CHECK_THROWS_AS(bootstrap_ci(data, mostly_fails, 200, 0.95, 1),
                  BootstrapDegeneracyError);
}

TEST_CASE("statistic errors on the original data propagate unchanged") {
  const ObservationSet data = gaussian_outcome_data(100, 62);
  auto always_fails = [](const ObservationSet&) -> double {
    throw SingularDesignError("bad statistic");
  };
  CHECK_THROWS_AS(bootstrap_ci(data, always_fails, 200, 0.95, 1),
                  SingularDesignError);
}

TEST_CASE("argument validation") {
  const ObservationSet data = gaussian_outcome_data(50, 63);
  CHECK_THROWS_AS(bootstrap_ci(data, outcome_mean, 99, 0.95, 1), DomainError);
  CHECK_THROWS_AS(bootstrap_ci(data, outcome_mean, 200, 0.0, 1), DomainError);
  CHECK_THROWS_AS(bootstrap_ci(data, outcome_mean, 200, 1.0, 1), DomainError);
}

TEST_CASE("empirical quantile interpolation convention") {
  // h = (m-1)p: quartiles of {1,2,3,4} interpolate between order statistics.
  std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  CHECK(empirical_quantile(v, 0.0) == 1.0);
  CHECK(empirical_quantile(v, 1.0) == 4.0);
  CHECK(empirical_quantile(v, 0.5) == Catch::Approx(2.5));
  CHECK(empirical_quantile(v, 0.25) == Catch::Approx(1.75));
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), DomainError);
}
