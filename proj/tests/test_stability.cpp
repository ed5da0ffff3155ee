#include <doctest.h>

#include <cmath>

#include "spsaa/errors.hpp"
#include "spsaa/stability.hpp"

using namespace spsaa;

TEST_CASE("bound formula") {
  CHECK(stability_bound(1.0, 0.0, 1.0, 8) == doctest::Approx(1.0));
  CHECK(stability_bound(0.0, 1.0, 2.0, 4) == doctest::Approx(256.0 / 64.0));
  CHECK(stability_bound(2.0, 1.0, 0.5, 10) == doctest::Approx((256.0 + 256.0) / 25.0));
  CHECK_THROWS_AS(stability_bound(1.0, 1.0, 0.0, 4), ParameterError);
}

TEST_CASE("single scenario: both minimizers are the scenarios themselves") {
  const auto inst = make_quadratic_tracking(3, 1.0, gaussian(3, 0.0, 1.0));
  const RngStream stream(21);
  const auto batch = draw_batch(inst, stream.child(1), 1);
  const auto est = average_ro_stability(inst, batch, std::nullopt, 1e-14, 1, stream);
  REQUIRE(est.probed_indices.size() == 1);
  CHECK(est.probed_indices[0] == 0);
  CHECK(est.std_error == 0.0);

  // The replacement scenario comes from the estimator's dedicated child stream.
  const Vector xi = batch.scenarios.row(0).transpose();
  const Vector fresh = sample(inst.scenarios, stream.child(0x7265706cULL).child(0), 1).row(0).transpose();
  CHECK(est.value == doctest::Approx((fresh - xi).squaredNorm()).epsilon(1e-10));
}

TEST_CASE("tracking stability equals 2 d sigma^2 / N^2 in expectation") {
  const Eigen::Index d = 4, n = 20;
  const double sigma = 1.5;
  const auto inst = make_quadratic_tracking(d, 2.0, gaussian(d, 0.0, sigma));
  const double expected = 2.0 * d * sigma * sigma / double(n * n);
  const int batches = 300;
  double sum = 0.0, sum_sq = 0.0;
  for (int b = 0; b < batches; ++b) {
    const RngStream stream(31, {static_cast<std::uint64_t>(b)});
    const auto batch = draw_batch(inst, stream.child(1), n);
    const double v = average_ro_stability(inst, batch, std::nullopt, 1e-14, n, stream).value;
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / batches;
  const double se = std::sqrt((sum_sq / batches - mean * mean) / (batches - 1));
  CHECK(std::abs(mean - expected) <= 5.0 * se);

  const auto est = average_ro_stability(inst, draw_batch(inst, RngStream(1), n), std::nullopt, 1e-14,
                                        n, RngStream(2));
  CHECK(est.bound_rhs == doctest::Approx(64.0 * *inst.constants.sigma_p * *inst.constants.sigma_p /
                                         (n * n * 4.0)));
}

TEST_CASE("probed subset agrees with the full average") {
  const auto inst = make_quartic_nonlipschitz(Vector::Constant(3, 0.4), gaussian(3, 0.0, 1.0));
  const Eigen::Index n = 200;
  const RngStream stream(41);
  const auto batch = draw_batch(inst, stream.child(1), n);
  const auto full = average_ro_stability(inst, batch, std::nullopt, 1e-13, n, stream);
  const auto part = average_ro_stability(inst, batch, std::nullopt, 1e-13, 40, stream);
  CHECK(part.probed_indices.size() == 40);
  for (std::size_t i = 1; i < part.probed_indices.size(); ++i) {
    CHECK(part.probed_indices[i] > part.probed_indices[i - 1]);
  }
  CHECK(part.probed_indices.back() < n);
  CHECK(std::abs(part.value - full.value) <= 3.0 * part.std_error);
}

TEST_CASE("regularizer supplies the modulus") {
  const auto inst = make_newsvendor(2, 1.0, 2.0, exponential(2, 1.0), FeasibleSet::box(2, 0.0, 8.0));
  const auto batch = draw_batch(inst, RngStream(3), 12);
  CHECK_THROWS_AS(average_ro_stability(inst, batch, std::nullopt, 1e-10, 12, RngStream(4)),
                  ParameterError);
  const auto cfg = hyperparameters(0.5, inst, Vector::Zero(2), RStarRule{RStarPolicy::manual, 1.0});
  const auto est = average_ro_stability(inst, batch, cfg, 1e-10, 12, RngStream(4));
  CHECK(est.value >= 0.0);
  CHECK(est.bound_rhs == doctest::Approx(stability_bound(0.0, *inst.constants.lipschitz, 0.25, 12)));
  CHECK(est.value <= est.bound_rhs);
}

TEST_CASE("probe count validation") {
  const auto inst = make_quadratic_tracking(2, 1.0, gaussian(2, 0.0, 1.0));
  const auto batch = draw_batch(inst, RngStream(1), 5);
  CHECK_THROWS_AS(average_ro_stability(inst, batch, std::nullopt, 1e-10, 0, RngStream(1)),
                  ParameterError);
  CHECK_THROWS_AS(average_ro_stability(inst, batch, std::nullopt, 1e-10, 6, RngStream(1)),
                  ParameterError);
}
