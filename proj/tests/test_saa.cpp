#include <doctest.h>

#include <cmath>
#include <random>

#include "spsaa/errors.hpp"
#include "spsaa/saa.hpp"

using namespace spsaa;

namespace {

/// Direct average of scenario values, independent of the batch model.
double direct_average(const ProblemInstance& inst, const SampleBatch& batch, const Vector& x) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < batch.size(); ++j) {
    acc += inst.scenario_value(x, batch.scenarios.row(j).transpose());
  }
  return acc / batch.size();
}

Vector direct_gradient(const ProblemInstance& inst, const SampleBatch& batch, const Vector& x) {
  Vector acc = Vector::Zero(x.size());
  for (Eigen::Index j = 0; j < batch.size(); ++j) {
    acc += inst.scenario_gradient(x, batch.scenarios.row(j).transpose());
  }
  return acc / batch.size();
}

std::vector<ProblemInstance> families() {
  return {
      make_quadratic_tracking(3, 2.0, gaussian(3, 1.0, 1.0)),
      make_degenerate_quadratic(4, 2, gaussian(4, 0.0, 1.0), FeasibleSet::box(4, -2.0, 2.0), 3),
      make_newsvendor(3, 1.0, 4.0, exponential(3, 0.5)),
      make_quartic_nonlipschitz(Vector::Constant(3, 0.3), gaussian(3, 0.0, 1.0)),
  };
}

}  // namespace

TEST_CASE("hyperparameter examples") {
  const auto inst = make_quadratic_tracking(2, 1.0, point_mass(Vector::Zero(2)));
  const auto cfg = hyperparameters(0.1, inst, Vector::Zero(2), RStarRule{});
  CHECK(cfg.r_star == 1.0);
  CHECK(cfg.lambda0 == doctest::Approx(0.05));
  CHECK(cfg.q_prime == 2.0);

  CHECK(regularizer_exponent(1.0, 3) == doctest::Approx(1.0 + 1.0 / std::log(3.0)));
  CHECK(regularizer_exponent(1.0, 3) == doctest::Approx(1.9102).epsilon(1e-4));
  CHECK(regularizer_exponent(1.5, 10) == 1.5);
  CHECK(regularizer_exponent(3.0, 10) == 2.0);
  CHECK_THROWS_AS(regularizer_exponent(0.5, 3), ParameterError);

  // Optimizer at distance 4 from the anchor: V = 8, lambda0 = eps / 16.
  const auto far = make_quadratic_tracking(1, 1.0, point_mass(Vector::Constant(1, 4.0)));
  const auto oracle = hyperparameters(0.1, far, Vector::Zero(1), RStarRule{});
  CHECK(oracle.r_star == doctest::Approx(8.0));
  CHECK(oracle.lambda0 == doctest::Approx(0.1 / 16.0));
  const auto half = hyperparameters(0.1, far, Vector::Zero(1), RStarRule{RStarPolicy::oracle_half});
  CHECK(half.r_star == doctest::Approx(4.0));

  const auto boxed =
      make_quadratic_tracking(2, 1.0, gaussian(2, 0.0, 1.0), FeasibleSet::box(2, -1.0, 1.0));
  const auto diam = hyperparameters(0.1, boxed, Vector::Zero(2), RStarRule{RStarPolicy::diameter});
  CHECK(diam.r_star == doctest::Approx(4.0));  // D^2 = 8
  CHECK_THROWS_AS(hyperparameters(0.1, inst, Vector::Zero(2), RStarRule{RStarPolicy::diameter}),
                  ParameterError);
  CHECK_THROWS_AS(hyperparameters(0.1, inst, Vector::Zero(2), RStarRule{RStarPolicy::manual, 0.5}),
                  ParameterError);
  CHECK_THROWS_AS(hyperparameters(0.0, inst, Vector::Zero(2), RStarRule{}), ParameterError);
  CHECK_THROWS_AS(hyperparameters(0.1, inst, Vector::Zero(3), RStarRule{}), ParameterError);
  CHECK_THROWS_AS(hyperparameters(0.1, inst, Vector::Zero(2), RStarRule{}, 2.5), ParameterError);
}

TEST_CASE("batch objective agrees with the scenario oracle") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.5);
  for (const auto& inst : families()) {
    INFO(inst.name);
    const auto batch = draw_batch(inst, RngStream(5), 37);
    const auto obj = empirical_objective(inst, batch);
    for (int k = 0; k < 20; ++k) {
      Vector x(inst.dimension);
      for (auto& v : x) v = n(rng);
      CHECK(obj.value(x) == doctest::Approx(direct_average(inst, batch, x)).epsilon(1e-12));
      CHECK((obj.gradient(x) - direct_gradient(inst, batch, x)).norm() <=
            1e-10 * std::max(1.0, obj.gradient(x).norm()));
    }
  }
}

TEST_CASE("composite objective is linear in the scenario average and regularizer") {
  const auto inst = make_quadratic_tracking(3, 1.0, gaussian(3, 0.0, 1.0));
  const auto batch = draw_batch(inst, RngStream(8), 20);
  SaaConfig cfg = hyperparameters(0.2, inst, Vector::Constant(3, 0.5), RStarRule{}, 1.5);
  const auto plain = empirical_objective(inst, batch);
  const auto reg = empirical_objective(inst, batch, cfg);
  const Vector x = Vector::LinSpaced(3, -1.0, 2.0);
  CHECK(reg.value(x) ==
        doctest::Approx(plain.value(x) + cfg.lambda0 * regularizer_value(x, cfg.anchor, 1.5)));
  CHECK((reg.gradient(x) - plain.gradient(x) -
         cfg.lambda0 * regularizer_gradient(x, cfg.anchor, 1.5)).norm() < 1e-12);
  CHECK(reg.modulus() == doctest::Approx(cfg.lambda0 * 0.5 + 1.0));
  CHECK_FALSE(reg.smoothness());
  CHECK_FALSE(reg.quadratic());
}

TEST_CASE("regularized objective is strongly convex with the combined modulus") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 2.0);
  const auto inst = make_newsvendor(3, 1.0, 2.0, exponential(3, 1.0));
  const auto batch = draw_batch(inst, RngStream(6), 15);
  SaaConfig cfg = hyperparameters(0.5, inst, Vector::Zero(3), RStarRule{RStarPolicy::manual, 1.0});
  const auto obj = empirical_objective(inst, batch, cfg);
  const double m = obj.modulus();
  CHECK(m == doctest::Approx(0.25));
  for (int k = 0; k < 200; ++k) {
    Vector a(3), b(3);
    for (auto& v : a) v = n(rng);
    for (auto& v : b) v = n(rng);
    CHECK(obj.value(a) >= obj.value(b) + obj.gradient(b).dot(a - b) + 0.5 * m * (a - b).squaredNorm() - 1e-10);
  }
}

TEST_CASE("lambda0 decreases monotonically in R*") {
  const auto inst = make_quadratic_tracking(2, 1.0, gaussian(2, 0.0, 1.0));
  double prev = std::numeric_limits<double>::infinity();
  for (double r : {1.0, 2.0, 5.0, 50.0}) {
    const auto cfg = hyperparameters(0.1, inst, Vector::Zero(2), RStarRule{RStarPolicy::manual, r});
    CHECK(cfg.lambda0 < prev);
    CHECK(cfg.lambda0 == doctest::Approx(0.1 / (2.0 * r)));
    prev = cfg.lambda0;
  }
}

TEST_CASE("replace_one swaps exactly one scenario") {
  const auto inst = make_quadratic_tracking(2, 1.0, gaussian(2, 0.0, 1.0));
  const auto batch = draw_batch(inst, RngStream(1), 5);
  const Vector xi = Vector::Constant(2, 9.0);
  const auto swapped = replace_one(batch, 0, xi);
  CHECK(swapped.scenarios.row(0).transpose() == xi);
  CHECK(swapped.scenarios.bottomRows(4) == batch.scenarios.bottomRows(4));
  CHECK(replace_one(batch, 4, xi).scenarios.row(4).transpose() == xi);
  CHECK_THROWS_AS(replace_one(batch, 5, xi), ParameterError);
  CHECK_THROWS_AS(replace_one(batch, -1, xi), ParameterError);
  CHECK_THROWS_AS(replace_one(batch, 0, Vector::Zero(3)), ParameterError);
}

TEST_CASE("draw_batch is deterministic in the stream") {
  const auto inst = make_quadratic_tracking(2, 1.0, gaussian(2, 0.0, 1.0));
  CHECK(draw_batch(inst, RngStream(9, {1, 2}), 8).scenarios ==
        draw_batch(inst, RngStream(9, {1, 2}), 8).scenarios);
  CHECK(draw_batch(inst, RngStream(9, {1, 2}), 8).scenarios !=
        draw_batch(inst, RngStream(9, {1, 3}), 8).scenarios);
  CHECK_THROWS_AS(draw_batch(inst, RngStream(9), 0), ParameterError);
}

TEST_CASE("quadratic form includes the regularizer") {
  const auto inst = make_quadratic_tracking(2, 3.0, gaussian(2, 0.0, 1.0));
  const auto batch = draw_batch(inst, RngStream(2), 10);
  const auto cfg = hyperparameters(0.4, inst, Vector::Constant(2, 1.0), RStarRule{});
  const auto obj = empirical_objective(inst, batch, cfg);
  const auto form = obj.quadratic();
  REQUIRE(form);
  const Vector x = Vector::Constant(2, -0.7);
  CHECK((form->hessian * x - form->linear - obj.gradient(x)).norm() < 1e-12);
  CHECK(*obj.smoothness() == doctest::Approx(3.0 + cfg.lambda0));
  CHECK(obj.separable() == false);
}
