#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "spsaa/errors.hpp"
#include "spsaa/solver.hpp"

using namespace spsaa;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

/// Empirical newsvendor minimizer: the ceil(N c / (h + c))-th order statistic per coordinate.
Vector newsvendor_order_statistic(const SampleBatch& batch, double h, double c) {
  const Eigen::Index n = batch.size();
  const auto k = static_cast<Eigen::Index>(std::ceil(n * c / (h + c))) - 1;
  Vector out(batch.scenarios.cols());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    std::vector<double> col(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) col[static_cast<std::size_t>(j)] = batch.scenarios(j, i);
    std::nth_element(col.begin(), col.begin() + k, col.end());
    out[i] = col[k];
  }
  return out;
}

}  // namespace

TEST_CASE("projection examples") {
  CHECK(project(FeasibleSet::box(2, -1.0, 1.0), vec({3, -0.5})) == vec({1, -0.5}));
  CHECK((project(FeasibleSet::euclidean_ball(Vector::Zero(2), 1.0), vec({3, 4})) - vec({0.6, 0.8}))
            .norm() < 1e-15);
  CHECK((project(FeasibleSet::simplex(), vec({1, 1})) - vec({0.5, 0.5})).norm() < 1e-15);
  CHECK((project(FeasibleSet::simplex(), vec({2, 0})) - vec({1, 0})).norm() < 1e-15);
  CHECK((project(FeasibleSet::simplex(), vec({0.2, 0.3, 0.5})) - vec({0.2, 0.3, 0.5})).norm() < 1e-15);
}

TEST_CASE("regularized tracking matches its closed form") {
  const double mu = 2.0;
  const auto inst = make_quadratic_tracking(4, mu, gaussian(4, 1.0, 1.0));
  const auto batch = draw_batch(inst, RngStream(3), 50);
  const auto cfg = hyperparameters(0.3, inst, Vector::Zero(4), RStarRule{});
  const auto obj = empirical_objective(inst, batch, cfg);
  const Vector mean = batch.scenarios.colwise().mean().transpose();
  const Vector expected = mu * mean / (mu + cfg.lambda0);

  CHECK((closed_form_quadratic(obj, inst.set) - expected).norm() < 1e-12);
  const double tol = 1e-12;
  const auto res = minimize(obj, inst.set, tol);
  CHECK(res.inner_gap_bound <= tol);
  CHECK((res.point - expected).norm() <= std::sqrt(2.0 * tol / obj.modulus()) + 1e-12);

  CHECK_THROWS_AS(closed_form_quadratic(obj, FeasibleSet::box(4, -1.0, 1.0)), ContractError);
  const auto nv = make_newsvendor(2, 1.0, 1.0, exponential(2, 1.0));
  CHECK_THROWS_AS(closed_form_quadratic(empirical_objective(nv, draw_batch(nv, RngStream(1), 5)),
                                        nv.set),
                  ContractError);
}

TEST_CASE("projected gradient certificate bounds the true gap") {
  const auto inst =
      make_quadratic_tracking(3, 1.0, gaussian(3, 0.5, 2.0), FeasibleSet::box(3, -1.0, 1.0));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto batch = draw_batch(inst, RngStream(s), 30);
    const auto obj = empirical_objective(inst, batch);
    // Separable box quadratic: minimizer is the clipped sample mean.
    const Vector exact = project(inst.set, batch.scenarios.colwise().mean().transpose());
    for (double tol : {1e-3, 1e-6, 1e-10}) {
      const auto res = minimize(obj, inst.set, tol);
      const double gap = obj.value(res.point) - obj.value(exact);
      CHECK(gap <= res.inner_gap_bound + 1e-14);
      CHECK(res.inner_gap_bound <= tol);
    }
  }
}

TEST_CASE("backtracking path for q' < 2 and the quartic family") {
  const auto inst = make_quartic_nonlipschitz(Vector::Constant(3, 0.5), gaussian(3, 0.0, 1.0));
  const auto batch = draw_batch(inst, RngStream(4), 40);
  const auto cfg = hyperparameters(0.2, inst, Vector::Zero(3), RStarRule{}, 1.5);
  const auto obj = empirical_objective(inst, batch, cfg);
  const auto reference = minimize(obj, inst.set, 1e-14);
  for (double tol : {1e-4, 1e-8}) {
    const auto res = minimize(obj, inst.set, tol);
    CHECK(obj.value(res.point) - obj.value(reference.point) <= res.inner_gap_bound + 1e-14);
    CHECK(res.inner_gap_bound <= tol);
  }
}

TEST_CASE("projected gradient descends monotonically") {
  const auto inst =
      make_quadratic_tracking(5, 1.0, gaussian(5, 3.0, 1.0), FeasibleSet::euclidean_ball(Vector::Zero(5), 2.0));
  const auto obj = empirical_objective(inst, draw_batch(inst, RngStream(5), 20));
  SolveOptions o;
  o.tol = 1e-10;
  o.record_trace = true;
  const auto res = minimize(obj, inst.set, o);
  REQUIRE(res.trace.size() >= 2);
  for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace[i] <= res.trace[i - 1] + 1e-14);
  CHECK(res.iterations >= 1);
}

TEST_CASE("separable bisection recovers the order statistic") {
  const double h = 1.0, c = 3.0;
  const auto inst = make_newsvendor(4, h, c, exponential(4, 1.0), FeasibleSet::box(4, 0.0, 20.0));
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto batch = draw_batch(inst, RngStream(s), 41);
    const auto obj = empirical_objective(inst, batch);
    const Vector exact = newsvendor_order_statistic(batch, h, c);
    const auto res = minimize(obj, inst.set, 1e-9);
    CHECK(obj.value(res.point) - obj.value(exact) <= res.inner_gap_bound + 1e-14);
    CHECK(obj.value(res.point) - obj.value(exact) >= -1e-12);
    CHECK(res.inner_gap_bound <= 1e-9);
  }
  // Unbounded coordinates are bracketed by expansion.
  const auto open = make_newsvendor(2, h, c, exponential(2, 1.0));
  const auto batch = draw_batch(open, RngStream(9), 21);
  const auto res = minimize(empirical_objective(open, batch), open.set, 1e-9);
  CHECK((res.point - newsvendor_order_statistic(batch, h, c)).norm() < 1e-6);
}

TEST_CASE("subgradient averaging certificate") {
  const auto inst = make_newsvendor(2, 1.0, 2.0, exponential(2, 1.0), FeasibleSet::box(2, 0.0, 4.0));
  const auto batch = draw_batch(inst, RngStream(11), 15);
  const auto cfg = hyperparameters(0.1, inst, Vector::Zero(2), RStarRule{}, 1.5);
  const auto obj = empirical_objective(inst, batch, cfg);
  REQUIRE_FALSE(obj.separable());
  REQUIRE_FALSE(obj.smooth());
  const auto res = minimize(obj, inst.set, 2e-2, 2000000);
  CHECK(res.inner_gap_bound <= 2e-2);
  // Grid search lower bound over the box.
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 400; ++i) {
    for (int j = 0; j <= 400; ++j) best = std::min(best, obj.value(vec({i * 0.01, j * 0.01})));
  }
  CHECK(obj.value(res.point) - best <= res.inner_gap_bound + 1e-12);
}

TEST_CASE("solver argument and budget errors") {
  const auto inst = make_quadratic_tracking(2, 1.0, gaussian(2, 0.0, 1.0));
  const auto obj = empirical_objective(inst, draw_batch(inst, RngStream(1), 10));
  CHECK_THROWS_AS(minimize(obj, inst.set, 0.0), ParameterError);
  CHECK_THROWS_AS(minimize(obj, inst.set, 1e-8, 0), ParameterError);

  const auto nv = make_newsvendor(2, 1.0, 2.0, exponential(2, 1.0), FeasibleSet::box(2, 0.0, 4.0));
  const auto cfg = hyperparameters(0.1, nv, Vector::Zero(2), RStarRule{}, 1.5);
  const auto hard = empirical_objective(nv, draw_batch(nv, RngStream(2), 15), cfg);
  CHECK_THROWS_AS(minimize(hard, nv.set, 1e-12, 10), ConvergenceError);
}

TEST_CASE("start point is honoured and projected") {
  const auto inst =
      make_quadratic_tracking(2, 1.0, gaussian(2, 0.0, 1.0), FeasibleSet::box(2, -1.0, 1.0));
  const auto obj = empirical_objective(inst, draw_batch(inst, RngStream(1), 10));
  SolveOptions o;
  o.tol = 1e-10;
  o.start = vec({50, -50});
  const auto res = minimize(obj, inst.set, o);
  CHECK(inst.set.contains(res.point, 0.0));
  CHECK(res.inner_gap_bound <= 1e-10);
}
