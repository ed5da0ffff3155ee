#include <doctest.h>

#include <cmath>
#include <vector>

#include "spsaa/errors.hpp"
#include "spsaa/harness/stats.hpp"
#include "spsaa/smd.hpp"

using namespace spsaa;

namespace {

std::vector<Eigen::Index> grid() { return {32, 64, 128, 256, 512, 1024, 2048, 4096}; }

double mean_gap(const ProblemInstance& inst, const SmdConfig& cfg, Eigen::Index n, int reps) {
  double acc = 0.0;
  for (int r = 0; r < reps; ++r) {
    acc += population_gap(inst, smd_solve(inst, RngStream(77, {static_cast<std::uint64_t>(n),
                                                               static_cast<std::uint64_t>(r)}),
                                          n, cfg));
  }
  return acc / reps;
}

/// Least-squares slope of ln y on ln x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

ProblemInstance degenerate() {
  return make_degenerate_quadratic(6, 2, gaussian(6, 0.5, 1.0), FeasibleSet::box(6, -2.0, 2.0), 4);
}

}  // namespace

TEST_CASE("point mass tracking with 1/(mu t) steps follows deterministic descent") {
  const double mu = 2.0, scale = 0.5;
  Vector target(3);
  target << 1.0, -2.0, 0.5;
  const auto inst = make_quadratic_tracking(3, mu, point_mass(target));
  SmdConfig cfg;
  cfg.step_rule = StepRule::strongly_convex;
  cfg.step_scale = scale;
  cfg.averaging = false;
  const Vector x = smd_solve(inst, RngStream(1), 500, cfg);

  // x_t - target shrinks by (1 - scale / t) per step from x_0 = 0.
  double factor = 1.0;
  for (int t = 1; t <= 500; ++t) factor *= 1.0 - scale / t;
  CHECK((x - (1.0 - factor) * target).norm() < 1e-12);

  // Unit scale lands on the target after the first step.
  cfg.step_scale = 1.0;
  const Vector exact = smd_solve(inst, RngStream(1), 500, cfg);
  CHECK((exact - target).norm() < 1e-15);
  CHECK(population_gap(inst, exact) <= 1e-3);
}

TEST_CASE("single step") {
  const auto inst = make_quadratic_tracking(2, 1.0, gaussian(2, 0.0, 1.0), FeasibleSet::box(2, -0.1, 0.1));
  SmdConfig cfg;
  cfg.step_scale = 0.5;
  const Vector x = smd_solve(inst, RngStream(2), 1, cfg);
  const Vector xi = sample(inst.scenarios, RngStream(2), 1).row(0).transpose();
  CHECK((x - project(inst.set, 0.5 * xi)).norm() < 1e-15);
  CHECK(inst.set.contains(x, 0.0));
}

TEST_CASE("deterministic given inputs") {
  const auto inst = degenerate();
  SmdConfig cfg;
  CHECK(smd_solve(inst, RngStream(3, {1}), 200, cfg) == smd_solve(inst, RngStream(3, {1}), 200, cfg));
  CHECK(smd_solve(inst, RngStream(3, {1}), 200, cfg) != smd_solve(inst, RngStream(3, {2}), 200, cfg));
}

TEST_CASE("exact mirror step for q' < 2 without constraints") {
  const auto inst = make_quadratic_tracking(3, 1.0, gaussian(3, 1.0, 0.5));
  SmdConfig cfg;
  cfg.q_prime = 1.5;
  cfg.step_scale = 0.3;
  cfg.averaging = false;
  const Vector x = smd_solve(inst, RngStream(4), 1, cfg);
  const Vector xi = sample(inst.scenarios, RngStream(4), 1).row(0).transpose();
  // From x0 = 0 the dual point is -gamma * grad f(0) = gamma * xi.
  const Vector y = 0.3 * xi;
  CHECK((regularizer_gradient(x, Vector::Zero(3), 1.5) - y).norm() < 1e-10);
  const Vector many = smd_solve(inst, RngStream(4), 2000, cfg);
  CHECK(many.allFinite());
  CHECK(population_gap(inst, many) < 0.5);
}

TEST_CASE("argument errors") {
  const auto inst = degenerate();
  SmdConfig cfg;
  CHECK_THROWS_AS(smd_solve(inst, RngStream(1), 0, cfg), ParameterError);
  cfg.step_rule = StepRule::strongly_convex;
  CHECK_THROWS_AS(smd_solve(inst, RngStream(1), 10, cfg), ParameterError);
  cfg.step_rule = StepRule::constant;
  cfg.step_scale = 0.0;
  CHECK_THROWS_AS(smd_solve(inst, RngStream(1), 10, cfg), ParameterError);
  cfg.step_scale = 1.0;
  cfg.q_prime = 2.5;
  CHECK_THROWS_AS(smd_solve(inst, RngStream(1), 10, cfg), ParameterError);
  cfg.q_prime = 2.0;
  cfg.start = Vector::Zero(2);
  CHECK_THROWS_AS(smd_solve(inst, RngStream(1), 10, cfg), ParameterError);
}

TEST_CASE("iterates stay feasible") {
  const auto inst = make_newsvendor(3, 1.0, 3.0, exponential(3, 0.2), FeasibleSet::box(3, 0.0, 2.0));
  SmdConfig cfg;
  cfg.step_rule = StepRule::constant;
  cfg.step_scale = 5.0;
  for (Eigen::Index n : {1, 2, 7, 100}) {
    cfg.averaging = false;
    CHECK(inst.set.contains(smd_solve(inst, RngStream(5), n, cfg), 0.0));
    cfg.averaging = true;
    CHECK(inst.set.contains(smd_solve(inst, RngStream(5), n, cfg), 1e-12));
  }
}

TEST_CASE("averaged decaying steps improve monotonically in N") {
  const auto inst = degenerate();
  SmdConfig cfg;
  std::vector<double> ns, means;
  for (auto n : grid()) {
    ns.push_back(static_cast<double>(n));
    means.push_back(mean_gap(inst, cfg, n, 100));
  }
  CHECK(harness::spearman_rho(ns, means) <= -0.9);
}

TEST_CASE("last iterate with decaying steps shows the 1/sqrt(N) rate") {
  const auto inst = degenerate();
  SmdConfig cfg;
  cfg.averaging = false;
  std::vector<double> ns, means;
  for (auto n : grid()) {
    ns.push_back(static_cast<double>(n));
    means.push_back(mean_gap(inst, cfg, n, 100));
  }
  const double s = slope(ns, means);
  CHECK(s >= -0.7);
  CHECK(s <= -0.3);
}
