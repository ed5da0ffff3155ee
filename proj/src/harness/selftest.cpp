#include "spsaa/harness/selftest.hpp"

#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <numbers>
#include <random>

#include "spsaa/geometry.hpp"
#include "spsaa/problems.hpp"
#include "spsaa/projection.hpp"
#include "spsaa/saa.hpp"
#include "spsaa/solver.hpp"

namespace spsaa::harness {
namespace {

using Engine = std::mt19937_64;

Vector uniform_vector(Engine& rng, Eigen::Index d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = u(rng);
  return v;
}

SuiteResult suite(std::string name) {
  SuiteResult s;
  s.name = std::move(name);
  return s;
}

/// Records a violation > 0 as a failure.
void record(SuiteResult& s, double violation, const std::string& what) {
  ++s.cases;
  if (violation > 0.0) {
    if (s.failures++ == 0) s.first_failure = what;
    s.worst = std::max(s.worst, violation);
  }
}

}  // namespace

std::vector<SuiteResult> geometry_suite(std::size_t cases, std::uint64_t seed) {
  Engine rng(seed);
  std::uniform_int_distribution<Eigen::Index> dim(2, 12);
  std::uniform_real_distribution<double> exponent(1.05, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double fd_exponents[] = {1.3, 1.5, 2.0};
  constexpr double kBox = 3.0;

  auto dual = suite("dual_norm_identity");
  auto sc = suite("regularizer_strong_convexity");
  auto lip = suite("regularizer_lipschitz");
  auto sandwich = suite("one_norm_sandwich");
  auto fd = suite("finite_difference");
  auto inverse = suite("mirror_inverse");
  auto triangle = suite("triangle_homogeneity");
  auto holder = suite("holder");

  for (std::size_t c = 0; c < cases; ++c) {
    const Eigen::Index d = dim(rng);
    const double qp = unit(rng) < 0.1 ? 2.0 : exponent(rng);
    const Vector anchor = uniform_vector(rng, d, -kBox, kBox);
    const Vector x = uniform_vector(rng, d, -kBox, kBox);
    const Vector y = uniform_vector(rng, d, -kBox, kBox);
    const auto tag = [&](const char* what) {
      return fmt::format("{} at case {} (d = {}, q' = {:.6f})", what, c, d, qp);
    };

    // ||grad V||_* = ||x - x0||_{q'}.
    const Vector g = regularizer_gradient(x, anchor, qp);
    const double un = qnorm(x - anchor, qp);
    const double rel = std::abs(qnorm(g, dual_exponent(qp)) - un) / un;
    record(dual, rel > 1e-10 ? rel : 0.0, tag("dual-norm identity"));

    // V(x) - V(y) - <grad V(y), x - y> >= (q' - 1)/2 ||x - y||^2.
    const double vx = regularizer_value(x, anchor, qp);
    const double vy = regularizer_value(y, anchor, qp);
    const double dxy = qnorm(x - y, qp);
    const double sc_slack = vx - vy - regularizer_gradient(y, anchor, qp).dot(x - y) -
                            0.5 * (qp - 1.0) * dxy * dxy;
    record(sc, sc_slack < -1e-9 ? -sc_slack : 0.0, tag("strong convexity"));

    // |V(x) - V(y)| <= D ||x - y|| with D the q'-diameter of the box.
    const double diam = 2.0 * kBox * std::pow(static_cast<double>(d), 1.0 / qp);
    const double lip_slack = std::abs(vx - vy) - diam * dxy;
    record(lip, lip_slack > 1e-9 ? lip_slack : 0.0, tag("Lipschitz bound"));

    // ||v||_q <= ||v||_1 <= e ||v||_q for q = 1 + 1/ln d; include sparse v.
    Vector v = x;
    if (c % 4 == 0) {
      v.setZero();
      v[static_cast<Eigen::Index>(c % static_cast<std::size_t>(d))] = x[0];
    }
    const double q_sur = one_norm_surrogate_exponent(d);
    const double n1 = qnorm(v, 1.0);
    const double nq = qnorm(v, q_sur);
    const double left = nq - n1 * (1.0 + 1e-12);
    const double right = n1 - std::numbers::e * nq * (1.0 + 1e-12);
    record(sandwich, std::max({left, right, 0.0}), tag("1-norm sandwich"));

    // Central differences, away from the kinks |u_i| = 0 of |u_i|^{q'}.
    {
      const double qf = fd_exponents[c % 3];
      Vector p = x;
      for (Eigen::Index i = 0; i < d; ++i) {
        if (std::abs(p[i] - anchor[i]) < 1e-2) p[i] = anchor[i] + 0.5;
      }
      const Vector grad = regularizer_gradient(p, anchor, qf);
      double err = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(p[i]));
        Vector a = p, b = p;
        a[i] += h;
        b[i] -= h;
        const double num =
            (regularizer_value(a, anchor, qf) - regularizer_value(b, anchor, qf)) / (2.0 * h);
        err = std::max(err, std::abs(num - grad[i]));
      }
      const double scale = std::max(grad.cwiseAbs().maxCoeff(), 1e-12);
      const double rel_fd = err / scale;
      record(fd, rel_fd > 1e-5 ? rel_fd : 0.0,
             fmt::format("finite differences at case {} (q' = {})", c, qf));
    }

    // The inverse mirror map recovers x.
    const Vector back = regularizer_gradient_inverse(g, anchor, qp);
    const double inv_err = (back - x).norm() / (1.0 + x.norm());
    record(inverse, inv_err > 1e-9 ? inv_err : 0.0, tag("mirror inverse"));

    // Triangle inequality and absolute homogeneity of qnorm.
    const double q = 1.0 + 3.0 * unit(rng);
    const double tri = qnorm(x + y, q) - qnorm(x, q) - qnorm(y, q);
    const double alpha = 4.0 * unit(rng) - 2.0;
    const double hom = std::abs(qnorm(alpha * x, q) - std::abs(alpha) * qnorm(x, q));
    record(triangle, std::max({tri - 1e-12, hom - 1e-12 * (1.0 + qnorm(x, q)), 0.0}),
           fmt::format("triangle/homogeneity at case {} (q = {})", c, q));

    // |<v, w>| <= ||v||_q ||w||_{q*}.
    const double hold = std::abs(x.dot(y)) - qnorm(x, q) * qnorm(y, dual_exponent(q));
    record(holder, hold > 1e-12 ? hold : 0.0, fmt::format("Hoelder at case {} (q = {})", c, q));
  }
  return {dual, sc, lip, sandwich, fd, inverse, triangle, holder};
}

SuiteResult projection_suite(std::size_t cases, std::uint64_t seed) {
  Engine rng(seed);
  std::uniform_int_distribution<Eigen::Index> dim(1, 10);
  auto s = suite("projection");
  for (std::size_t c = 0; c < cases; ++c) {
    const Eigen::Index d = dim(rng);
    FeasibleSet set;
    switch (c % 3) {
      case 0: {
        const Vector a = uniform_vector(rng, d, -2.0, 2.0);
        const Vector b = uniform_vector(rng, d, -2.0, 2.0);
        set = FeasibleSet::box(a.cwiseMin(b), a.cwiseMax(b));
        break;
      }
      case 1:
        set = FeasibleSet::euclidean_ball(uniform_vector(rng, d, -1.0, 1.0), 0.5 + (c % 5));
        break;
      default:
        set = FeasibleSet::simplex();
        break;
    }
    const Vector y = uniform_vector(rng, d, -5.0, 5.0);
    const Vector z = uniform_vector(rng, d, -5.0, 5.0);
    const Vector py = project(set, y);
    const Vector pz = project(set, z);
    double violation = (project(set, py) - py).norm() - 1e-12 * (1.0 + py.norm());
    violation = std::max(violation, (py - pz).norm() - (y - z).norm() - 1e-12);
    if (set.kind == FeasibleSet::Kind::simplex) {
      violation = std::max(violation, std::abs(py.sum() - 1.0) - 1e-12);
      violation = std::max(violation, -py.minCoeff() - 1e-12);
    }
    violation = std::max(violation, set.contains(py, kFeasibilityTol) ? 0.0 : 1.0);
    record(s, std::max(violation, 0.0),
           fmt::format("{} projection at case {} (d = {})", set.name(), c, d));
  }
  return s;
}

SuiteResult oracle_equivalence(std::size_t instances, std::uint64_t seed, double tol) {
  Engine rng(seed);
  std::uniform_int_distribution<Eigen::Index> dim(2, 20);
  std::uniform_int_distribution<Eigen::Index> size(1, 50);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto s = suite("oracle_equivalence");
  for (std::size_t c = 0; c < instances; ++c) {
    const Eigen::Index d = dim(rng);
    const double mu = 0.1 + 4.9 * unit(rng);
    const double mean = 4.0 * unit(rng) - 2.0;
    const double std = 0.1 + 2.0 * unit(rng);
    const auto instance = make_quadratic_tracking(d, mu, gaussian(d, mean, std));
    SaaConfig cfg;
    cfg.q_prime = 2.0;
    cfg.lambda0 = std::pow(10.0, -3.0 + 3.0 * unit(rng));
    cfg.anchor = uniform_vector(rng, d, -3.0, 3.0);
    const SampleBatch batch = draw_batch(instance, RngStream(seed, {c}), size(rng));
    const CompositeObjective obj = empirical_objective(instance, batch, cfg);

    // gap <= 0.5 m tol^2 guarantees ||x - x*|| <= tol.
    const double inner = 0.5 * obj.modulus() * tol * tol * 1e-2;
    const Vector x = minimize(obj, instance.set, inner).point;
    const Vector exact = closed_form_quadratic(obj, instance.set);
    const double diff = (x - exact).norm();
    record(s, diff > tol ? diff : 0.0,
           fmt::format("instance {} (d = {}, N = {}): ||difference|| = {:.3e}", c, d, batch.size(),
                       diff));
    s.worst = std::max(s.worst, diff);
  }
  return s;
}

std::vector<SuiteResult> run_selftest(std::uint64_t seed) {
  auto out = geometry_suite(2000, seed);
  out.push_back(projection_suite(600, seed + 1));
  out.push_back(oracle_equivalence(20, seed + 2));
  return out;
}

}  // namespace spsaa::harness
