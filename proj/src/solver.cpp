#include "spsaa/solver.hpp"

#include <chrono>
#include <cmath>
#include <fmt/format.h>

#include "spsaa/errors.hpp"

namespace spsaa {
namespace {

constexpr double kFailureFactor = 1e3;

struct Outcome {
  Vector point;
  double certificate;
  long iterations;
};

[[noreturn]] void fail(const char* path, double certificate, double tol, long budget) {
  throw ConvergenceError(fmt::format("{} solver stopped after {} iterations with certificate {:.3e} "
                                     "(tol {:.3e})",
                                     path, budget, certificate, tol),
                         certificate);
}

double gradient_mapping_bound(double g_norm, double modulus, double diameter) {
  double bound = kInf;
  if (modulus > 0.0) bound = g_norm * g_norm / (2.0 * modulus);
  if (std::isfinite(diameter)) bound = std::min(bound, g_norm * diameter);
  return bound;
}

Outcome projected_gradient(const CompositeObjective& obj, const FeasibleSet& set, Vector x,
                           const SolveOptions& opt, std::vector<double>* trace) {
  const double m = obj.modulus();
  const double diameter = set.diameter(2.0, obj.dimension());
  if (!(m > 0.0) && !std::isfinite(diameter)) {
    throw ContractError("smooth solver needs a strongly convex objective or a bounded set");
  }
  const auto fixed_l = obj.smoothness();
  double lip = fixed_l.value_or(1.0);
  double fx = obj.value(x);
  double cert = kInf;

  for (long it = 1; it <= opt.budget; ++it) {
    const Vector g = obj.gradient(x);
    Vector next;
    double f_next;
    if (fixed_l) {
      next = project(set, x - g / lip);
      f_next = obj.value(next);
    } else {
      lip *= 0.5;
      for (;;) {
        next = project(set, x - g / lip);
        f_next = obj.value(next);
        const Vector step = next - x;
        const double model = fx + g.dot(step) + 0.5 * lip * step.squaredNorm();
        if (f_next <= model + 1e-14 * std::abs(fx)) break;
        lip *= 2.0;
        if (!std::isfinite(lip)) throw ConvergenceError("backtracking diverged", kInf);
      }
    }
    cert = gradient_mapping_bound(lip * (x - next).norm(), m, diameter);
    x = std::move(next);
    fx = f_next;
    if (trace) trace->push_back(fx);
    if (cert <= opt.tol) return {x, cert, it};
  }
  if (cert > kFailureFactor * opt.tol) fail("projected-gradient", cert, opt.tol, opt.budget);
  return {x, cert, opt.budget};
}

/// Per-coordinate bracket search. Keeps g_i(a_i) <= 0 <= g_i(b_i); for a
/// convex 1-D piece the gap at either endpoint is at most |g| (b - a).
Outcome separable_bisection(const CompositeObjective& obj, const FeasibleSet& set, const Vector& x0,
                            const SolveOptions& opt, std::vector<double>* trace) {
  const Eigen::Index d = obj.dimension();
  Vector a = x0;
  Vector b = x0;
  long it = 0;
  if (set.kind == FeasibleSet::Kind::box) {
    a = set.lo;
    b = set.hi;
  } else {
    Vector step = Vector::Ones(d);
    Vector ga = obj.gradient(a);
    Vector gb = ga;
    while ((ga.array() > 0.0).any() || (gb.array() < 0.0).any()) {
      if (++it > opt.budget) fail("bracketing", kInf, opt.tol, opt.budget);
      for (Eigen::Index i = 0; i < d; ++i) {
        if (ga[i] > 0.0) a[i] -= step[i];
        if (gb[i] < 0.0) b[i] += step[i];
      }
      step *= 2.0;
      ga = obj.gradient(a);
      gb = obj.gradient(b);
    }
  }

  Vector ga = obj.gradient(a);
  Vector gb = obj.gradient(b);
  // Endpoints that are already optimal collapse the bracket.
  for (Eigen::Index i = 0; i < d; ++i) {
    if (ga[i] >= 0.0) {
      b[i] = a[i];
      gb[i] = ga[i];
    } else if (gb[i] <= 0.0) {
      a[i] = b[i];
      ga[i] = gb[i];
    }
  }

  auto pick = [&](Vector& point) {
    double cert = 0.0;
    point.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double width = b[i] - a[i];
      if (width <= 0.0) {
        point[i] = a[i];
        continue;
      }
      const bool left = std::abs(ga[i]) <= std::abs(gb[i]);
      point[i] = left ? a[i] : b[i];
      cert += (left ? std::abs(ga[i]) : std::abs(gb[i])) * width;
    }
    return cert;
  };

  Vector x;
  double cert = pick(x);
  while (cert > opt.tol) {
    if (++it > opt.budget) break;
    Vector mid = 0.5 * (a + b);
    const Vector gm = obj.gradient(mid);
    bool moved = false;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (b[i] - a[i] <= 0.0 || mid[i] <= a[i] || mid[i] >= b[i]) {
        b[i] = a[i] = (std::abs(ga[i]) <= std::abs(gb[i]) ? a[i] : b[i]);
        continue;
      }
      moved = true;
      if (gm[i] <= 0.0) {
        a[i] = mid[i];
        ga[i] = gm[i];
      } else {
        b[i] = mid[i];
        gb[i] = gm[i];
      }
    }
    cert = pick(x);
    if (trace) trace->push_back(obj.value(x));
    if (!moved) break;
  }
  if (cert > kFailureFactor * opt.tol) fail("bisection", cert, opt.tol, opt.budget);
  return {x, cert, it};
}

Outcome subgradient_average(const CompositeObjective& obj, const FeasibleSet& set, Vector x,
                            const SolveOptions& opt, std::vector<double>* trace) {
  const double diameter = set.diameter(2.0, obj.dimension());
  if (!std::isfinite(diameter)) {
    throw ContractError("subgradient solver needs a bounded feasible set");
  }
  Vector avg = Vector::Zero(x.size());
  double weight = 0.0;
  double sq_sum = 0.0;
  double g_max = 0.0;
  double cert = kInf;
  for (long it = 1; it <= opt.budget; ++it) {
    const Vector g = obj.gradient(x);
    const double gn = g.norm();
    if (gn == 0.0) return {x, 0.0, it};
    g_max = std::max(g_max, gn);
    const double gamma = diameter / (g_max * std::sqrt(static_cast<double>(it)));
    avg += gamma * x;
    weight += gamma;
    sq_sum += gamma * gamma * gn * gn;
    cert = (diameter * diameter + sq_sum) / (2.0 * weight);
    if (trace) trace->push_back(obj.value(avg / weight));
    if (cert <= opt.tol) return {avg / weight, cert, it};
    x = project(set, x - gamma * g);
  }
  if (cert > kFailureFactor * opt.tol) fail("subgradient", cert, opt.tol, opt.budget);
  return {avg / weight, cert, opt.budget};
}

}  // namespace

SolveResult minimize(const CompositeObjective& obj, const FeasibleSet& set,
                     const SolveOptions& options) {
  set.validate(obj.dimension());
  if (!(options.tol > 0.0)) {
    throw ParameterError(fmt::format("solver tolerance must be positive, got {}", options.tol));
  }
  if (options.budget < 1) {
    throw ParameterError(fmt::format("iteration budget must be >= 1, got {}", options.budget));
  }
  const auto started = std::chrono::steady_clock::now();
  const Vector start = project(set, options.start ? *options.start : obj.anchor());

  SolveResult result;
  std::vector<double>* trace = options.record_trace ? &result.trace : nullptr;
  Outcome out;
  const bool boxlike =
      set.kind == FeasibleSet::Kind::box || set.kind == FeasibleSet::Kind::all_space;
  if (obj.smooth()) {
    out = projected_gradient(obj, set, start, options, trace);
  } else if (obj.separable() && boxlike) {
    out = separable_bisection(obj, set, start, options, trace);
  } else {
    out = subgradient_average(obj, set, start, options, trace);
  }
  result.point = std::move(out.point);
  result.inner_gap_bound = std::max(0.0, out.certificate);
  result.iterations = out.iterations;
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

Vector closed_form_quadratic(const CompositeObjective& obj, const FeasibleSet& set) {
  if (set.kind != FeasibleSet::Kind::all_space) {
    throw ContractError("closed-form minimizer is only available without constraints");
  }
  const auto form = obj.quadratic();
  if (!form) throw ContractError("objective is not quadratic with a q' = 2 regularizer");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(form->hessian);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 1e-12 * ldlt.vectorD().cwiseAbs().maxCoeff())) {
    throw ContractError("quadratic objective is not strictly convex");
  }
  return ldlt.solve(form->linear);
}

}  // namespace spsaa
