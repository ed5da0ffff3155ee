#pragma once

#include <optional>
#include <vector>

#include "spsaa/projection.hpp"
#include "spsaa/saa.hpp"

namespace spsaa {

inline constexpr long kDefaultBudget = 100000;

struct SolveOptions {
  double tol = 1e-8;
  long budget = kDefaultBudget;
  /// Defaults to the projection of the objective's anchor.
  std::optional<Vector> start;
  /// Record the objective value after every iteration.
  bool record_trace = false;
};

struct SolveResult {
  Vector point;
  /// Certified upper bound on value(point) - min value over the set.
  double inner_gap_bound = 0.0;
  long iterations = 0;
  double wall_time = 0.0;
  std::vector<double> trace;
};

/// Minimizes obj over the set to a certified inner gap.
///
/// Smooth objectives use projected gradient (fixed 1/L step or backtracking),
/// certified by ||G||^2 / (2m) or ||G|| D with G the gradient mapping.
/// Separable nonsmooth objectives on boxes bisect each coordinate.
/// Other nonsmooth objectives use weighted-average projected subgradient.
/// Throws ConvergenceError when the budget runs out with a certificate above
/// 1e3 * tol.
SolveResult minimize(const CompositeObjective& obj, const FeasibleSet& set,
                     const SolveOptions& options);

inline SolveResult minimize(const CompositeObjective& obj, const FeasibleSet& set, double tol,
                            long budget = kDefaultBudget) {
  SolveOptions o;
  o.tol = tol;
  o.budget = budget;
  return minimize(obj, set, o);
}

/// Exact minimizer of an unconstrained quadratic objective with q' = 2 (or no
/// regularizer), from the linear optimality system.
Vector closed_form_quadratic(const CompositeObjective& obj, const FeasibleSet& set);

}  // namespace spsaa
