#pragma once

#include <string>

#include "spsaa/geometry.hpp"

namespace spsaa {

/// Convex feasible region X.
struct FeasibleSet {
  enum class Kind { all_space, box, euclidean_ball, simplex };

  Kind kind = Kind::all_space;
  Vector lo;
  Vector hi;
  Vector center;
  double radius = 0.0;

  static FeasibleSet all_space() { return {}; }
  static FeasibleSet box(Vector lo, Vector hi);
  static FeasibleSet box(Eigen::Index d, double lo, double hi);
  static FeasibleSet euclidean_ball(Vector center, double radius);
  static FeasibleSet simplex() { return FeasibleSet{Kind::simplex, {}, {}, {}, 0.0}; }

  /// Throws ParameterError when the set is malformed (lo > hi, radius <= 0) or
  /// does not match dimension d.
  void validate(Eigen::Index d) const;

  bool bounded() const { return kind != Kind::all_space; }
  /// Diameter of the set in the r-norm; +inf when unbounded.
  double diameter(double r, Eigen::Index d) const;
  bool contains(VectorRef x, double tol) const;
  std::string name() const;
};

inline constexpr double kFeasibilityTol = 1e-9;

/// Euclidean projection onto the set. The simplex uses sort-and-threshold.
Vector project(const FeasibleSet& set, VectorRef y);

}  // namespace spsaa
