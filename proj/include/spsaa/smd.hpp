#pragma once

#include <optional>

#include "spsaa/problems.hpp"

namespace spsaa {

enum class StepRule {
  constant,         ///< gamma_t = c
  decaying,         ///< gamma_t = c / sqrt(t)
  strongly_convex,  ///< gamma_t = c / (mu t)
};

struct SmdConfig {
  double q_prime = 2.0;
  StepRule step_rule = StepRule::decaying;
  double step_scale = 1.0;
  bool averaging = true;
  /// Initial point and mirror-map center; defaults to the origin.
  std::optional<Vector> start;
};

/// Stochastic mirror descent with distance-generating function V_{q'}: one
/// fresh scenario per step, n steps. Returns the uniform average of the
/// post-step iterates when averaging, else the last iterate.
Vector smd_solve(const ProblemInstance& instance, const RngStream& stream, Eigen::Index n,
                 const SmdConfig& cfg);

}  // namespace spsaa
