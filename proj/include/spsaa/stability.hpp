#pragma once

#include <optional>
#include <vector>

#include "spsaa/saa.hpp"

namespace spsaa {

struct StabilityEstimate {
  /// Mean of ||x^(j) - x||_q^2 over the probed indices.
  double value = 0.0;
  std::vector<Eigen::Index> probed_indices;
  double std_error = 0.0;
  /// (64 sigma_p^2 + 256 M^2) / (N^2 mu^2), mu including the regularizer.
  double bound_rhs = 0.0;
};

/// (64 sigma^2 + 256 M^2) / (N^2 mu^2).
double stability_bound(double sigma_p, double lipschitz, double mu, Eigen::Index n);

/// Average replace-one stability of the SAA minimizer on `batch`. Probes m
/// indices (every index when m = N, else a uniform subset drawn from the
/// stream). Replacement scenarios come from a dedicated child stream.
StabilityEstimate average_ro_stability(const ProblemInstance& instance, const SampleBatch& batch,
                                       const std::optional<SaaConfig>& cfg, double solver_tol,
                                       Eigen::Index m, const RngStream& stream);

}  // namespace spsaa
