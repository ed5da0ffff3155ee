#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spsaa::harness {

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  /// Largest violation seen (in the suite's own units).
  double worst = 0.0;
  std::string first_failure;

  bool passed() const { return failures == 0; }
};

/// Randomized checks of the norm and regularizer identities: dual-norm
/// identity, strong convexity and Lipschitz bounds of V_{q'}, the 1-norm
/// sandwich, finite-difference gradients, mirror-map inversion, triangle and
/// Hoelder inequalities.
std::vector<SuiteResult> geometry_suite(std::size_t cases, std::uint64_t seed);

/// Idempotence, nonexpansiveness and simplex feasibility of projections.
SuiteResult projection_suite(std::size_t cases, std::uint64_t seed);

/// minimize vs the linear-system minimizer on random regularized tracking
/// instances; passes when every 2-norm difference is <= tol.
SuiteResult oracle_equivalence(std::size_t instances, std::uint64_t seed, double tol = 1e-8);

/// Everything above at interactive sizes.
std::vector<SuiteResult> run_selftest(std::uint64_t seed);

}  // namespace spsaa::harness
