#include "spsaa/stability.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <random>

#include "spsaa/errors.hpp"
#include "spsaa/solver.hpp"

namespace spsaa {
namespace {

constexpr std::uint64_t kProbeTag = 0x70726f6265ULL;    // index subset
constexpr std::uint64_t kReplaceTag = 0x7265706cULL;    // replacement scenarios

std::vector<Eigen::Index> choose_indices(Eigen::Index n, Eigen::Index m, const RngStream& stream) {
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  if (m == n) return all;
  // Partial Fisher-Yates.
  auto engine = stream.child(kProbeTag).engine();
  for (Eigen::Index i = 0; i < m; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
    std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(engine))]);
  }
  all.resize(static_cast<std::size_t>(m));
  std::sort(all.begin(), all.end());
  return all;
}

Vector solve_or_rethrow(const ProblemInstance& instance, const SampleBatch& batch,
                        const std::optional<SaaConfig>& cfg, double tol, const char* label) {
  try {
    return minimize(empirical_objective(instance, batch, cfg), instance.set, tol).point;
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(fmt::format("{}: {}", label, e.what()), e.certificate());
  }
}

}  // namespace

double stability_bound(double sigma_p, double lipschitz, double mu, Eigen::Index n) {
  if (!(mu > 0.0)) throw ParameterError("stability bound needs a positive modulus");
  const double nm = static_cast<double>(n) * mu;
  return (64.0 * sigma_p * sigma_p + 256.0 * lipschitz * lipschitz) / (nm * nm);
}

StabilityEstimate average_ro_stability(const ProblemInstance& instance, const SampleBatch& batch,
                                       const std::optional<SaaConfig>& cfg, double solver_tol,
                                       Eigen::Index m, const RngStream& stream) {
  const Eigen::Index n = batch.size();
  if (m < 1 || m > n) throw ParameterError(fmt::format("probe count {} outside [1, {}]", m, n));
  const double lambda_mod = cfg ? cfg->lambda0 * (cfg->q_prime - 1.0) : 0.0;
  const double mu = instance.constants.mu.value_or(0.0) + lambda_mod;
  if (!(mu > 0.0)) {
    throw ParameterError(
        fmt::format("{} is not strongly convex and no regularizer was supplied", instance.name));
  }
  const double q = instance.geometry_q();

  StabilityEstimate est;
  est.bound_rhs = stability_bound(instance.constants.sigma_p.value_or(0.0),
                                  instance.constants.lipschitz.value_or(0.0), mu, n);
  est.probed_indices = choose_indices(n, m, stream);

  const Vector base = solve_or_rethrow(instance, batch, cfg, solver_tol, "base batch");
  const RngStream replace_stream = stream.child(kReplaceTag);
  std::vector<double> disp;
  disp.reserve(est.probed_indices.size());
  for (const Eigen::Index j : est.probed_indices) {
    const ScenarioMatrix fresh =
        sample(instance.scenarios, replace_stream.child(static_cast<std::uint64_t>(j)), 1);
    const SampleBatch swapped = replace_one(batch, j, fresh.row(0).transpose());
    const auto label = fmt::format("replace-one index {}", j);
    const Vector moved = solve_or_rethrow(instance, swapped, cfg, solver_tol, label.c_str());
    const double dist = qnorm(moved - base, q);
    disp.push_back(dist * dist);
  }

  const double k = static_cast<double>(disp.size());
  est.value = std::accumulate(disp.begin(), disp.end(), 0.0) / k;
  if (disp.size() > 1) {
    double ss = 0.0;
    for (double v : disp) ss += (v - est.value) * (v - est.value);
    est.std_error = std::sqrt(ss / (k - 1.0) / k);
  }
  return est;
}

}  // namespace spsaa
