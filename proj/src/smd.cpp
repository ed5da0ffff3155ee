#include "spsaa/smd.hpp"

#include <cmath>
#include <fmt/format.h>

#include "spsaa/errors.hpp"

namespace spsaa {

Vector smd_solve(const ProblemInstance& instance, const RngStream& stream, Eigen::Index n,
                 const SmdConfig& cfg) {
  if (n < 1) throw ParameterError(fmt::format("sample budget must be >= 1, got {}", n));
  if (!(cfg.step_scale > 0.0) || !std::isfinite(cfg.step_scale)) {
    throw ParameterError(fmt::format("step scale must be positive, got {}", cfg.step_scale));
  }
  if (!(cfg.q_prime > 1.0 && cfg.q_prime <= 2.0)) {
    throw ParameterError(fmt::format("q' must lie in (1, 2], got {}", cfg.q_prime));
  }
  const Eigen::Index d = instance.dimension;
  double mu = 0.0;
  if (cfg.step_rule == StepRule::strongly_convex) {
    if (!instance.constants.mu) {
      throw ParameterError(fmt::format("{} declares no mu for 1/(mu t) steps", instance.name));
    }
    mu = *instance.constants.mu;
  }
  const Vector center = cfg.start ? *cfg.start : Vector::Zero(d);
  if (center.size() != d) {
    throw ParameterError(fmt::format("start has {} entries, expected {}", center.size(), d));
  }

  // The exact mirror step is only used without constraints; otherwise the
  // step is a Euclidean projected subgradient step.
  const bool mirror = cfg.q_prime < 2.0 && instance.set.kind == FeasibleSet::Kind::all_space;
  const ScenarioMatrix xi = sample(instance.scenarios, stream, n);

  Vector x = project(instance.set, center);
  Vector avg = Vector::Zero(d);
  for (Eigen::Index t = 1; t <= n; ++t) {
    const double td = static_cast<double>(t);
    double gamma = cfg.step_scale;
    if (cfg.step_rule == StepRule::decaying) gamma /= std::sqrt(td);
    if (cfg.step_rule == StepRule::strongly_convex) gamma /= mu * td;

    const Vector g = instance.scenario_gradient(x, xi.row(t - 1).transpose());
    if (mirror) {
      const Vector y = regularizer_gradient(x, center, cfg.q_prime) - gamma * g;
      x = regularizer_gradient_inverse(y, center, cfg.q_prime);
    } else {
      x = project(instance.set, x - gamma * g);
    }
    if (cfg.averaging) avg += (x - avg) / td;
  }
  return cfg.averaging ? avg : x;
}

}  // namespace spsaa
