#pragma once

#include <memory>
#include <optional>

#include "spsaa/problems.hpp"

namespace spsaa {

/// Regularized SAA parameters: F_N(x) + lambda0 * V_{q'}(x).
struct SaaConfig {
  double epsilon = 0.0;
  double q_prime = 2.0;
  double r_star = 1.0;
  double lambda0 = 0.0;
  Vector anchor;
};

enum class RStarPolicy {
  oracle,       ///< max{1, V_{q'}(x*)}
  oracle_half,  ///< max{1, V_{q'}(x*) / 2}
  diameter,     ///< max{1, D_{q'}^2 / 2}; bounded sets only
  manual,
};

struct RStarRule {
  RStarPolicy policy = RStarPolicy::oracle;
  double value = 1.0;  ///< used by manual
};

/// min(q, 2) for q > 1, else the 1-norm surrogate 1 + 1/ln d.
double regularizer_exponent(double problem_q, Eigen::Index d);

/// Builds a config with lambda0 = epsilon / (2 R*). An explicit q_prime must
/// lie in (1, 2] and not exceed the problem's q.
SaaConfig hyperparameters(double epsilon, const ProblemInstance& instance, const Vector& anchor,
                          const RStarRule& rule, std::optional<double> q_prime = std::nullopt);

struct SampleBatch {
  ScenarioMatrix scenarios;
  DistSpec spec;
  RngStream stream;

  Eigen::Index size() const { return scenarios.rows(); }
};

SampleBatch draw_batch(const ProblemInstance& instance, const RngStream& stream, Eigen::Index n);

/// Copy of `batch` with scenario j (0-based) replaced by xi.
SampleBatch replace_one(const SampleBatch& batch, Eigen::Index j, VectorRef xi);

/// F_N + lambda0 V_{q'} over a fixed batch.
class CompositeObjective {
 public:
  CompositeObjective(const ProblemInstance& instance, std::shared_ptr<const BatchModel> batch,
                     const std::optional<SaaConfig>& cfg);

  Eigen::Index dimension() const { return dimension_; }
  double value(VectorRef x) const;
  Vector gradient(VectorRef x) const;
  double empirical_value(VectorRef x) const { return batch_->value(x); }

  double lambda0() const { return lambda0_; }
  double q_prime() const { return q_prime_; }
  const Vector& anchor() const { return anchor_; }

  /// Strong convexity modulus in the 2-norm: lambda0 (q' - 1) + mu.
  double modulus() const { return lambda0_ * (q_prime_ - 1.0) + mu_; }
  /// Gradient Lipschitz constant when one is known globally.
  std::optional<double> smoothness() const;
  bool smooth() const { return smooth_; }
  /// Gradient component i depends on x_i only.
  bool separable() const { return separable_ && (lambda0_ == 0.0 || q_prime_ == 2.0); }
  /// Hessian and linear term including the regularizer, when quadratic.
  std::optional<QuadraticForm> quadratic() const;

 private:
  std::shared_ptr<const BatchModel> batch_;
  Eigen::Index dimension_;
  double lambda0_ = 0.0;
  double q_prime_ = 2.0;
  Vector anchor_;
  double mu_ = 0.0;
  std::optional<double> family_smoothness_;
  bool smooth_;
  bool separable_;
};

CompositeObjective empirical_objective(const ProblemInstance& instance, const SampleBatch& batch,
                                       const std::optional<SaaConfig>& cfg = std::nullopt);

}  // namespace spsaa
