#include "spsaa/saa.hpp"

#include <cmath>
#include <fmt/format.h>

#include "spsaa/errors.hpp"

namespace spsaa {

double regularizer_exponent(double problem_q, Eigen::Index d) {
  if (!(problem_q >= 1.0)) throw ParameterError(fmt::format("q must be >= 1, got {}", problem_q));
  if (problem_q > 1.0) return std::min(problem_q, 2.0);
  return one_norm_surrogate_exponent(d);
}

SaaConfig hyperparameters(double epsilon, const ProblemInstance& instance, const Vector& anchor,
                          const RStarRule& rule, std::optional<double> q_prime) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ParameterError(fmt::format("epsilon must be positive, got {}", epsilon));
  }
  if (anchor.size() != instance.dimension) {
    throw ParameterError(fmt::format("anchor has {} entries, expected {}", anchor.size(),
                                     instance.dimension));
  }
  const double q = instance.geometry_q();
  SaaConfig cfg;
  cfg.epsilon = epsilon;
  cfg.anchor = anchor;
  cfg.q_prime = q_prime ? *q_prime : regularizer_exponent(q, instance.dimension);
  if (!(cfg.q_prime > 1.0 && cfg.q_prime <= 2.0)) {
    throw ParameterError(fmt::format("q' must lie in (1, 2], got {}", cfg.q_prime));
  }
  if (q > 1.0 && cfg.q_prime > q) {
    throw ParameterError(fmt::format("q' = {} exceeds the problem exponent q = {}", cfg.q_prime, q));
  }

  switch (rule.policy) {
    case RStarPolicy::oracle:
    case RStarPolicy::oracle_half: {
      const Vector x_star = instance.optimizer_near(anchor);
      double v = regularizer_value(x_star, anchor, cfg.q_prime);
      if (rule.policy == RStarPolicy::oracle_half) v *= 0.5;
      cfg.r_star = std::max(1.0, v);
      break;
    }
    case RStarPolicy::diameter: {
      if (!instance.set.bounded()) {
        throw ParameterError("diameter R* policy needs a bounded feasible set");
      }
      const double diam = instance.set.diameter(cfg.q_prime, instance.dimension);
      cfg.r_star = std::max(1.0, 0.5 * diam * diam);
      break;
    }
    case RStarPolicy::manual:
      if (!(rule.value >= 1.0) || !std::isfinite(rule.value)) {
        throw ParameterError(fmt::format("manual R* must be >= 1, got {}", rule.value));
      }
      cfg.r_star = rule.value;
      break;
  }
  cfg.lambda0 = epsilon / (2.0 * cfg.r_star);
  return cfg;
}

SampleBatch draw_batch(const ProblemInstance& instance, const RngStream& stream, Eigen::Index n) {
  if (n < 1) throw ParameterError(fmt::format("batch size must be >= 1, got {}", n));
  return SampleBatch{sample(instance.scenarios, stream, n), instance.scenarios, stream};
}

SampleBatch replace_one(const SampleBatch& batch, Eigen::Index j, VectorRef xi) {
  if (j < 0 || j >= batch.size()) {
    throw ParameterError(fmt::format("replace index {} outside [0, {})", j, batch.size()));
  }
  if (xi.size() != batch.scenarios.cols()) {
    throw ParameterError(fmt::format("scenario has {} entries, expected {}", xi.size(),
                                     batch.scenarios.cols()));
  }
  SampleBatch out = batch;
  out.scenarios.row(j) = xi.transpose();
  return out;
}

CompositeObjective::CompositeObjective(const ProblemInstance& instance,
                                       std::shared_ptr<const BatchModel> batch,
                                       const std::optional<SaaConfig>& cfg)
    : batch_(std::move(batch)),
      dimension_(instance.dimension),
      anchor_(Vector::Zero(instance.dimension)),
      mu_(instance.constants.mu.value_or(0.0)),
      family_smoothness_(instance.constants.smoothness),
      smooth_(instance.model->smooth()),
      separable_(instance.model->separable()) {
  if (cfg) {
    if (cfg->anchor.size() != dimension_) {
      throw ParameterError(fmt::format("anchor has {} entries, expected {}", cfg->anchor.size(),
                                       dimension_));
    }
    if (!(cfg->lambda0 >= 0.0) || !std::isfinite(cfg->lambda0)) {
      throw ParameterError(fmt::format("lambda0 must be finite and >= 0, got {}", cfg->lambda0));
    }
    if (cfg->lambda0 > 0.0 && !(cfg->q_prime > 1.0 && cfg->q_prime <= 2.0)) {
      throw ParameterError(fmt::format("q' must lie in (1, 2], got {}", cfg->q_prime));
    }
    lambda0_ = cfg->lambda0;
    q_prime_ = cfg->q_prime;
    anchor_ = cfg->anchor;
  }
}

double CompositeObjective::value(VectorRef x) const {
  double v = batch_->value(x);
  if (lambda0_ > 0.0) v += lambda0_ * regularizer_value(x, anchor_, q_prime_);
  return v;
}

Vector CompositeObjective::gradient(VectorRef x) const {
  Vector g = batch_->gradient(x);
  if (lambda0_ > 0.0) g += lambda0_ * regularizer_gradient(x, anchor_, q_prime_);
  return g;
}

std::optional<double> CompositeObjective::smoothness() const {
  if (!smooth_ || !family_smoothness_) return std::nullopt;
  if (lambda0_ == 0.0) return *family_smoothness_;
  if (q_prime_ == 2.0) return *family_smoothness_ + lambda0_;
  return std::nullopt;
}

std::optional<QuadraticForm> CompositeObjective::quadratic() const {
  if (lambda0_ > 0.0 && q_prime_ != 2.0) return std::nullopt;
  auto form = batch_->quadratic();
  if (!form) return std::nullopt;
  if (lambda0_ > 0.0) {
    form->hessian.diagonal().array() += lambda0_;
    form->linear += lambda0_ * anchor_;
  }
  return form;
}

CompositeObjective empirical_objective(const ProblemInstance& instance, const SampleBatch& batch,
                                       const std::optional<SaaConfig>& cfg) {
  if (batch.scenarios.cols() != instance.dimension) {
    throw ParameterError(fmt::format("batch scenarios have {} entries, expected {}",
                                     batch.scenarios.cols(), instance.dimension));
  }
  if (batch.size() < 1) throw ParameterError("empty batch");
  return CompositeObjective(instance, instance.model->bind(batch.scenarios), cfg);
}

}  // namespace spsaa
