#include "spsaa/problems.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fmt/format.h>
#include <vector>

#include "spsaa/errors.hpp"

namespace spsaa {

std::string AssumptionSet::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (!bits_.test(i)) continue;
    if (!out.empty()) out += ',';
    out += fmt::format("A{}", i + 1);
  }
  return out;
}

namespace {

void require_dimension(const DistSpec& spec, Eigen::Index d, const char* what) {
  if (d < 1) throw ParameterError(fmt::format("dimension must be >= 1, got {}", d));
  if (spec.dimension() != d) {
    throw ParameterError(
        fmt::format("{} has dimension {}, expected {}", what, spec.dimension(), d));
  }
}

/// Keeps the scenarios and averages the scenario oracle.
class LoopBatch final : public BatchModel {
 public:
  LoopBatch(std::shared_ptr<const ScenarioModel> model, ScenarioMatrix scenarios)
      : model_(std::move(model)), scenarios_(std::move(scenarios)) {}

  Eigen::Index size() const override { return scenarios_.rows(); }

  double value(VectorRef x) const override {
    double total = 0.0;
    for (Eigen::Index j = 0; j < scenarios_.rows(); ++j) {
      total += model_->value(x, scenarios_.row(j).transpose());
    }
    return total / static_cast<double>(scenarios_.rows());
  }

  Vector gradient(VectorRef x) const override {
    Vector total = Vector::Zero(x.size());
    for (Eigen::Index j = 0; j < scenarios_.rows(); ++j) {
      total += model_->gradient(x, scenarios_.row(j).transpose());
    }
    return total / static_cast<double>(scenarios_.rows());
  }

 private:
  std::shared_ptr<const ScenarioModel> model_;
  ScenarioMatrix scenarios_;
};

/// Shared base: tracks E xi and the total variance of the scenario law.
class SharedModel : public ScenarioModel, public std::enable_shared_from_this<SharedModel> {
 public:
  std::shared_ptr<const BatchModel> bind(const ScenarioMatrix& scenarios) const override {
    return std::make_shared<LoopBatch>(shared_from_this(), scenarios);
  }
};

Vector batch_mean(const ScenarioMatrix& s) { return s.colwise().mean().transpose(); }

// ---------------------------------------------------------------------------
// Quadratic tracking: f = 0.5 mu ||x - xi||^2.

class TrackingBatch final : public BatchModel {
 public:
  TrackingBatch(double mu, const ScenarioMatrix& s) : mu_(mu), n_(s.rows()), mean_(batch_mean(s)) {
    spread_ = (s.rowwise() - mean_.transpose()).rowwise().squaredNorm().mean();
  }
  Eigen::Index size() const override { return n_; }
  double value(VectorRef x) const override {
    return 0.5 * mu_ * ((x - mean_).squaredNorm() + spread_);
  }
  Vector gradient(VectorRef x) const override { return mu_ * (x - mean_); }
  std::optional<QuadraticForm> quadratic() const override {
    const auto d = mean_.size();
    return QuadraticForm{mu_ * Eigen::MatrixXd::Identity(d, d), mu_ * mean_};
  }

 private:
  double mu_;
  Eigen::Index n_;
  Vector mean_;
  double spread_ = 0.0;
};

class TrackingModel final : public SharedModel {
 public:
  TrackingModel(double mu, Vector mean, double total_variance)
      : mu_(mu), mean_(std::move(mean)), total_variance_(total_variance) {}

  std::string family() const override { return "quadratic_tracking"; }
  double value(VectorRef x, VectorRef xi) const override {
    return 0.5 * mu_ * (x - xi).squaredNorm();
  }
  Vector gradient(VectorRef x, VectorRef xi) const override { return mu_ * (x - xi); }
  double population_value(VectorRef x) const override {
    return 0.5 * mu_ * ((x - mean_).squaredNorm() + total_variance_);
  }
  Vector population_gradient(VectorRef x) const override { return mu_ * (x - mean_); }
  double excess(VectorRef x, VectorRef ref) const override {
    return 0.5 * mu_ * ((x - mean_).squaredNorm() - (ref - mean_).squaredNorm());
  }
  std::shared_ptr<const BatchModel> bind(const ScenarioMatrix& s) const override {
    return std::make_shared<TrackingBatch>(mu_, s);
  }

 private:
  double mu_;
  Vector mean_;
  double total_variance_;
};

// ---------------------------------------------------------------------------
// Degenerate quadratic: f = 0.5 ||P (x - xi)||^2.

class DegenerateBatch final : public BatchModel {
 public:
  DegenerateBatch(const Eigen::MatrixXd& projector, const ScenarioMatrix& s)
      : projector_(projector), n_(s.rows()) {
    const Vector mean = batch_mean(s);
    projected_mean_ = projector_ * mean;
    const Eigen::MatrixXd centered = (s.rowwise() - mean.transpose()).transpose();
    spread_ = (projector_ * centered).colwise().squaredNorm().mean();
  }
  Eigen::Index size() const override { return n_; }
  double value(VectorRef x) const override {
    return 0.5 * ((projector_ * x - projected_mean_).squaredNorm() + spread_);
  }
  Vector gradient(VectorRef x) const override {
    return projector_.transpose() * (projector_ * x - projected_mean_);
  }
  std::optional<QuadraticForm> quadratic() const override {
    return QuadraticForm{projector_.transpose() * projector_,
                         projector_.transpose() * projected_mean_};
  }

 private:
  const Eigen::MatrixXd& projector_;
  Eigen::Index n_;
  Vector projected_mean_;
  double spread_ = 0.0;
};

class DegenerateModel final : public SharedModel {
 public:
  DegenerateModel(Eigen::MatrixXd projector, Vector mean, Vector variance, FeasibleSet set)
      : projector_(std::move(projector)), mean_(std::move(mean)), set_(std::move(set)) {
    trace_ = (projector_.array().square().rowwise() * variance.transpose().array()).sum();
  }

  std::string family() const override { return "degenerate_quadratic"; }
  double value(VectorRef x, VectorRef xi) const override {
    return 0.5 * (projector_ * (x - xi)).squaredNorm();
  }
  Vector gradient(VectorRef x, VectorRef xi) const override {
    return projector_.transpose() * (projector_ * (x - xi));
  }
  double population_value(VectorRef x) const override {
    return 0.5 * ((projector_ * (x - mean_)).squaredNorm() + trace_);
  }
  Vector population_gradient(VectorRef x) const override {
    return projector_.transpose() * (projector_ * (x - mean_));
  }
  double excess(VectorRef x, VectorRef ref) const override {
    return 0.5 *
           ((projector_ * (x - mean_)).squaredNorm() - (projector_ * (ref - mean_)).squaredNorm());
  }
  std::shared_ptr<const BatchModel> bind(const ScenarioMatrix& s) const override {
    // The batch refers to projector_; holding `self` keeps it alive.
    struct Holder final : BatchModel {
      Holder(std::shared_ptr<const DegenerateModel> m, const ScenarioMatrix& s)
          : self(std::move(m)), batch(self->projector_, s) {}
      Eigen::Index size() const override { return batch.size(); }
      double value(VectorRef x) const override { return batch.value(x); }
      Vector gradient(VectorRef x) const override { return batch.gradient(x); }
      std::optional<QuadraticForm> quadratic() const override { return batch.quadratic(); }
      std::shared_ptr<const DegenerateModel> self;
      DegenerateBatch batch;
    };
    return std::make_shared<Holder>(
        std::static_pointer_cast<const DegenerateModel>(shared_from_this()), s);
  }
  std::optional<Vector> nearest_optimizer(VectorRef anchor) const override {
    Vector candidate = anchor + projector_ * (mean_ - anchor);
    if (set_.contains(candidate, kFeasibilityTol)) return project(set_, candidate);
    return std::nullopt;
  }

  double trace() const { return trace_; }

 private:
  Eigen::MatrixXd projector_;
  Vector mean_;
  FeasibleSet set_;
  double trace_ = 0.0;
};

// ---------------------------------------------------------------------------
// Newsvendor: f = sum_i h (x_i - xi_i)^+ + c (xi_i - x_i)^+.

constexpr double kQuadratureTol = 1e-12;
constexpr double kShortInterval = 1e-2;
constexpr unsigned kMaxQuadratureDepth = 12;

/// Integral of the coordinate CDF over [a, b].
double cdf_integral(const DistSpec& demand, Eigen::Index i, double a, double b) {
  if (a == b) return 0.0;
  if (a > b) return -cdf_integral(demand, i, b, a);
  if (std::holds_alternative<PointMass>(demand.family())) {
    const double loc = std::get<PointMass>(demand.family()).location[i];
    return std::max(0.0, b - std::max(a, loc));
  }
  const double lower = demand.support_lower(i);
  if (b <= lower) return 0.0;
  a = std::max(a, lower);
  auto cdf = [&](double t) { return demand.cdf(i, t); };
  // Relative error control stalls on very short intervals, where one 61-point
  // rule is already exact to rounding.
  const unsigned depth = b - a < kShortInterval ? 0 : kMaxQuadratureDepth;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(cdf, a, b, depth,
                                                                        kQuadratureTol);
}

/// E (x - xi_i)^+ = integral of the CDF over (-inf, x].
double expected_overage(const DistSpec& demand, Eigen::Index i, double x) {
  const double lower = demand.support_lower(i);
  if (std::isfinite(lower)) return cdf_integral(demand, i, lower, x);
  boost::math::quadrature::exp_sinh<double> integrator;
  auto shifted = [&](double u) { return demand.cdf(i, x - u); };
  return integrator.integrate(shifted, 0.0, kInf, kQuadratureTol);
}

class NewsvendorBatch final : public BatchModel {
 public:
  NewsvendorBatch(double h, double c, const ScenarioMatrix& s) : h_(h), c_(c), n_(s.rows()) {
    const auto d = s.cols();
    sorted_.resize(d);
    prefix_.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      auto& col = sorted_[i];
      col.resize(n_);
      for (Eigen::Index j = 0; j < n_; ++j) col[j] = s(j, i);
      std::sort(col.begin(), col.end());
      auto& pre = prefix_[i];
      pre.assign(n_ + 1, 0.0);
      for (Eigen::Index j = 0; j < n_; ++j) pre[j + 1] = pre[j] + col[j];
    }
  }

  Eigen::Index size() const override { return n_; }

  double value(VectorRef x) const override {
    double total = 0.0;
    const double nd = static_cast<double>(n_);
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
      const auto& col = sorted_[i];
      const auto& pre = prefix_[i];
      const double xi = x[static_cast<Eigen::Index>(i)];
      const auto k = static_cast<std::size_t>(
          std::upper_bound(col.begin(), col.end(), xi) - col.begin());
      const double below = static_cast<double>(k) * xi - pre[k];
      const double above = (pre[n_] - pre[k]) - (nd - static_cast<double>(k)) * xi;
      total += h_ * below + c_ * above;
    }
    return total / nd;
  }

  Vector gradient(VectorRef x) const override {
    Vector g(x.size());
    const double nd = static_cast<double>(n_);
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
      const auto& col = sorted_[i];
      const double xi = x[static_cast<Eigen::Index>(i)];
      const auto less = std::lower_bound(col.begin(), col.end(), xi) - col.begin();
      const auto greater = col.end() - std::upper_bound(col.begin(), col.end(), xi);
      g[static_cast<Eigen::Index>(i)] =
          (h_ * static_cast<double>(less) - c_ * static_cast<double>(greater)) / nd;
    }
    return g;
  }

 private:
  double h_;
  double c_;
  Eigen::Index n_;
  std::vector<std::vector<double>> sorted_;
  std::vector<std::vector<double>> prefix_;
};

class NewsvendorModel final : public SharedModel {
 public:
  NewsvendorModel(double h, double c, DistSpec demand)
      : h_(h), c_(c), demand_(std::move(demand)), mean_(demand_.mean()) {}

  std::string family() const override { return "newsvendor"; }
  bool smooth() const override { return false; }
  bool separable() const override { return true; }

  double value(VectorRef x, VectorRef xi) const override {
    const Vector diff = x - xi;
    return h_ * diff.cwiseMax(0.0).sum() + c_ * (-diff).cwiseMax(0.0).sum();
  }
  // Kinks (x_i == xi_i) get the subgradient 0, which lies in [-c, h].
  Vector gradient(VectorRef x, VectorRef xi) const override {
    Vector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      g[i] = x[i] > xi[i] ? h_ : (x[i] < xi[i] ? -c_ : 0.0);
    }
    return g;
  }
  double population_value(VectorRef x) const override {
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      total += (h_ + c_) * expected_overage(demand_, i, x[i]) + c_ * (mean_[i] - x[i]);
    }
    return total;
  }
  Vector population_gradient(VectorRef x) const override {
    Vector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) g[i] = (h_ + c_) * demand_.cdf(i, x[i]) - c_;
    return g;
  }
  double excess(VectorRef x, VectorRef ref) const override {
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      total += (h_ + c_) * cdf_integral(demand_, i, ref[i], x[i]) - c_ * (x[i] - ref[i]);
    }
    return total;
  }
  std::shared_ptr<const BatchModel> bind(const ScenarioMatrix& s) const override {
    return std::make_shared<NewsvendorBatch>(h_, c_, s);
  }

 private:
  double h_;
  double c_;
  DistSpec demand_;
  Vector mean_;
};

// ---------------------------------------------------------------------------
// Quartic: f = 0.5 ||x - xi||^2 + 0.25 ||x||^4.

class QuarticBatch final : public BatchModel {
 public:
  explicit QuarticBatch(const ScenarioMatrix& s) : n_(s.rows()), mean_(batch_mean(s)) {
    spread_ = (s.rowwise() - mean_.transpose()).rowwise().squaredNorm().mean();
  }
  Eigen::Index size() const override { return n_; }
  double value(VectorRef x) const override {
    const double sq = x.squaredNorm();
    return 0.5 * ((x - mean_).squaredNorm() + spread_) + 0.25 * sq * sq;
  }
  Vector gradient(VectorRef x) const override {
    return x - mean_ + x.squaredNorm() * x;
  }

 private:
  Eigen::Index n_;
  Vector mean_;
  double spread_ = 0.0;
};

class QuarticModel final : public SharedModel {
 public:
  QuarticModel(Vector theta, double total_variance)
      : theta_(std::move(theta)), total_variance_(total_variance) {}

  std::string family() const override { return "quartic_nonlipschitz"; }
  double value(VectorRef x, VectorRef xi) const override {
    const double sq = x.squaredNorm();
    return 0.5 * (x - xi).squaredNorm() + 0.25 * sq * sq;
  }
  Vector gradient(VectorRef x, VectorRef xi) const override {
    return x - xi + x.squaredNorm() * x;
  }
  double population_value(VectorRef x) const override {
    const double sq = x.squaredNorm();
    return 0.5 * ((x - theta_).squaredNorm() + total_variance_) + 0.25 * sq * sq;
  }
  Vector population_gradient(VectorRef x) const override {
    return x - theta_ + x.squaredNorm() * x;
  }
  double excess(VectorRef x, VectorRef ref) const override {
    const double sx = x.squaredNorm();
    const double sr = ref.squaredNorm();
    return 0.5 * ((x - theta_).squaredNorm() - (ref - theta_).squaredNorm()) +
           0.25 * (sx - sr) * (sx + sr);
  }
  std::shared_ptr<const BatchModel> bind(const ScenarioMatrix& s) const override {
    return std::make_shared<QuarticBatch>(s);
  }

 private:
  Vector theta_;
  double total_variance_;
};

ProblemInstance blank_instance(const DistSpec& scenarios) {
  return ProblemInstance{{}, 0, nullptr, scenarios, {}, {}, 0.0, false, {}, {}};
}

constexpr std::uint64_t kSpotCheckSeed = 0x5eedc0ffeeULL;
constexpr Eigen::Index kSpotCheckDraws = 4000;
constexpr double kSpotCheckTol = 0.5;

void run_construction_check(const ProblemInstance& instance) {
  const auto checks =
      spot_check_constants(instance, RngStream(kSpotCheckSeed), kSpotCheckDraws, kSpotCheckTol);
  for (const auto& c : checks) {
    if (!c.ok) {
      throw ContractError(fmt::format("{}: declared {} = {} but Monte Carlo gives {}",
                                      instance.name, c.name, c.declared, c.empirical));
    }
  }
}

}  // namespace

std::shared_ptr<const BatchModel> ScenarioModel::bind(const ScenarioMatrix&) const {
  throw ContractError(fmt::format("family {} does not provide a batch model", family()));
}

Vector ProblemInstance::optimizer_near(VectorRef anchor) const {
  if (auto nearest = model->nearest_optimizer(anchor)) return *nearest;
  return optimizer;
}

ProblemInstance make_quadratic_tracking(Eigen::Index d, double mu, const DistSpec& noise,
                                        const FeasibleSet& set) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw ParameterError(fmt::format("tracking modulus mu must be positive, got {}", mu));
  }
  require_dimension(noise, d, "tracking noise");
  set.validate(d);

  ProblemInstance inst = blank_instance(noise);
  inst.name = "quadratic_tracking";
  inst.dimension = d;
  const double total_variance = noise.variance().sum();
  inst.model = std::make_shared<TrackingModel>(mu, noise.mean(), total_variance);
  inst.set = set;
  inst.optimizer = project(set, noise.mean());
  inst.optimal_value = inst.model->population_value(inst.optimizer);
  inst.unique_optimizer = true;
  inst.constants.mu = mu;
  inst.constants.smoothness = mu;
  inst.constants.lipschitz = 0.0;
  inst.constants.sigma_p = mu * std::sqrt(total_variance);
  inst.constants.p = 2.0;
  inst.constants.q = 2.0;
  inst.tags = {Assumption::A1, Assumption::A2, Assumption::A3, Assumption::A4};
  run_construction_check(inst);
  return inst;
}

ProblemInstance make_degenerate_quadratic(const Eigen::MatrixXd& basis, const DistSpec& noise,
                                          const FeasibleSet& set) {
  const Eigen::Index d = basis.rows();
  const Eigen::Index r = basis.cols();
  if (r < 1 || r >= d) {
    throw ParameterError(fmt::format("degenerate quadratic needs 1 <= rank < d, got rank {} "
                                     "with d = {}",
                                     r, d));
  }
  const Eigen::MatrixXd gram = basis.transpose() * basis;
  if ((gram - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-10) {
    throw ParameterError("degenerate quadratic basis must have orthonormal columns");
  }
  require_dimension(noise, d, "degenerate-quadratic noise");
  set.validate(d);
  if (!set.bounded()) {
    throw ParameterError("degenerate quadratic requires a bounded feasible set");
  }
  const Vector mean = noise.mean();
  if (!set.contains(mean, kFeasibilityTol)) {
    throw ParameterError("degenerate quadratic requires E xi inside the feasible set");
  }

  ProblemInstance inst = blank_instance(noise);
  inst.name = "degenerate_quadratic";
  inst.dimension = d;
  const Eigen::MatrixXd projector = basis * basis.transpose();
  auto model = std::make_shared<DegenerateModel>(projector, mean, noise.variance(), set);
  inst.model = model;
  inst.set = set;
  inst.optimizer = project(set, mean);
  inst.optimal_value = inst.model->population_value(inst.optimizer);
  inst.unique_optimizer = false;
  inst.constants.smoothness = 1.0;
  inst.constants.lipschitz = 0.0;
  inst.constants.sigma_p = std::sqrt(model->trace());
  inst.constants.p = 2.0;
  inst.constants.q = 2.0;
  inst.tags = {Assumption::A1, Assumption::A2, Assumption::A4};
  run_construction_check(inst);
  return inst;
}

ProblemInstance make_degenerate_quadratic(Eigen::Index d, Eigen::Index rank, const DistSpec& noise,
                                          const FeasibleSet& set, std::uint64_t basis_seed) {
  if (rank < 1 || rank >= d) {
    throw ParameterError(
        fmt::format("degenerate quadratic needs 1 <= rank < d, got rank {} with d = {}", rank, d));
  }
  const ScenarioMatrix draws = sample(gaussian(rank, 0.0, 1.0), RngStream(basis_seed), d);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr{Eigen::MatrixXd(draws)};
  const Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(d, rank);
  return make_degenerate_quadratic(basis, noise, set);
}

ProblemInstance make_newsvendor(Eigen::Index d, double holding, double backlog,
                                const DistSpec& demand, const FeasibleSet& set) {
  if (!(holding > 0.0) || !(backlog > 0.0) || !std::isfinite(holding) ||
      !std::isfinite(backlog)) {
    throw ParameterError(fmt::format(
        "newsvendor costs must be positive, got holding {} and backlog {}", holding, backlog));
  }
  require_dimension(demand, d, "newsvendor demand");
  set.validate(d);

  ProblemInstance inst = blank_instance(demand);
  inst.name = "newsvendor";
  inst.dimension = d;
  inst.model = std::make_shared<NewsvendorModel>(holding, backlog, demand);
  inst.set = set;

  // Separable, so the box-constrained optimizer clamps each critical quantile.
  const double level = backlog / (holding + backlog);
  Vector quantiles(d);
  for (Eigen::Index i = 0; i < d; ++i) quantiles[i] = demand.quantile(i, level);
  if (set.kind != FeasibleSet::Kind::all_space && set.kind != FeasibleSet::Kind::box) {
    throw ParameterError("newsvendor supports all_space or box feasible sets");
  }
  inst.optimizer = project(set, quantiles);
  inst.optimal_value = inst.model->population_value(inst.optimizer);
  inst.unique_optimizer = false;

  // |f(x, xi) - f(y, xi)| <= max(h, c) ||x - y||_1 <= max(h, c) sqrt(d) ||x - y||_2.
  const double lipschitz = std::max(holding, backlog) * std::sqrt(static_cast<double>(d));
  inst.constants.smoothness = 0.0;
  inst.constants.lipschitz = lipschitz;
  inst.constants.psi_p = lipschitz;
  inst.constants.q = 2.0;
  inst.tags = {Assumption::A4, Assumption::A5, Assumption::A6, Assumption::A7};
  return inst;
}

double quartic_scale(double theta_norm_sq) {
  if (theta_norm_sq < 0.0 || !std::isfinite(theta_norm_sq)) {
    throw ParameterError("squared norm must be finite and nonnegative");
  }
  if (theta_norm_sq == 0.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid * (1.0 + mid * mid * theta_norm_sq) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ProblemInstance make_quartic_nonlipschitz(const Vector& theta, const DistSpec& noise,
                                          const FeasibleSet& set) {
  const Eigen::Index d = theta.size();
  require_dimension(noise, d, "quartic noise");
  if (set.kind != FeasibleSet::Kind::all_space) {
    throw ParameterError("quartic family is defined on all of R^d; got a constrained set");
  }
  if (!theta.allFinite()) throw ParameterError("theta has non-finite entries");
  if (noise.mean().cwiseAbs().maxCoeff() > 1e-12) {
    throw ParameterError("quartic family expects mean-zero additive noise");
  }

  ProblemInstance inst = blank_instance(noise.shifted(theta));
  inst.name = "quartic_nonlipschitz";
  inst.dimension = d;
  const double total_variance = noise.variance().sum();
  inst.model = std::make_shared<QuarticModel>(theta, total_variance);
  inst.set = set;
  inst.optimizer = quartic_scale(theta.squaredNorm()) * theta;
  inst.optimal_value = inst.model->population_value(inst.optimizer);
  inst.unique_optimizer = true;
  inst.constants.mu = 1.0;
  inst.constants.lipschitz = 0.0;
  // grad f(x, xi) - grad F(x) = -(xi - theta), independent of x.
  inst.constants.sigma_p = std::sqrt(total_variance);
  inst.constants.psi_p = std::sqrt(total_variance);
  inst.constants.p = 2.0;
  inst.constants.q = 2.0;
  inst.tags = {Assumption::A3, Assumption::A8, Assumption::A9};
  run_construction_check(inst);
  return inst;
}

double population_gap(const ProblemInstance& instance, VectorRef x) {
  if (x.size() != instance.dimension) {
    throw ParameterError(
        fmt::format("point has {} entries, expected {}", x.size(), instance.dimension));
  }
  if (!instance.set.contains(x, kFeasibilityTol)) {
    throw DomainError(fmt::format("point is outside the {} feasible set", instance.set.name()));
  }
  const Vector feasible = project(instance.set, x);
  const double gap = instance.model->excess(feasible, instance.optimizer);
  if (gap < -kFeasibilityTol) {
    throw ContractError(
        fmt::format("negative gap {} for {}: declared optimizer is not optimal", gap,
                    instance.name));
  }
  return std::max(gap, 0.0);
}

double distance_to_optimum(const ProblemInstance& instance, VectorRef x, double q) {
  if (!instance.unique_optimizer) {
    throw ContractError(fmt::format("{} has no unique optimizer", instance.name));
  }
  if (x.size() != instance.dimension) {
    throw ParameterError(
        fmt::format("point has {} entries, expected {}", x.size(), instance.dimension));
  }
  const double n = qnorm(x - instance.optimizer, q);
  return n * n;
}

std::vector<ConstantCheck> spot_check_constants(const ProblemInstance& instance,
                                                const RngStream& stream, Eigen::Index draws,
                                                double rel_tol) {
  std::vector<ConstantCheck> out;
  if (!instance.constants.sigma_p) return out;
  const double p = instance.constants.p.value_or(2.0);
  const ScenarioMatrix xi = sample(instance.scenarios, stream, draws);
  const Vector& x = instance.optimizer;
  const Vector mean_grad = instance.population_gradient(x);
  double total = 0.0;
  for (Eigen::Index j = 0; j < draws; ++j) {
    const double n = qnorm(instance.scenario_gradient(x, xi.row(j).transpose()) - mean_grad, p);
    total += n * n;
  }
  const double empirical = total / static_cast<double>(draws);
  const double declared = *instance.constants.sigma_p * *instance.constants.sigma_p;
  const bool ok = std::abs(empirical - declared) <= rel_tol * declared + 1e-12;
  out.push_back({"sigma_p^2", declared, empirical, ok});
  return out;
}

}  // namespace spsaa
