#pragma once

#include <bitset>
#include <memory>
#include <optional>
#include <string>

#include "spsaa/distributions.hpp"
#include "spsaa/geometry.hpp"
#include "spsaa/projection.hpp"

namespace spsaa {

/// Assumption labels A1..A9 a family is declared to satisfy.
enum class Assumption { A1 = 1, A2, A3, A4, A5, A6, A7, A8, A9 };

class AssumptionSet {
 public:
  AssumptionSet() = default;
  AssumptionSet(std::initializer_list<Assumption> tags) {
    for (auto t : tags) insert(t);
  }

  void insert(Assumption a) { bits_.set(index(a)); }
  bool has(Assumption a) const { return bits_.test(index(a)); }
  /// "A1,A2,..."
  std::string to_string() const;

  bool operator==(const AssumptionSet&) const = default;

 private:
  static std::size_t index(Assumption a) { return static_cast<std::size_t>(a) - 1; }
  std::bitset<9> bits_;
};

/// Population constants; absent entries are not declared by the family.
struct ProblemConstants {
  std::optional<double> mu;          ///< strong convexity modulus
  std::optional<double> smoothness;  ///< Lipschitz constant of grad F1
  std::optional<double> lipschitz;   ///< bound on ||grad F2||
  std::optional<double> sigma_p;     ///< gradient-noise bound, sqrt of E||grad f - grad F||_p^2
  std::optional<double> psi_p;       ///< L^p bound on the gradient noise at x*
  std::optional<double> p;           ///< moment / noise-norm order
  std::optional<double> q;           ///< geometry of the strong convexity / smoothness
};

/// grad F_N(x) = hessian * x - linear for quadratic batch objectives.
struct QuadraticForm {
  Eigen::MatrixXd hessian;
  Vector linear;
};

/// Empirical objective F_N(x) = N^{-1} sum_j f(x, xi_j) over a fixed batch.
class BatchModel {
 public:
  virtual ~BatchModel() = default;

  virtual Eigen::Index size() const = 0;
  virtual double value(VectorRef x) const = 0;
  /// A (sub)gradient of F_N at x.
  virtual Vector gradient(VectorRef x) const = 0;
  virtual std::optional<QuadraticForm> quadratic() const { return std::nullopt; }
};

/// Scenario oracle f(x, xi) together with its population counterpart F.
class ScenarioModel {
 public:
  virtual ~ScenarioModel() = default;

  virtual std::string family() const = 0;
  virtual double value(VectorRef x, VectorRef xi) const = 0;
  virtual Vector gradient(VectorRef x, VectorRef xi) const = 0;
  virtual double population_value(VectorRef x) const = 0;
  virtual Vector population_gradient(VectorRef x) const = 0;
  /// F(x) - F(reference), computed without cancellation where possible.
  virtual double excess(VectorRef x, VectorRef reference) const {
    return population_value(x) - population_value(reference);
  }
  /// Batch objective built from sufficient statistics of the scenarios.
  virtual std::shared_ptr<const BatchModel> bind(const ScenarioMatrix& scenarios) const;

  virtual bool smooth() const { return true; }
  /// f(x, xi) = sum_i f_i(x_i, xi), so gradient component i depends on x_i only.
  virtual bool separable() const { return false; }
  /// An optimizer of F closest to `anchor`, when the optimum is not unique.
  virtual std::optional<Vector> nearest_optimizer(VectorRef /*anchor*/) const {
    return std::nullopt;
  }

 protected:
  ScenarioModel() = default;
};

/// One synthetic stochastic program min_{x in X} E f(x, xi) with known optimum.
struct ProblemInstance {
  std::string name;
  Eigen::Index dimension = 0;
  std::shared_ptr<const ScenarioModel> model;
  DistSpec scenarios;
  FeasibleSet set;
  Vector optimizer;
  double optimal_value = 0.0;
  bool unique_optimizer = false;
  ProblemConstants constants;
  AssumptionSet tags;

  double scenario_value(VectorRef x, VectorRef xi) const { return model->value(x, xi); }
  Vector scenario_gradient(VectorRef x, VectorRef xi) const { return model->gradient(x, xi); }
  double population_objective(VectorRef x) const { return model->population_value(x); }
  Vector population_gradient(VectorRef x) const { return model->population_gradient(x); }
  /// Optimizer used by the oracle R* rule: the one nearest the anchor when the
  /// family has a continuum of optima.
  Vector optimizer_near(VectorRef anchor) const;
  double geometry_q() const { return constants.q.value_or(2.0); }
};

/// f(x, xi) = 0.5 * mu * ||x - xi||_2^2.
ProblemInstance make_quadratic_tracking(Eigen::Index d, double mu, const DistSpec& noise,
                                        const FeasibleSet& set = FeasibleSet::all_space());

/// f(x, xi) = 0.5 * ||P x - P xi||_2^2 with P = B B^T, B a d x r orthonormal
/// basis drawn from `basis_seed`. Requires E xi in X.
ProblemInstance make_degenerate_quadratic(Eigen::Index d, Eigen::Index rank, const DistSpec& noise,
                                          const FeasibleSet& set, std::uint64_t basis_seed);

/// Same family with a caller-supplied orthonormal basis (columns).
ProblemInstance make_degenerate_quadratic(const Eigen::MatrixXd& basis, const DistSpec& noise,
                                          const FeasibleSet& set);

/// f(x, xi) = sum_i h (x_i - xi_i)^+ + c (xi_i - x_i)^+.
ProblemInstance make_newsvendor(Eigen::Index d, double holding, double backlog,
                                const DistSpec& demand,
                                const FeasibleSet& set = FeasibleSet::all_space());

/// f(x, xi) = 0.5 ||x - xi||^2 + 0.25 ||x||^4, xi = theta + noise. The noise
/// must have mean zero and the set must be all of R^d.
ProblemInstance make_quartic_nonlipschitz(const Vector& theta, const DistSpec& noise,
                                          const FeasibleSet& set = FeasibleSet::all_space());

/// Root of t (1 + t^2 s) = 1 on (0, 1] for s = ||theta||^2.
double quartic_scale(double theta_norm_sq);

/// F(x) - F(x*). Points within 1e-9 of X are projected first; others raise
/// DomainError. Results in [-1e-9, 0) are clamped to 0.
double population_gap(const ProblemInstance& instance, VectorRef x);

/// ||x - x*||_q^2; requires a unique optimizer.
double distance_to_optimum(const ProblemInstance& instance, VectorRef x, double q);

struct ConstantCheck {
  std::string name;
  double declared;
  double empirical;
  bool ok;
};

/// Monte Carlo spot check of the declared sigma_p against sampled gradient
/// noise at the optimizer.
std::vector<ConstantCheck> spot_check_constants(const ProblemInstance& instance,
                                                const RngStream& stream, Eigen::Index draws,
                                                double rel_tol);

}  // namespace spsaa
