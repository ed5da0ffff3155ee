#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "spsaa/problems.hpp"
#include "spsaa/saa.hpp"
#include "spsaa/smd.hpp"
#include "spsaa/solver.hpp"

namespace spsaa::harness {

struct NoiseSpec {
  std::string family = "gaussian";  ///< gaussian, exponential, pareto, student_t, point_mass
  double mean = 0.0;                ///< added to every coordinate
  double std = 1.0;
  double rate = 1.0;
  double tail_index = 4.0;
  double scale = 1.0;
  double dof = 5.0;
  bool centered = true;  ///< pareto only
};

struct SetSpec {
  std::string kind = "all_space";  ///< all_space, box, ball, simplex
  double lo = 0.0;
  double hi = 1.0;
  double radius = 1.0;  ///< ball centered at the origin
};

struct ProblemSpec {
  std::string family;  ///< quadratic_tracking, degenerate_quadratic, newsvendor, quartic_nonlipschitz
  Eigen::Index dimension = 1;
  double mu = 1.0;
  Eigen::Index rank = 1;
  std::uint64_t basis_seed = 0;
  double holding = 1.0;
  double backlog = 1.0;
  double base_demand = 0.0;
  double theta_norm = 1.0;  ///< theta = theta_norm / sqrt(d) * ones
  NoiseSpec noise;
  SetSpec set;
};

enum class MethodKind { saa, smd };

struct MethodSpec {
  MethodKind kind = MethodKind::saa;
  bool regularized = false;
  RStarRule r_star;
  std::optional<double> q_prime;
  double anchor = 0.0;  ///< every coordinate of x0
  StepRule step_rule = StepRule::decaying;
  double step_scale = 1.0;
  bool averaging = true;
};

enum class MetricKind { gap, distance_sq };

struct MetricSpec {
  MetricKind kind = MetricKind::gap;
  double q = 2.0;
};

struct SolverSpec {
  std::optional<double> tol;  ///< defaults to epsilon / 100
  long budget = kDefaultBudget;
};

struct TailSpec {
  std::vector<double> beta_grid;
  std::optional<double> threshold;  ///< defaults to epsilon
  double significance = 0.05;
};

struct StabilitySpec {
  Eigen::Index probes = 32;
  std::optional<double> solver_tol;
};

/// Thresholds the run is judged against; absent entries are not checked.
struct AcceptanceSpec {
  std::optional<double> slope_min;
  std::optional<double> slope_max;
  std::optional<double> min_r2;
  std::optional<double> bound_slack;  ///< stability: mean <= bound + slack * stderr
  bool monotone = false;              ///< tail: no significant increase in N
};

struct ExperimentPlan {
  std::string id;
  ProblemSpec problem;
  MethodSpec method;
  std::vector<Eigen::Index> n_grid{32, 64, 128, 256, 512, 1024, 2048, 4096};
  int replications = 200;
  std::uint64_t master_seed = 0;
  double epsilon = 0.1;
  MetricSpec metric;
  SolverSpec solver;
  TailSpec tail;
  StabilitySpec stability;
  AcceptanceSpec acceptance;

  double solver_tol() const { return solver.tol.value_or(epsilon / 100.0); }
  double tail_threshold() const { return tail.threshold.value_or(epsilon); }
  double stability_tol() const { return stability.solver_tol.value_or(solver_tol()); }
};

enum class ExperimentKind { rate, tail, stability };

/// Parses a plan; unknown keys anywhere are errors.
ExperimentPlan parse_plan(const nlohmann::json& doc);
ExperimentPlan load_plan(const std::string& path);
/// Normalized echo with every default filled in.
nlohmann::ordered_json plan_to_json(const ExperimentPlan& plan);

void validate_plan(const ExperimentPlan& plan, ExperimentKind kind);

DistSpec build_noise(const NoiseSpec& spec, Eigen::Index d);
ProblemInstance build_instance(const ProblemSpec& spec);
FeasibleSet build_set(const SetSpec& spec, Eigen::Index d);

std::string to_string(ExperimentKind kind);
std::string to_string(MethodKind kind);

}  // namespace spsaa::harness
