#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spsaa/harness/plan.hpp"
#include "spsaa/harness/stats.hpp"

namespace spsaa::harness {

/// One (N, replication) outcome.
struct Row {
  Eigen::Index n = 0;
  int replication = 0;
  std::string seed_path;
  double metric = 0.0;
  double inner_gap_bound = 0.0;
  double wall_time = 0.0;
  bool failed = false;
  std::string error;
};

struct GridPoint {
  Eigen::Index n = 0;
  Summary summary;  ///< over successful rows
  std::size_t failures = 0;
  // tail experiments
  std::size_t exceedances = 0;
  Interval exceedance_ci;
  // stability experiments
  double bound_rhs = 0.0;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct TailThreshold {
  double beta = 0.0;
  /// Smallest grid N whose upper confidence bound is <= beta.
  std::optional<Eigen::Index> n_star;
};

struct Report {
  ExperimentKind kind = ExperimentKind::rate;
  ExperimentPlan plan;
  std::vector<Row> rows;
  std::vector<GridPoint> grid;
  std::optional<LogLogFit> fit;
  /// Every mean is at or below the solver tolerance, or some mean is zero.
  bool degenerate = false;
  std::vector<TailThreshold> thresholds;
  std::vector<Check> checks;

  bool passed() const;
};

struct RunOptions {
  unsigned workers = 1;
  /// Record wall-clock times in rows; off keeps output byte-stable.
  bool timing = false;
};

/// Stream for task (N index, replication): (master_seed, [n_index, rep]).
RngStream task_stream(const ExperimentPlan& plan, std::size_t n_index, int replication);

Report run_rate_experiment(const ExperimentPlan& plan, const RunOptions& options = {});
Report run_tail_experiment(const ExperimentPlan& plan, const RunOptions& options = {});
Report run_stability_experiment(const ExperimentPlan& plan, const RunOptions& options = {});
Report run_experiment(ExperimentKind kind, const ExperimentPlan& plan,
                      const RunOptions& options = {});

/// Fraction of failed rows tolerated before an experiment is declared failed.
inline constexpr double kFailureBudget = 0.01;

}  // namespace spsaa::harness
