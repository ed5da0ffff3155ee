#include "spsaa/harness/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>

#include "spsaa/errors.hpp"
#include "spsaa/harness/pool.hpp"
#include "spsaa/stability.hpp"

namespace spsaa::harness {
namespace {

constexpr std::uint64_t kBatchTag = 1;
constexpr std::uint64_t kProbeTag = 2;

/// Everything a task needs, built once per experiment.
struct Context {
  const ExperimentPlan& plan;
  ProblemInstance instance;
  Vector anchor;
  std::optional<SaaConfig> saa;
  SmdConfig smd;
};

Context make_context(const ExperimentPlan& plan) {
  Context ctx{plan, build_instance(plan.problem), {}, std::nullopt, {}};
  ctx.anchor = Vector::Constant(ctx.instance.dimension, plan.method.anchor);
  const auto& m = plan.method;
  if (m.kind == MethodKind::saa && m.regularized) {
    ctx.saa = hyperparameters(plan.epsilon, ctx.instance, ctx.anchor, m.r_star, m.q_prime);
  }
  ctx.smd.q_prime = m.q_prime.value_or(2.0);
  ctx.smd.step_rule = m.step_rule;
  ctx.smd.step_scale = m.step_scale;
  ctx.smd.averaging = m.averaging;
  ctx.smd.start = ctx.anchor;
  if (plan.metric.kind == MetricKind::distance_sq && !ctx.instance.unique_optimizer) {
    throw ParameterError(fmt::format("{} has no unique optimizer for distance_sq",
                                     ctx.instance.name));
  }
  return ctx;
}

double evaluate(const Context& ctx, const Vector& x) {
  if (ctx.plan.metric.kind == MetricKind::gap) return population_gap(ctx.instance, x);
  return distance_to_optimum(ctx.instance, x, ctx.plan.metric.q);
}

/// Solves one replication; returns (metric, inner gap bound).
std::pair<double, double> solve_task(const Context& ctx, Eigen::Index n, const RngStream& stream) {
  if (ctx.plan.method.kind == MethodKind::smd) {
    return {evaluate(ctx, smd_solve(ctx.instance, stream, n, ctx.smd)), 0.0};
  }
  const SampleBatch batch = draw_batch(ctx.instance, stream, n);
  SolveOptions opt;
  opt.tol = ctx.plan.solver_tol();
  opt.budget = ctx.plan.solver.budget;
  opt.start = ctx.anchor;
  const auto res = minimize(empirical_objective(ctx.instance, batch, ctx.saa), ctx.instance.set, opt);
  return {evaluate(ctx, res.point), res.inner_gap_bound};
}

std::pair<double, double> stability_task(const Context& ctx, Eigen::Index n,
                                         const RngStream& stream) {
  const SampleBatch batch = draw_batch(ctx.instance, stream.child(kBatchTag), n);
  const Eigen::Index m = std::min<Eigen::Index>(n, ctx.plan.stability.probes);
  const double tol = ctx.plan.stability_tol();
  const auto est =
      average_ro_stability(ctx.instance, batch, ctx.saa, tol, m, stream.child(kProbeTag));
  return {est.value, tol};
}

template <class Task>
std::vector<Row> run_tasks(const Context& ctx, const RunOptions& options, Task&& task) {
  const auto& plan = ctx.plan;
  const std::size_t reps = static_cast<std::size_t>(plan.replications);
  std::vector<Row> rows(plan.n_grid.size() * reps);
  parallel_for(rows.size(), std::max(1u, options.workers), [&](std::size_t slot) {
    const std::size_t ni = slot / reps;
    const int rep = static_cast<int>(slot % reps);
    const RngStream stream = task_stream(plan, ni, rep);
    Row& row = rows[slot];
    row.n = plan.n_grid[ni];
    row.replication = rep;
    row.seed_path = stream.address();
    const auto started = std::chrono::steady_clock::now();
    try {
      std::tie(row.metric, row.inner_gap_bound) = task(ctx, row.n, stream);
    } catch (const ConvergenceError& e) {
      row.failed = true;
      row.metric = std::nan("");
      row.inner_gap_bound = e.certificate();
      row.error = e.what();
    }
    if (options.timing) {
      row.wall_time =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }
  });

  const auto failed = static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const Row& r) { return r.failed; }));
  if (static_cast<double>(failed) > kFailureBudget * static_cast<double>(rows.size())) {
    const auto first = std::find_if(rows.begin(), rows.end(), [](const Row& r) { return r.failed; });
    throw Error(fmt::format("{}: {} of {} solves failed (budget {:.0f}%); first: {}", plan.id,
                            failed, rows.size(), 100.0 * kFailureBudget, first->error));
  }
  return rows;
}

void aggregate(Report& report) {
  const auto& plan = report.plan;
  const std::size_t reps = static_cast<std::size_t>(plan.replications);
  for (std::size_t ni = 0; ni < plan.n_grid.size(); ++ni) {
    GridPoint gp;
    gp.n = plan.n_grid[ni];
    std::vector<double> values;
    for (std::size_t r = 0; r < reps; ++r) {
      const Row& row = report.rows[ni * reps + r];
      if (row.failed) {
        ++gp.failures;
      } else {
        values.push_back(row.metric);
      }
    }
    gp.summary = summarize(std::move(values));
    report.grid.push_back(std::move(gp));
  }
}

void fit_grid(Report& report, double floor) {
  std::vector<std::pair<double, double>> points;
  bool all_tiny = true;
  bool any_nonpositive = false;
  for (const auto& gp : report.grid) {
    if (gp.summary.count == 0) continue;
    points.emplace_back(static_cast<double>(gp.n), gp.summary.mean);
    all_tiny = all_tiny && gp.summary.mean <= floor;
    any_nonpositive = any_nonpositive || gp.summary.mean <= 0.0;
  }
  report.degenerate = all_tiny || any_nonpositive;
  if (!report.degenerate && points.size() >= 3) report.fit = fit_loglog_slope(points);
}

void slope_checks(Report& report) {
  const auto& acc = report.plan.acceptance;
  if (acc.slope_min || acc.slope_max) {
    Check c{"slope", false, "no fit (degenerate or too few grid points)"};
    if (report.fit) {
      const double lo = acc.slope_min.value_or(-kInf);
      const double hi = acc.slope_max.value_or(kInf);
      c.passed = report.fit->slope >= lo && report.fit->slope <= hi;
      c.detail = fmt::format("slope {:.4f} in [{}, {}]", report.fit->slope, lo, hi);
    }
    report.checks.push_back(std::move(c));
  }
  if (acc.min_r2) {
    Check c{"r_squared", false, "no fit (degenerate or too few grid points)"};
    if (report.fit) {
      c.passed = report.fit->r_squared >= *acc.min_r2;
      c.detail = fmt::format("r^2 {:.4f} >= {}", report.fit->r_squared, *acc.min_r2);
    }
    report.checks.push_back(std::move(c));
  }
}

Report start_report(ExperimentKind kind, const ExperimentPlan& plan) {
  validate_plan(plan, kind);
  Report report;
  report.kind = kind;
  report.plan = plan;
  return report;
}

}  // namespace

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

RngStream task_stream(const ExperimentPlan& plan, std::size_t n_index, int replication) {
  return RngStream(plan.master_seed,
                   {static_cast<std::uint64_t>(n_index), static_cast<std::uint64_t>(replication)});
}

Report run_rate_experiment(const ExperimentPlan& plan, const RunOptions& options) {
  Report report = start_report(ExperimentKind::rate, plan);
  const Context ctx = make_context(plan);
  report.rows = run_tasks(ctx, options, solve_task);
  aggregate(report);
  fit_grid(report, plan.solver_tol());
  slope_checks(report);
  return report;
}

Report run_tail_experiment(const ExperimentPlan& plan, const RunOptions& options) {
  Report report = start_report(ExperimentKind::tail, plan);
  const Context ctx = make_context(plan);
  report.rows = run_tasks(ctx, options, solve_task);
  aggregate(report);

  const double threshold = plan.tail_threshold();
  const std::size_t reps = static_cast<std::size_t>(plan.replications);
  for (std::size_t ni = 0; ni < report.grid.size(); ++ni) {
    auto& gp = report.grid[ni];
    for (std::size_t r = 0; r < reps; ++r) {
      const Row& row = report.rows[ni * reps + r];
      if (!row.failed && row.metric > threshold) ++gp.exceedances;
    }
    gp.exceedance_ci = clopper_pearson(gp.exceedances, gp.summary.count);
  }
  std::vector<double> betas = plan.tail.beta_grid;
  std::sort(betas.begin(), betas.end(), std::greater<>());
  for (double beta : betas) {
    TailThreshold t{beta, std::nullopt};
    for (const auto& gp : report.grid) {
      if (gp.exceedance_ci.hi <= beta) {
        t.n_star = gp.n;
        break;
      }
    }
    report.thresholds.push_back(t);
  }

  if (plan.acceptance.monotone) {
    Check c{"monotone", true, "no significant increase between consecutive N"};
    for (std::size_t i = 1; i < report.grid.size(); ++i) {
      const auto& prev = report.grid[i - 1];
      const auto& cur = report.grid[i];
      const double pv = fisher_greater_pvalue(cur.exceedances, cur.summary.count,
                                              prev.exceedances, prev.summary.count);
      if (pv < plan.tail.significance) {
        c.passed = false;
        c.detail = fmt::format("exceedance rises from {}/{} at N={} to {}/{} at N={} (p = {:.4g})",
                               prev.exceedances, prev.summary.count, prev.n, cur.exceedances,
                               cur.summary.count, cur.n, pv);
        break;
      }
    }
    report.checks.push_back(std::move(c));
  }
  return report;
}

Report run_stability_experiment(const ExperimentPlan& plan, const RunOptions& options) {
  Report report = start_report(ExperimentKind::stability, plan);
  const Context ctx = make_context(plan);
  report.rows = run_tasks(ctx, options, stability_task);
  aggregate(report);

  const auto& c = ctx.instance.constants;
  const double lambda_mod = ctx.saa ? ctx.saa->lambda0 * (ctx.saa->q_prime - 1.0) : 0.0;
  const double mu = c.mu.value_or(0.0) + lambda_mod;
  for (auto& gp : report.grid) {
    gp.bound_rhs = stability_bound(c.sigma_p.value_or(0.0), c.lipschitz.value_or(0.0), mu, gp.n);
  }
  fit_grid(report, 0.0);
  slope_checks(report);
  if (plan.acceptance.bound_slack) {
    const double slack = *plan.acceptance.bound_slack;
    Check check{"bound", true, fmt::format("mean <= bound + {} stderr at every N", slack)};
    for (const auto& gp : report.grid) {
      if (gp.summary.mean > gp.bound_rhs + slack * gp.summary.std_error) {
        check.passed = false;
        check.detail = fmt::format("N={}: mean {:.4g} exceeds bound {:.4g}", gp.n,
                                   gp.summary.mean, gp.bound_rhs);
        break;
      }
    }
    report.checks.push_back(std::move(check));
  }
  return report;
}

Report run_experiment(ExperimentKind kind, const ExperimentPlan& plan, const RunOptions& options) {
  switch (kind) {
    case ExperimentKind::rate: return run_rate_experiment(plan, options);
    case ExperimentKind::tail: return run_tail_experiment(plan, options);
    case ExperimentKind::stability: return run_stability_experiment(plan, options);
  }
  throw ParameterError("unknown experiment kind");
}

}  // namespace spsaa::harness
