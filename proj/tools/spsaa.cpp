// Command-line front end for the experiment harness.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <iostream>
#include <optional>

#include "spsaa/errors.hpp"
#include "spsaa/harness/emit.hpp"
#include "spsaa/harness/experiments.hpp"
#include "spsaa/harness/pool.hpp"
#include "spsaa/harness/selftest.hpp"

namespace h = spsaa::harness;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitAcceptance = 2;

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  unsigned workers = h::default_workers();
  std::string format = "both";
  bool timing = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Experiment plan (JSON)")->required();
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--seed", c.seed, "Override master_seed");
  cmd->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--format", c.format, "csv, json or both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  cmd->add_flag("--timing", c.timing, "Record wall-clock times (output is no longer byte-stable)");
}

int run(h::ExperimentKind kind, const Common& c) {
  h::ExperimentPlan plan = h::load_plan(c.config);
  if (c.seed) plan.master_seed = *c.seed;
  const h::Report report = h::run_experiment(kind, plan, {c.workers, c.timing});
  for (const auto& path : h::emit(report, c.out, h::parse_format(c.format))) {
    fmt::print("wrote {}\n", path);
  }
  if (report.fit) {
    fmt::print("slope {:.4f}  intercept {:.4f}  r^2 {:.4f}\n", report.fit->slope,
               report.fit->intercept, report.fit->r_squared);
  } else if (report.degenerate) {
    fmt::print("fit skipped: degenerate means\n");
  }
  for (const auto& t : report.thresholds) {
    fmt::print("beta {:<6g} N* {}\n", t.beta, t.n_star ? fmt::format("{}", *t.n_star) : "none");
  }
  for (const auto& check : report.checks) {
    fmt::print("[{}] {}: {}\n", check.passed ? "PASS" : "FAIL", check.name, check.detail);
  }
  return report.passed() ? kExitOk : kExitAcceptance;
}

int selftest(std::uint64_t seed) {
  bool ok = true;
  for (const auto& s : h::run_selftest(seed)) {
    fmt::print("[{}] {} ({} cases", s.passed() ? "PASS" : "FAIL", s.name, s.cases);
    if (!s.passed()) fmt::print(", {} failures, worst {:.3e}: {}", s.failures, s.worst, s.first_failure);
    fmt::print(")\n");
    ok = ok && s.passed();
  }
  return ok ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo experiments for sample average approximation"};
  app.require_subcommand(1);

  Common rate_opts, tail_opts, stab_opts;
  auto* rate = app.add_subcommand("rate", "Gap or distance versus N with a log-log slope fit");
  add_common(rate, rate_opts);
  auto* tail = app.add_subcommand("tail", "Exceedance probabilities P[gap > threshold] versus N");
  add_common(tail, tail_opts);
  auto* stab = app.add_subcommand("stability", "Average replace-one stability versus N");
  add_common(stab, stab_opts);
  std::uint64_t selftest_seed = 1;
  auto* self = app.add_subcommand("selftest", "Run the invariant suites");
  self->add_option("--seed", selftest_seed, "Seed for randomized cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*rate) return run(h::ExperimentKind::rate, rate_opts);
    if (*tail) return run(h::ExperimentKind::tail, tail_opts);
    if (*stab) return run(h::ExperimentKind::stability, stab_opts);
    if (*self) return selftest(selftest_seed);
  } catch (const spsaa::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
