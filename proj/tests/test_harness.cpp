#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "spsaa/errors.hpp"
#include "spsaa/harness/emit.hpp"
#include "spsaa/harness/experiments.hpp"
#include "spsaa/harness/stats.hpp"

using namespace spsaa;
using namespace spsaa::harness;
using nlohmann::json;

namespace {

json tracking_doc(double std, int reps, std::vector<int> grid) {
  return json{
      {"id", "tracking_test"},
      {"problem",
       {{"family", "quadratic_tracking"},
        {"dimension", 3},
        {"mu", 2.0},
        {"noise", {{"family", std > 0.0 ? "gaussian" : "point_mass"}, {"mean", 0.5}, {"std", std}}}}},
      {"method", {{"kind", "saa"}, {"regularized", false}}},
      {"n_grid", grid},
      {"replications", reps},
      {"master_seed", 99},
      {"epsilon", 0.01},
      {"solver", {{"tol", 1e-12}}},
  };
}

/// P(X >= k1) for the hypergeometric law of the first row's successes.
double hypergeometric_upper(int k1, int n1, int k2, int n2) {
  const int k = k1 + k2, n = n1 + n2;
  auto lchoose = [](int a, int b) {
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
  };
  double p = 0.0;
  for (int x = k1; x <= std::min(k, n1); ++x) {
    if (k - x > n2) continue;
    p += std::exp(lchoose(n1, x) + lchoose(n2, k - x) - lchoose(n, k));
  }
  return p;
}

}  // namespace

TEST_CASE("log-log fit on exact laws") {
  std::vector<std::pair<double, double>> a, b;
  for (double n : {32.0, 64.0, 128.0, 256.0}) {
    a.emplace_back(n, 7.0 / n);
    b.emplace_back(n, 3.0 / (n * n));
  }
  const auto fa = fit_loglog_slope(a);
  CHECK(fa.slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(fa.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::exp(fa.intercept) == doctest::Approx(7.0).epsilon(1e-12));
  const auto fb = fit_loglog_slope(b);
  CHECK(fb.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(fb.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_loglog_slope({{1.0, 1.0}, {2.0, 0.5}}), ParameterError);
  CHECK_THROWS_AS(fit_loglog_slope({{1.0, 1.0}, {2.0, 0.0}, {4.0, 0.1}}), ParameterError);
}

TEST_CASE("summary is order independent") {
  std::vector<double> v{5.0, 1.0, 3.0, 2.0, 4.0, 9.0, 0.5};
  const auto a = summarize(v);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(v.begin(), v.end(), rng);
    const auto b = summarize(v);
    CHECK(b.mean == a.mean);
    CHECK(b.std_error == a.std_error);
    CHECK(b.quantiles == a.quantiles);
  }
  CHECK(a.count == 7);
  CHECK(a.quantiles[1].second == 3.0);
  for (std::size_t i = 1; i < a.quantiles.size(); ++i) {
    CHECK(a.quantiles[i].first > a.quantiles[i - 1].first);
    CHECK(a.quantiles[i].second >= a.quantiles[i - 1].second);
  }
}

TEST_CASE("Clopper-Pearson intervals") {
  const auto zero = clopper_pearson(0, 10);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi == doctest::Approx(1.0 - std::pow(0.025, 0.1)).epsilon(1e-12));
  const auto all = clopper_pearson(10, 10);
  CHECK(all.hi == 1.0);
  CHECK(all.lo == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-12));
  const auto half = clopper_pearson(5, 10);
  CHECK(half.lo == doctest::Approx(0.187086).epsilon(1e-5));
  CHECK(half.hi == doctest::Approx(0.812914).epsilon(1e-5));
  CHECK_THROWS_AS(clopper_pearson(11, 10), ParameterError);
}

TEST_CASE("Fisher exact test against direct hypergeometric sums") {
  for (auto [k1, n1, k2, n2] : std::vector<std::array<int, 4>>{
           {8, 200, 0, 200}, {45, 200, 30, 200}, {0, 200, 0, 200}, {200, 200, 197, 200}, {3, 10, 7, 10}}) {
    CHECK(fisher_greater_pvalue(k1, n1, k2, n2) ==
          doctest::Approx(hypergeometric_upper(k1, n1, k2, n2)).epsilon(1e-9));
  }
}

TEST_CASE("Spearman rank correlation") {
  CHECK(spearman_rho({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman_rho({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  // Ties receive average ranks: ranks y = (1.5, 1.5, 3, 4).
  CHECK(spearman_rho({1, 2, 3, 4}, {5, 5, 6, 7}) == doctest::Approx(0.9486833).epsilon(1e-6));
}

TEST_CASE("shipped configs parse and validate") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(SPSAA_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const auto name = entry.path().stem().string();
    INFO(name);
    const auto plan = load_plan(entry.path().string());
    ExperimentKind kind = ExperimentKind::rate;
    if (name.find("tail") != std::string::npos) kind = ExperimentKind::tail;
    if (name.find("stability") != std::string::npos) kind = ExperimentKind::stability;
    CHECK_NOTHROW(validate_plan(plan, kind));
    CHECK_NOTHROW(build_instance(plan.problem));
    // The normalized echo parses back to the same echo.
    CHECK(plan_to_json(parse_plan(json::parse(plan_to_json(plan).dump()))) == plan_to_json(plan));
    ++count;
  }
  CHECK(count >= 7);
}

TEST_CASE("plan validation rejects documented error cases") {
  auto doc = tracking_doc(1.0, 30, {8, 16, 32});
  CHECK_NOTHROW(validate_plan(parse_plan(doc), ExperimentKind::rate));

  auto typo = doc;
  typo["replicatons"] = 30;
  CHECK_THROWS_AS(parse_plan(typo), ParameterError);
  auto nested = doc;
  nested["problem"]["noise"]["sdt"] = 1.0;
  CHECK_THROWS_AS(parse_plan(nested), ParameterError);

  auto unsorted = tracking_doc(1.0, 30, {8, 32, 16});
  CHECK_THROWS_AS(validate_plan(parse_plan(unsorted), ExperimentKind::rate), ParameterError);
  auto repeated = tracking_doc(1.0, 30, {8, 8, 16});
  CHECK_THROWS_AS(validate_plan(parse_plan(repeated), ExperimentKind::rate), ParameterError);
  auto few = tracking_doc(1.0, 29, {8, 16, 32});
  CHECK_THROWS_AS(validate_plan(parse_plan(few), ExperimentKind::rate), ParameterError);

  auto tail = tracking_doc(1.0, 150, {8, 16, 32});
  tail["tail"] = {{"beta_grid", {0.2, 0.05}}};
  CHECK_THROWS_AS(validate_plan(parse_plan(tail), ExperimentKind::tail), ParameterError);
  tail["replications"] = 200;
  CHECK_NOTHROW(validate_plan(parse_plan(tail), ExperimentKind::tail));

  auto smd = doc;
  smd["method"] = {{"kind", "smd"}};
  CHECK_THROWS_AS(validate_plan(parse_plan(smd), ExperimentKind::stability), ParameterError);

  CHECK_THROWS_AS(load_plan("/nonexistent/plan.json"), IoError);
}

TEST_CASE("zero-variance plan is flagged degenerate") {
  const auto plan = parse_plan(tracking_doc(0.0, 30, {8, 16, 32, 64}));
  const auto report = run_rate_experiment(plan);
  CHECK(report.degenerate);
  for (const auto& g : report.grid) CHECK(g.summary.mean <= plan.solver_tol());
}

TEST_CASE("tracking mean gap matches mu d sigma^2 / (2N)") {
  const auto plan = parse_plan(tracking_doc(1.3, 200, {8, 32, 128}));
  const auto report = run_rate_experiment(plan);
  for (const auto& g : report.grid) {
    const double expected = 2.0 * 3.0 * 1.3 * 1.3 / (2.0 * g.n);
    INFO("N=" << g.n);
    CHECK(std::abs(g.summary.mean - expected) <= 5.0 * g.summary.std_error);
    CHECK(g.failures == 0);
  }
  REQUIRE(report.fit);
  CHECK(report.fit->slope == doctest::Approx(-1.0).epsilon(0.1));
}

TEST_CASE("CSV output is byte-identical across runs and worker counts") {
  const auto plan = parse_plan(tracking_doc(1.0, 30, {8, 16, 32}));
  const auto a = to_csv(run_rate_experiment(plan, {1, false}));
  const auto b = to_csv(run_rate_experiment(plan, {1, false}));
  const auto c = to_csv(run_rate_experiment(plan, {3, false}));
  CHECK(a == b);
  CHECK(a == c);
  CHECK(summary_json(run_rate_experiment(plan, {2, false})).dump() ==
        summary_json(run_rate_experiment(plan, {1, false})).dump());
}

TEST_CASE("CSV layout") {
  const std::string header =
      "experiment_id,method,N,replication,seed_path,metric,inner_gap_bound,wall_time\n";
  Report empty;
  empty.plan = parse_plan(tracking_doc(1.0, 30, {8, 16, 32}));
  CHECK(to_csv(empty) == header);

  Report one = empty;
  Row row;
  row.n = 8;
  row.replication = 3;
  row.seed_path = "99/0/3";
  row.metric = 0.25;
  row.inner_gap_bound = 1e-13;
  one.rows.push_back(row);
  const auto csv = to_csv(one);
  CHECK(csv.rfind(header, 0) == 0);
  const auto line = csv.substr(header.size());
  CHECK(std::count(line.begin(), line.end(), '\n') == 1);
  CHECK(line.rfind("tracking_test,saa,8,3,99/0/3,0.25,", 0) == 0);
}

TEST_CASE("emit writes files and reports unwritable paths") {
  const auto plan = parse_plan(tracking_doc(1.0, 30, {8, 16, 32}));
  const auto report = run_rate_experiment(plan);
  const auto dir = std::filesystem::temp_directory_path() / "spsaa_emit_test";
  std::filesystem::remove_all(dir);
  const auto paths = emit(report, dir.string(), Format::both);
  CHECK(paths.size() == 2);
  for (const auto& p : paths) CHECK(std::filesystem::exists(p));
  CHECK_THROWS_AS(emit(report, "/proc/spsaa/forbidden", Format::csv), IoError);
  CHECK(parse_format("json") == Format::json);
  CHECK_THROWS_AS(parse_format("xml"), ParameterError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("vacuous tail threshold never exceeds") {
  auto doc = tracking_doc(1.0, 60, {8, 16, 32});
  doc["tail"] = {{"beta_grid", {0.2}}, {"threshold", 1e6}};
  const auto report = run_tail_experiment(parse_plan(doc));
  for (const auto& g : report.grid) CHECK(g.exceedances == 0);
  REQUIRE(report.thresholds.size() == 1);
  CHECK(report.thresholds[0].n_star == Eigen::Index{8});
}

TEST_CASE("stability at N = 1 matches the single-scenario statistic") {
  const auto report = run_stability_experiment(parse_plan(tracking_doc(1.0, 200, {1, 2, 4})));
  // E||xi' - xi||^2 = 2 d sigma^2 with both minimizers equal to the scenarios.
  const auto& g = report.grid.front();
  CHECK(g.n == 1);
  CHECK(std::abs(g.summary.mean - 6.0) <= 5.0 * g.summary.std_error);
}
