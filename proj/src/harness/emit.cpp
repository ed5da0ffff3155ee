#include "spsaa/harness/emit.hpp"

#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>

#include "spsaa/errors.hpp"

namespace spsaa::harness {
namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

nlohmann::ordered_json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string to_csv(const Report& report) {
  std::string out = "experiment_id,method,N,replication,seed_path,metric,inner_gap_bound,wall_time\n";
  const std::string method = to_string(report.plan.method.kind);
  for (const auto& r : report.rows) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", report.plan.id, method, r.n, r.replication,
                       r.seed_path, num(r.metric), num(r.inner_gap_bound), num(r.wall_time));
  }
  return out;
}

nlohmann::ordered_json summary_json(const Report& report) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(report.kind);
  j["plan"] = plan_to_json(report.plan);
  j["rows"] = report.rows.size();
  auto grid = nlohmann::ordered_json::array();
  for (const auto& gp : report.grid) {
    nlohmann::ordered_json g;
    g["N"] = gp.n;
    g["count"] = gp.summary.count;
    g["failures"] = gp.failures;
    g["mean"] = finite_or_null(gp.summary.mean);
    g["stderr"] = finite_or_null(gp.summary.std_error);
    auto q = nlohmann::ordered_json::object();
    for (const auto& [level, value] : gp.summary.quantiles) {
      q[fmt::format("{:g}", level)] = finite_or_null(value);
    }
    g["quantiles"] = q;
    if (report.kind == ExperimentKind::tail) {
      g["exceedances"] = gp.exceedances;
      g["exceedance_ci"] = {gp.exceedance_ci.lo, gp.exceedance_ci.hi};
    }
    if (report.kind == ExperimentKind::stability) g["bound_rhs"] = gp.bound_rhs;
    grid.push_back(std::move(g));
  }
  j["grid"] = std::move(grid);
  if (report.fit) {
    j["fit"] = {{"slope", report.fit->slope},
                {"intercept", report.fit->intercept},
                {"r_squared", report.fit->r_squared}};
  } else {
    j["fit"] = nullptr;
  }
  j["degenerate"] = report.degenerate;
  if (report.kind == ExperimentKind::tail) {
    auto th = nlohmann::ordered_json::array();
    for (const auto& t : report.thresholds) {
      th.push_back({{"beta", t.beta},
                    {"n_star", t.n_star ? nlohmann::ordered_json(*t.n_star)
                                        : nlohmann::ordered_json(nullptr)}});
    }
    j["thresholds"] = std::move(th);
  }
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  j["checks"] = std::move(checks);
  j["passed"] = report.passed();
  return j;
}

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  if (name == "both") return Format::both;
  throw ParameterError(fmt::format("format must be csv, json or both; got '{}'", name));
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  out << text;
  out.close();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path));
}

std::vector<std::string> emit(const Report& report, const std::string& dir, Format format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", dir, ec.message()));
  const auto stem =
      (std::filesystem::path(dir) / fmt::format("{}_{}", report.plan.id, to_string(report.kind)))
          .string();
  std::vector<std::string> written;
  if (format != Format::json) {
    write_file(stem + ".csv", to_csv(report));
    written.push_back(stem + ".csv");
  }
  if (format != Format::csv) {
    write_file(stem + ".json", summary_json(report).dump(2) + "\n");
    written.push_back(stem + ".json");
  }
  return written;
}

}  // namespace spsaa::harness
