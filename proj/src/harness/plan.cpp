#include "spsaa/harness/plan.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>

#include "spsaa/errors.hpp"

namespace spsaa::harness {
namespace {

using nlohmann::json;

/// Reads fields of one JSON object and rejects keys nobody asked for.
class Fields {
 public:
  Fields(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw ParameterError(fmt::format("{} must be a JSON object", where_));
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ParameterError(fmt::format("{}.{}: {}", where_, key, e.what()));
    }
  }

  template <class T>
  void get(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!obj_.contains(key) || obj_.at(key).is_null()) return;
    T value{};
    get(key, value);
    out = value;
  }

  template <class T>
  T required(const char* key) {
    if (!obj_.contains(key)) throw ParameterError(fmt::format("{} is missing '{}'", where_, key));
    T value{};
    get(key, value);
    return value;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return obj_.contains(key) ? &obj_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.count(key)) throw ParameterError(fmt::format("{}: unknown key '{}'", where_, key));
    }
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

NoiseSpec parse_noise(const json& j) {
  Fields f(j, "problem.noise");
  NoiseSpec s;
  f.get("family", s.family);
  f.get("mean", s.mean);
  f.get("std", s.std);
  f.get("rate", s.rate);
  f.get("tail_index", s.tail_index);
  f.get("scale", s.scale);
  f.get("dof", s.dof);
  f.get("centered", s.centered);
  f.finish();
  return s;
}

SetSpec parse_set(const json& j) {
  Fields f(j, "problem.set");
  SetSpec s;
  f.get("kind", s.kind);
  f.get("lo", s.lo);
  f.get("hi", s.hi);
  f.get("radius", s.radius);
  f.finish();
  return s;
}

ProblemSpec parse_problem(const json& j) {
  Fields f(j, "problem");
  ProblemSpec s;
  s.family = f.required<std::string>("family");
  s.dimension = f.required<Eigen::Index>("dimension");
  f.get("mu", s.mu);
  f.get("rank", s.rank);
  f.get("basis_seed", s.basis_seed);
  f.get("holding", s.holding);
  f.get("backlog", s.backlog);
  f.get("base_demand", s.base_demand);
  f.get("theta_norm", s.theta_norm);
  if (const auto* n = f.child("noise")) s.noise = parse_noise(*n);
  if (const auto* n = f.child("set")) s.set = parse_set(*n);
  f.finish();
  return s;
}

RStarPolicy parse_policy(const std::string& name) {
  if (name == "oracle") return RStarPolicy::oracle;
  if (name == "oracle_half") return RStarPolicy::oracle_half;
  if (name == "diameter") return RStarPolicy::diameter;
  if (name == "manual") return RStarPolicy::manual;
  throw ParameterError(fmt::format("unknown r_star_policy '{}'", name));
}

std::string policy_name(RStarPolicy p) {
  switch (p) {
    case RStarPolicy::oracle: return "oracle";
    case RStarPolicy::oracle_half: return "oracle_half";
    case RStarPolicy::diameter: return "diameter";
    case RStarPolicy::manual: return "manual";
  }
  return "?";
}

StepRule parse_step(const std::string& name) {
  if (name == "constant") return StepRule::constant;
  if (name == "decaying") return StepRule::decaying;
  if (name == "strongly_convex") return StepRule::strongly_convex;
  throw ParameterError(fmt::format("unknown step_rule '{}'", name));
}

std::string step_name(StepRule r) {
  switch (r) {
    case StepRule::constant: return "constant";
    case StepRule::decaying: return "decaying";
    case StepRule::strongly_convex: return "strongly_convex";
  }
  return "?";
}

MethodSpec parse_method(const json& j) {
  Fields f(j, "method");
  MethodSpec s;
  const auto kind = f.required<std::string>("kind");
  if (kind == "saa") {
    s.kind = MethodKind::saa;
  } else if (kind == "smd") {
    s.kind = MethodKind::smd;
  } else {
    throw ParameterError(fmt::format("method.kind must be 'saa' or 'smd', got '{}'", kind));
  }
  f.get("regularized", s.regularized);
  std::string policy = "oracle";
  f.get("r_star_policy", policy);
  s.r_star.policy = parse_policy(policy);
  f.get("r_star", s.r_star.value);
  f.get("q_prime", s.q_prime);
  f.get("anchor", s.anchor);
  std::string step = "decaying";
  f.get("step_rule", step);
  s.step_rule = parse_step(step);
  f.get("step_scale", s.step_scale);
  f.get("averaging", s.averaging);
  f.finish();
  return s;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::rate: return "rate";
    case ExperimentKind::tail: return "tail";
    case ExperimentKind::stability: return "stability";
  }
  return "?";
}

std::string to_string(MethodKind kind) { return kind == MethodKind::saa ? "saa" : "smd"; }

ExperimentPlan parse_plan(const json& doc) {
  Fields f(doc, "plan");
  ExperimentPlan p;
  p.id = f.required<std::string>("id");
  if (const auto* j = f.child("problem")) {
    p.problem = parse_problem(*j);
  } else {
    throw ParameterError("plan is missing 'problem'");
  }
  if (const auto* j = f.child("method")) {
    p.method = parse_method(*j);
  } else {
    throw ParameterError("plan is missing 'method'");
  }
  f.get("n_grid", p.n_grid);
  f.get("replications", p.replications);
  f.get("master_seed", p.master_seed);
  f.get("epsilon", p.epsilon);
  if (const auto* j = f.child("metric")) {
    Fields m(*j, "metric");
    std::string kind = "gap";
    m.get("kind", kind);
    if (kind == "gap") {
      p.metric.kind = MetricKind::gap;
    } else if (kind == "distance_sq") {
      p.metric.kind = MetricKind::distance_sq;
    } else {
      throw ParameterError(fmt::format("metric.kind must be 'gap' or 'distance_sq', got '{}'", kind));
    }
    m.get("q", p.metric.q);
    m.finish();
  }
  if (const auto* j = f.child("solver")) {
    Fields s(*j, "solver");
    s.get("tol", p.solver.tol);
    s.get("budget", p.solver.budget);
    s.finish();
  }
  if (const auto* j = f.child("tail")) {
    Fields t(*j, "tail");
    t.get("beta_grid", p.tail.beta_grid);
    t.get("threshold", p.tail.threshold);
    t.get("significance", p.tail.significance);
    t.finish();
  }
  if (const auto* j = f.child("stability")) {
    Fields s(*j, "stability");
    s.get("probes", p.stability.probes);
    s.get("solver_tol", p.stability.solver_tol);
    s.finish();
  }
  if (const auto* j = f.child("acceptance")) {
    Fields a(*j, "acceptance");
    a.get("slope_min", p.acceptance.slope_min);
    a.get("slope_max", p.acceptance.slope_max);
    a.get("min_r2", p.acceptance.min_r2);
    a.get("bound_slack", p.acceptance.bound_slack);
    a.get("monotone", p.acceptance.monotone);
    a.finish();
  }
  f.finish();
  return p;
}

ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open plan file '{}'", path));
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParameterError(fmt::format("{}: invalid JSON: {}", path, e.what()));
  }
  return parse_plan(doc);
}

nlohmann::ordered_json plan_to_json(const ExperimentPlan& p) {
  nlohmann::ordered_json j;
  j["id"] = p.id;
  const auto& pr = p.problem;
  j["problem"] = {{"family", pr.family},
                  {"dimension", pr.dimension},
                  {"mu", pr.mu},
                  {"rank", pr.rank},
                  {"basis_seed", pr.basis_seed},
                  {"holding", pr.holding},
                  {"backlog", pr.backlog},
                  {"base_demand", pr.base_demand},
                  {"theta_norm", pr.theta_norm},
                  {"noise",
                   {{"family", pr.noise.family},
                    {"mean", pr.noise.mean},
                    {"std", pr.noise.std},
                    {"rate", pr.noise.rate},
                    {"tail_index", pr.noise.tail_index},
                    {"scale", pr.noise.scale},
                    {"dof", pr.noise.dof},
                    {"centered", pr.noise.centered}}},
                  {"set",
                   {{"kind", pr.set.kind},
                    {"lo", pr.set.lo},
                    {"hi", pr.set.hi},
                    {"radius", pr.set.radius}}}};
  const auto& m = p.method;
  j["method"] = {{"kind", to_string(m.kind)},
                 {"regularized", m.regularized},
                 {"r_star_policy", policy_name(m.r_star.policy)},
                 {"r_star", m.r_star.value},
                 {"q_prime", m.q_prime ? nlohmann::ordered_json(*m.q_prime) : nullptr},
                 {"anchor", m.anchor},
                 {"step_rule", step_name(m.step_rule)},
                 {"step_scale", m.step_scale},
                 {"averaging", m.averaging}};
  j["n_grid"] = p.n_grid;
  j["replications"] = p.replications;
  j["master_seed"] = p.master_seed;
  j["epsilon"] = p.epsilon;
  j["metric"] = {{"kind", p.metric.kind == MetricKind::gap ? "gap" : "distance_sq"},
                 {"q", p.metric.q}};
  j["solver"] = {{"tol", p.solver_tol()}, {"budget", p.solver.budget}};
  j["tail"] = {{"beta_grid", p.tail.beta_grid},
               {"threshold", p.tail_threshold()},
               {"significance", p.tail.significance}};
  j["stability"] = {{"probes", p.stability.probes}, {"solver_tol", p.stability_tol()}};
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  j["acceptance"] = {{"slope_min", opt(p.acceptance.slope_min)},
                     {"slope_max", opt(p.acceptance.slope_max)},
                     {"min_r2", opt(p.acceptance.min_r2)},
                     {"bound_slack", opt(p.acceptance.bound_slack)},
                     {"monotone", p.acceptance.monotone}};
  return j;
}

void validate_plan(const ExperimentPlan& p, ExperimentKind kind) {
  if (p.id.empty()) throw ParameterError("plan id must be non-empty");
  if (p.n_grid.empty()) throw ParameterError("n_grid must be non-empty");
  for (std::size_t i = 0; i < p.n_grid.size(); ++i) {
    if (p.n_grid[i] < 1) throw ParameterError(fmt::format("n_grid entries must be >= 1"));
    if (i > 0 && p.n_grid[i] <= p.n_grid[i - 1]) {
      throw ParameterError("n_grid must be strictly increasing");
    }
  }
  if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon)) {
    throw ParameterError(fmt::format("epsilon must be positive, got {}", p.epsilon));
  }
  if (!(p.solver_tol() > 0.0)) throw ParameterError("solver tol must be positive");
  if (p.solver.budget < 1) throw ParameterError("solver budget must be >= 1");
  if (p.metric.kind == MetricKind::distance_sq && !(p.metric.q >= 1.0)) {
    throw ParameterError(fmt::format("metric q must be >= 1, got {}", p.metric.q));
  }

  switch (kind) {
    case ExperimentKind::rate:
    case ExperimentKind::stability:
      if (p.replications < 30) {
        throw ParameterError(
            fmt::format("slope fits need at least 30 replications, got {}", p.replications));
      }
      break;
    case ExperimentKind::tail: {
      if (p.tail.beta_grid.empty()) throw ParameterError("tail.beta_grid must be non-empty");
      double beta_min = 1.0;
      for (double b : p.tail.beta_grid) {
        if (!(b > 0.0 && b < 1.0)) {
          throw ParameterError(fmt::format("beta values must lie in (0, 1), got {}", b));
        }
        beta_min = std::min(beta_min, b);
      }
      const double needed = std::ceil(10.0 / beta_min - 1e-9);
      if (p.replications < needed) {
        throw ParameterError(fmt::format("beta = {} needs at least {} replications, got {}",
                                         beta_min, needed, p.replications));
      }
      if (!(p.tail_threshold() > 0.0)) throw ParameterError("tail threshold must be positive");
      if (!(p.tail.significance > 0.0 && p.tail.significance < 1.0)) {
        throw ParameterError("tail significance must lie in (0, 1)");
      }
      break;
    }
  }
  if (kind == ExperimentKind::stability) {
    if (p.method.kind != MethodKind::saa) {
      throw ParameterError("stability experiments need an SAA method");
    }
    if (p.stability.probes < 1) throw ParameterError("stability.probes must be >= 1");
  }
  if (p.method.kind == MethodKind::smd && !(p.method.step_scale > 0.0)) {
    throw ParameterError("method.step_scale must be positive");
  }
}

DistSpec build_noise(const NoiseSpec& s, Eigen::Index d) {
  const Vector shift = Vector::Constant(d, s.mean);
  if (s.family == "gaussian") return gaussian(d, s.mean, s.std);
  if (s.family == "exponential") return exponential(d, s.rate).shifted(shift);
  if (s.family == "pareto") return pareto(d, s.tail_index, s.scale, s.centered).shifted(shift);
  if (s.family == "student_t") return student_t(d, s.dof, s.scale).shifted(shift);
  if (s.family == "point_mass") return point_mass(shift);
  throw ParameterError(fmt::format("unknown noise family '{}'", s.family));
}

FeasibleSet build_set(const SetSpec& s, Eigen::Index d) {
  FeasibleSet set;
  if (s.kind == "all_space") {
    set = FeasibleSet::all_space();
  } else if (s.kind == "box") {
    set = FeasibleSet::box(d, s.lo, s.hi);
  } else if (s.kind == "ball") {
    set = FeasibleSet::euclidean_ball(Vector::Zero(d), s.radius);
  } else if (s.kind == "simplex") {
    set = FeasibleSet::simplex();
  } else {
    throw ParameterError(fmt::format("unknown set kind '{}'", s.kind));
  }
  set.validate(d);
  return set;
}

ProblemInstance build_instance(const ProblemSpec& s) {
  const Eigen::Index d = s.dimension;
  if (d < 1) throw ParameterError(fmt::format("dimension must be >= 1, got {}", d));
  const DistSpec noise = build_noise(s.noise, d);
  const FeasibleSet set = build_set(s.set, d);
  if (s.family == "quadratic_tracking") return make_quadratic_tracking(d, s.mu, noise, set);
  if (s.family == "degenerate_quadratic") {
    return make_degenerate_quadratic(d, s.rank, noise, set, s.basis_seed);
  }
  if (s.family == "newsvendor") {
    return make_newsvendor(d, s.holding, s.backlog,
                           noise.shifted(Vector::Constant(d, s.base_demand)), set);
  }
  if (s.family == "quartic_nonlipschitz") {
    const Vector theta = Vector::Constant(d, s.theta_norm / std::sqrt(static_cast<double>(d)));
    return make_quartic_nonlipschitz(theta, noise, set);
  }
  throw ParameterError(fmt::format("unknown problem family '{}'", s.family));
}

}  // namespace spsaa::harness
