#include "spsaa/distributions.hpp"

#include <boost/math/distributions/exponential.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/pareto.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "spsaa/errors.hpp"

namespace spsaa {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dimension(const Vector& v, Eigen::Index d, const char* what) {
  if (v.size() != d) {
    throw ParameterError(fmt::format("{} has {} entries, expected {}", what, v.size(), d));
  }
}

void require_positive(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      throw ParameterError(fmt::format("{} must be strictly positive and finite (entry {} is {})",
                                       what, i, v[i]));
    }
  }
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw ParameterError(fmt::format("{} has non-finite entries", what));
}

Eigen::Index validate(const DistSpec::Family& family) {
  return std::visit(
      Overloaded{
          [](const Gaussian& g) {
            if (g.mean.size() < 1) throw ParameterError("gaussian dimension must be >= 1");
            require_dimension(g.std, g.mean.size(), "gaussian std");
            require_finite(g.mean, "gaussian mean");
            require_positive(g.std, "gaussian std");
            return g.mean.size();
          },
          [](const Exponential& e) {
            if (e.rate.size() < 1) throw ParameterError("exponential dimension must be >= 1");
            require_dimension(e.location, e.rate.size(), "exponential location");
            require_positive(e.rate, "exponential rate");
            require_finite(e.location, "exponential location");
            return e.rate.size();
          },
          [](const Pareto& p) {
            if (p.scale.size() < 1) throw ParameterError("pareto dimension must be >= 1");
            if (!(p.tail_index > 2.0) || !std::isfinite(p.tail_index)) {
              throw ParameterError(fmt::format(
                  "pareto tail index must exceed 2 for a finite variance, got {}", p.tail_index));
            }
            require_dimension(p.location, p.scale.size(), "pareto location");
            require_positive(p.scale, "pareto scale");
            require_finite(p.location, "pareto location");
            return p.scale.size();
          },
          [](const StudentT& t) {
            if (t.scale.size() < 1) throw ParameterError("student-t dimension must be >= 1");
            if (!(t.dof > 2.0) || !std::isfinite(t.dof)) {
              throw ParameterError(fmt::format(
                  "student-t degrees of freedom must exceed 2, got {}", t.dof));
            }
            require_dimension(t.location, t.scale.size(), "student-t location");
            require_positive(t.scale, "student-t scale");
            require_finite(t.location, "student-t location");
            return t.scale.size();
          },
          [](const PointMass& m) {
            if (m.location.size() < 1) throw ParameterError("point-mass dimension must be >= 1");
            require_finite(m.location, "point-mass location");
            return m.location.size();
          },
      },
      family);
}

double pareto_mean_factor(double alpha) { return alpha / (alpha - 1.0); }

double pareto_offset(const Pareto& p, Eigen::Index i) {
  return p.centered ? p.location[i] - p.scale[i] * pareto_mean_factor(p.tail_index)
                    : p.location[i];
}

void check_moment_order(const DistSpec& spec, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw ParameterError(fmt::format("moment order must be finite and >= 1, got {}", p));
  }
  std::visit(Overloaded{
                 [p](const Pareto& par) {
                   if (p >= par.tail_index) {
                     throw ParameterError(fmt::format(
                         "moment of order {} is infinite: pareto needs order < tail index {}", p,
                         par.tail_index));
                   }
                 },
                 [p](const StudentT& t) {
                   if (p >= t.dof) {
                     throw ParameterError(fmt::format(
                         "moment of order {} is infinite: student-t needs order < dof {}", p,
                         t.dof));
                   }
                 },
                 [](const auto&) {},
             },
             spec.family());
}

// integral over u in (0, 1] of |g(u)|^p with the kink at `split`.
template <class G>
double integrate_unit_interval(G g, double split, double p) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto integrand = [&](double u) { return std::pow(std::abs(g(u)), p); };
  double total = 0.0;
  if (split > 0.0) total += integrator.integrate(integrand, 0.0, std::min(split, 1.0), 1e-12);
  if (split < 1.0) total += integrator.integrate(integrand, std::max(split, 0.0), 1.0, 1e-12);
  return total;
}

}  // namespace

DistSpec::DistSpec(Family family) : family_(std::move(family)), dimension_(validate(family_)) {}

std::string DistSpec::family_name() const {
  return std::visit(Overloaded{
                        [](const Gaussian&) { return std::string("gaussian"); },
                        [](const Exponential&) { return std::string("exponential"); },
                        [](const Pareto&) { return std::string("pareto"); },
                        [](const StudentT&) { return std::string("student_t"); },
                        [](const PointMass&) { return std::string("point_mass"); },
                    },
                    family_);
}

Vector DistSpec::mean() const {
  return std::visit(
      Overloaded{
          [](const Gaussian& g) -> Vector { return g.mean; },
          [](const Exponential& e) -> Vector { return e.location + e.rate.cwiseInverse(); },
          [](const Pareto& p) -> Vector {
            if (p.centered) return p.location;
            return p.location + p.scale * pareto_mean_factor(p.tail_index);
          },
          [](const StudentT& t) -> Vector { return t.location; },
          [](const PointMass& m) -> Vector { return m.location; },
      },
      family_);
}

Vector DistSpec::variance() const {
  return std::visit(
      Overloaded{
          [](const Gaussian& g) -> Vector { return g.std.cwiseAbs2(); },
          [](const Exponential& e) -> Vector { return e.rate.cwiseAbs2().cwiseInverse(); },
          [](const Pareto& p) -> Vector {
            const double a = p.tail_index;
            return p.scale.cwiseAbs2() * (a / ((a - 1.0) * (a - 1.0) * (a - 2.0)));
          },
          [](const StudentT& t) -> Vector {
            return t.scale.cwiseAbs2() * (t.dof / (t.dof - 2.0));
          },
          [](const PointMass& m) -> Vector { return Vector::Zero(m.location.size()); },
      },
      family_);
}

double DistSpec::support_lower(Eigen::Index i) const {
  return std::visit(Overloaded{
                        [](const Gaussian&) { return -kInf; },
                        [i](const Exponential& e) { return e.location[i]; },
                        [i](const Pareto& p) { return pareto_offset(p, i) + p.scale[i]; },
                        [](const StudentT&) { return -kInf; },
                        [i](const PointMass& m) { return m.location[i]; },
                    },
                    family_);
}

double DistSpec::cdf(Eigen::Index i, double t) const {
  namespace bm = boost::math;
  return std::visit(
      Overloaded{
          [&](const Gaussian& g) { return bm::cdf(bm::normal(g.mean[i], g.std[i]), t); },
          [&](const Exponential& e) {
            if (t <= e.location[i]) return 0.0;
            return bm::cdf(bm::exponential(e.rate[i]), t - e.location[i]);
          },
          [&](const Pareto& p) {
            const double y = t - pareto_offset(p, i);
            if (y <= p.scale[i]) return 0.0;
            return bm::cdf(bm::pareto(p.scale[i], p.tail_index), y);
          },
          [&](const StudentT& s) {
            return bm::cdf(bm::students_t(s.dof), (t - s.location[i]) / s.scale[i]);
          },
          [&](const PointMass& m) { return t >= m.location[i] ? 1.0 : 0.0; },
      },
      family_);
}

double DistSpec::quantile(Eigen::Index i, double u) const {
  namespace bm = boost::math;
  if (!(u > 0.0 && u < 1.0)) {
    throw ParameterError(fmt::format("quantile level must lie in (0, 1), got {}", u));
  }
  return std::visit(
      Overloaded{
          [&](const Gaussian& g) { return bm::quantile(bm::normal(g.mean[i], g.std[i]), u); },
          [&](const Exponential& e) {
            return e.location[i] + bm::quantile(bm::exponential(e.rate[i]), u);
          },
          [&](const Pareto& p) {
            return pareto_offset(p, i) + bm::quantile(bm::pareto(p.scale[i], p.tail_index), u);
          },
          [&](const StudentT& s) {
            return s.location[i] + s.scale[i] * bm::quantile(bm::students_t(s.dof), u);
          },
          [&](const PointMass& m) { return m.location[i]; },
      },
      family_);
}

DistSpec DistSpec::shifted(VectorRef shift) const {
  if (shift.size() != dimension_) {
    throw ParameterError(fmt::format("shift has {} entries, expected {}", shift.size(), dimension_));
  }
  Family moved = family_;
  std::visit(Overloaded{
                 [&](Gaussian& g) { g.mean += shift; },
                 [&](auto& f) { f.location += shift; },
             },
             moved);
  return DistSpec(std::move(moved));
}

DistSpec gaussian(Eigen::Index d, double mean, double std) {
  return DistSpec(Gaussian{Vector::Constant(d, mean), Vector::Constant(d, std)});
}

DistSpec exponential(Eigen::Index d, double rate) {
  return DistSpec(Exponential{Vector::Constant(d, rate), Vector::Zero(d)});
}

DistSpec pareto(Eigen::Index d, double tail_index, double scale, bool centered) {
  return DistSpec(Pareto{tail_index, Vector::Constant(d, scale), Vector::Zero(d), centered});
}

DistSpec student_t(Eigen::Index d, double dof, double scale) {
  return DistSpec(StudentT{dof, Vector::Constant(d, scale), Vector::Zero(d)});
}

DistSpec point_mass(Vector location) { return DistSpec(PointMass{std::move(location)}); }

RngStream RngStream::child(std::uint64_t tag) const {
  auto path = path_;
  path.push_back(tag);
  return RngStream(master_seed_, std::move(path));
}

RngStream::Engine RngStream::engine() const {
  std::vector<std::uint32_t> words;
  words.reserve(3 + 2 * path_.size());
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffULL));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(master_seed_);
  words.push_back(static_cast<std::uint32_t>(path_.size()));
  for (auto p : path_) push(p);
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

std::string RngStream::address() const {
  std::string out = std::to_string(master_seed_);
  for (auto p : path_) {
    out += '/';
    out += std::to_string(p);
  }
  return out;
}

ScenarioMatrix sample(const DistSpec& spec, const RngStream& stream, Eigen::Index n) {
  if (n < 0) throw ParameterError(fmt::format("sample count must be >= 0, got {}", n));
  const Eigen::Index d = spec.dimension();
  ScenarioMatrix out(n, d);
  if (n == 0) return out;
  auto engine = stream.engine();

  std::visit(
      Overloaded{
          [&](const Gaussian& g) {
            std::normal_distribution<double> z(0.0, 1.0);
            for (Eigen::Index j = 0; j < n; ++j)
              for (Eigen::Index i = 0; i < d; ++i) out(j, i) = g.mean[i] + g.std[i] * z(engine);
          },
          [&](const Exponential& e) {
            std::exponential_distribution<double> unit(1.0);
            for (Eigen::Index j = 0; j < n; ++j)
              for (Eigen::Index i = 0; i < d; ++i)
                out(j, i) = e.location[i] + unit(engine) / e.rate[i];
          },
          [&](const Pareto& p) {
            std::uniform_real_distribution<double> uniform(0.0, 1.0);
            const double inv_alpha = 1.0 / p.tail_index;
            for (Eigen::Index j = 0; j < n; ++j)
              for (Eigen::Index i = 0; i < d; ++i) {
                // 1 - U lies in (0, 1], so the power is finite.
                const double u = 1.0 - uniform(engine);
                out(j, i) = pareto_offset(p, i) + p.scale[i] * std::pow(u, -inv_alpha);
              }
          },
          [&](const StudentT& t) {
            std::student_t_distribution<double> tdist(t.dof);
            for (Eigen::Index j = 0; j < n; ++j)
              for (Eigen::Index i = 0; i < d; ++i)
                out(j, i) = t.location[i] + t.scale[i] * tdist(engine);
          },
          [&](const PointMass& m) { out.rowwise() = m.location.transpose(); },
      },
      spec.family());
  return out;
}

std::string TailClass::name() const {
  switch (kind) {
    case TailKind::subgaussian:
      return "subgaussian";
    case TailKind::subexponential:
      return "subexponential";
    case TailKind::pth_moment:
      return fmt::format("pth_moment({})", order);
  }
  return "unknown";
}

TailClass tail_class(const DistSpec& spec) {
  return std::visit(
      Overloaded{
          // P[X - m >= t] <= exp(-t^2 / (2 s^2)), i.e. phi = sqrt(2) * s.
          [](const Gaussian& g) {
            return TailClass{TailKind::subgaussian, kInf, std::sqrt(2.0) * g.std.maxCoeff()};
          },
          // P[X - loc >= t] = exp(-rate * t) exactly, i.e. phi = 1 / rate.
          [](const Exponential& e) {
            return TailClass{TailKind::subexponential, kInf, 1.0 / e.rate.minCoeff()};
          },
          [](const Pareto& p) { return TailClass{TailKind::pth_moment, p.tail_index, {}}; },
          [](const StudentT& t) { return TailClass{TailKind::pth_moment, t.dof, {}}; },
          [](const PointMass&) { return TailClass{TailKind::subgaussian, kInf, 0.0}; },
      },
      spec.family());
}

double central_absolute_moment(const DistSpec& spec, Eigen::Index i, double p) {
  check_moment_order(spec, p);
  if (i < 0 || i >= spec.dimension()) {
    throw ParameterError(fmt::format("coordinate {} out of range", i));
  }
  using boost::math::tgamma;
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  return std::visit(
      Overloaded{
          [&](const Gaussian& g) {
            return std::pow(g.std[i], p) * std::pow(2.0, p / 2.0) * tgamma((p + 1.0) / 2.0) /
                   sqrt_pi;
          },
          [&](const Exponential& e) {
            // X - EX = (E - 1) / rate with E ~ Exp(1) = -ln U.
            auto g = [](double u) { return -std::log(u) - 1.0; };
            return integrate_unit_interval(g, std::exp(-1.0), p) / std::pow(e.rate[i], p);
          },
          [&](const Pareto& par) {
            const double a = par.tail_index;
            const double m = pareto_mean_factor(a);
            auto g = [a, m](double u) { return std::pow(u, -1.0 / a) - m; };
            return std::pow(par.scale[i], p) * integrate_unit_interval(g, std::pow(m, -a), p);
          },
          [&](const StudentT& t) {
            const double nu = t.dof;
            return std::pow(t.scale[i], p) * std::pow(nu, p / 2.0) * tgamma((p + 1.0) / 2.0) *
                   tgamma((nu - p) / 2.0) / (sqrt_pi * tgamma(nu / 2.0));
          },
          [](const PointMass&) { return 0.0; },
      },
      spec.family());
}

MomentParameters moment_parameters(const DistSpec& spec, double p) {
  check_moment_order(spec, p);
  const Eigen::Index d = spec.dimension();
  double phi = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    phi = std::max(phi, std::pow(central_absolute_moment(spec, i, p), 1.0 / p));
  }
  const double dd = static_cast<double>(d);
  MomentParameters out;
  out.order = p;
  out.phi_p = phi;
  out.sigma_p_sq = std::pow(dd, 2.0 / p) * phi * phi;
  out.psi_p = std::pow(dd, 1.0 / p) * phi;
  out.total_variance = spec.variance().sum();
  out.tail_phi = tail_class(spec).phi;
  return out;
}

}  // namespace spsaa
