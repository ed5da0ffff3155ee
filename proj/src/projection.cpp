#include "spsaa/projection.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <vector>

#include "spsaa/errors.hpp"

namespace spsaa {

FeasibleSet FeasibleSet::box(Vector lo, Vector hi) {
  FeasibleSet s;
  s.kind = Kind::box;
  s.lo = std::move(lo);
  s.hi = std::move(hi);
  return s;
}

FeasibleSet FeasibleSet::box(Eigen::Index d, double lo, double hi) {
  return box(Vector::Constant(d, lo), Vector::Constant(d, hi));
}

FeasibleSet FeasibleSet::euclidean_ball(Vector center, double radius) {
  FeasibleSet s;
  s.kind = Kind::euclidean_ball;
  s.center = std::move(center);
  s.radius = radius;
  return s;
}

void FeasibleSet::validate(Eigen::Index d) const {
  switch (kind) {
    case Kind::all_space:
      return;
    case Kind::box:
      if (lo.size() != d || hi.size() != d) {
        throw ParameterError(fmt::format("box bounds have {}/{} entries, expected {}", lo.size(),
                                         hi.size(), d));
      }
      for (Eigen::Index i = 0; i < d; ++i) {
        if (!(lo[i] <= hi[i]) || std::isnan(lo[i]) || std::isnan(hi[i])) {
          throw ParameterError(
              fmt::format("box has lo > hi in coordinate {} ({} > {})", i, lo[i], hi[i]));
        }
      }
      return;
    case Kind::euclidean_ball:
      if (center.size() != d) {
        throw ParameterError(
            fmt::format("ball center has {} entries, expected {}", center.size(), d));
      }
      if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw ParameterError(fmt::format("ball radius must be positive, got {}", radius));
      }
      if (!center.allFinite()) throw ParameterError("ball center has non-finite entries");
      return;
    case Kind::simplex:
      if (d < 1) throw ParameterError("simplex needs dimension >= 1");
      return;
  }
}

double FeasibleSet::diameter(double r, Eigen::Index d) const {
  switch (kind) {
    case Kind::all_space:
      return kInf;
    case Kind::box:
      if (!lo.allFinite() || !hi.allFinite()) return kInf;
      return qnorm(hi - lo, r);
    case Kind::euclidean_ball: {
      // sup ||v||_r over the unit 2-ball is d^(1/r - 1/2) for r <= 2, and 1 for r >= 2.
      const double factor =
          r <= 2.0 ? std::pow(static_cast<double>(d), 1.0 / r - 0.5) : 1.0;
      return 2.0 * radius * factor;
    }
    case Kind::simplex:
      if (d < 2) return 0.0;
      return std::isinf(r) ? 1.0 : std::pow(2.0, 1.0 / r);
  }
  return kInf;
}

bool FeasibleSet::contains(VectorRef x, double tol) const {
  if (!x.allFinite()) return false;
  switch (kind) {
    case Kind::all_space:
      return true;
    case Kind::box:
      return x.size() == lo.size() && ((x - lo).array() >= -tol).all() &&
             ((hi - x).array() >= -tol).all();
    case Kind::euclidean_ball:
      return x.size() == center.size() && (x - center).norm() <= radius + tol;
    case Kind::simplex:
      return (x.array() >= -tol).all() && std::abs(x.sum() - 1.0) <= tol;
  }
  return false;
}

std::string FeasibleSet::name() const {
  switch (kind) {
    case Kind::all_space:
      return "all_space";
    case Kind::box:
      return "box";
    case Kind::euclidean_ball:
      return "euclidean_ball";
    case Kind::simplex:
      return "simplex";
  }
  return "unknown";
}

Vector project(const FeasibleSet& set, VectorRef y) {
  set.validate(y.size());
  if (!y.allFinite()) throw DomainError("cannot project a point with non-finite entries");
  switch (set.kind) {
    case FeasibleSet::Kind::all_space:
      return y;
    case FeasibleSet::Kind::box:
      return y.cwiseMax(set.lo).cwiseMin(set.hi);
    case FeasibleSet::Kind::euclidean_ball: {
      const Vector offset = y - set.center;
      const double n = offset.norm();
      if (n <= set.radius) return y;
      return set.center + offset * (set.radius / n);
    }
    case FeasibleSet::Kind::simplex: {
      std::vector<double> sorted(y.data(), y.data() + y.size());
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      double cumulative = 0.0;
      double threshold = 0.0;
      for (std::size_t k = 0; k < sorted.size(); ++k) {
        cumulative += sorted[k];
        const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (sorted[k] - candidate > 0.0) threshold = candidate;
      }
      return (y.array() - threshold).max(0.0).matrix();
    }
  }
  return y;
}

}  // namespace spsaa
