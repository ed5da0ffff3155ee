#include "spsaa/geometry.hpp"

#include <cmath>
#include <fmt/format.h>

#include "spsaa/errors.hpp"

namespace spsaa {

namespace {

constexpr double kGradientFloor = 1e-300;

void require_same_dimension(VectorRef x, VectorRef anchor) {
  if (x.size() != anchor.size()) {
    throw ParameterError(fmt::format("dimension mismatch: point has {} entries, anchor has {}",
                                     x.size(), anchor.size()));
  }
}

}  // namespace

double qnorm(VectorRef v, double q) {
  if (std::isnan(q) || q < 1.0) {
    throw ParameterError(fmt::format("norm exponent must be >= 1, got {}", q));
  }
  double largest = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw DomainError(fmt::format("non-finite entry at index {}", i));
    }
    largest = std::max(largest, std::abs(v[i]));
  }
  if (largest == 0.0 || std::isinf(q)) return largest;
  if (q == 1.0) return v.lpNorm<1>();
  if (q == 2.0) return v.norm();

  // Scale by the largest magnitude so |v_i|^q cannot overflow.
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    sum += std::pow(std::abs(v[i]) / largest, q);
  }
  return largest * std::pow(sum, 1.0 / q);
}

double dual_exponent(double q) {
  if (std::isnan(q) || q < 1.0) {
    throw ParameterError(fmt::format("norm exponent must be >= 1, got {}", q));
  }
  if (q == 1.0) return kInf;
  if (std::isinf(q)) return 1.0;
  return q / (q - 1.0);
}

GeometryConfig GeometryConfig::make(double q, double q_prime, Vector anchor) {
  if (!std::isfinite(q) || q < 1.0) {
    throw ParameterError(fmt::format("geometry requires a finite q >= 1, got {}", q));
  }
  if (!(q_prime > 1.0 && q_prime <= 2.0)) {
    throw ParameterError(fmt::format("q' must lie in (1, 2], got {}", q_prime));
  }
  if (q_prime > q) {
    throw ParameterError(fmt::format("q' = {} exceeds q = {}", q_prime, q));
  }
  if (!anchor.allFinite()) throw DomainError("anchor has non-finite entries");
  return GeometryConfig(q, q_prime, std::move(anchor));
}

double half_squared_norm(VectorRef u, double r) {
  const double n = qnorm(u, r);
  return 0.5 * n * n;
}

Vector half_squared_norm_gradient(VectorRef u, double r) {
  if (!(r > 1.0)) {
    throw ParameterError(fmt::format("gradient of 0.5||.||_r^2 needs r > 1, got {}", r));
  }
  const double n = qnorm(u, r);
  Vector g = Vector::Zero(u.size());
  if (n < kGradientFloor) return g;
  if (r == 2.0) return u;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i] == 0.0) continue;
    const double ratio = std::abs(u[i]) / n;
    g[i] = std::copysign(n * std::pow(ratio, r - 1.0), u[i]);
  }
  return g;
}

double regularizer_value(VectorRef x, VectorRef anchor, double q_prime) {
  require_same_dimension(x, anchor);
  return half_squared_norm(x - anchor, q_prime);
}

double regularizer_value(VectorRef x, const GeometryConfig& cfg) {
  return regularizer_value(x, cfg.anchor(), cfg.q_prime());
}

Vector regularizer_gradient(VectorRef x, VectorRef anchor, double q_prime) {
  if (!(q_prime > 1.0)) {
    throw ParameterError(fmt::format("regularizer gradient needs q' > 1, got {}", q_prime));
  }
  require_same_dimension(x, anchor);
  return half_squared_norm_gradient(x - anchor, q_prime);
}

Vector regularizer_gradient(VectorRef x, const GeometryConfig& cfg) {
  return regularizer_gradient(x, cfg.anchor(), cfg.q_prime());
}

Vector regularizer_gradient_inverse(VectorRef y, VectorRef anchor, double q_prime) {
  if (!(q_prime > 1.0)) {
    throw ParameterError(fmt::format("regularizer gradient needs q' > 1, got {}", q_prime));
  }
  require_same_dimension(y, anchor);
  const double conjugate = dual_exponent(q_prime);
  return anchor + half_squared_norm_gradient(y, conjugate);
}

double one_norm_surrogate_exponent(Eigen::Index d) {
  if (d < 2) {
    throw ParameterError(fmt::format("1-norm surrogate needs dimension >= 2, got {}", d));
  }
  return 1.0 + 1.0 / std::log(static_cast<double>(d));
}

}  // namespace spsaa
