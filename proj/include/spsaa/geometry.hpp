#pragma once

#include <Eigen/Dense>
#include <limits>

namespace spsaa {

using Vector = Eigen::VectorXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// (sum |v_i|^q)^(1/q); max |v_i| for q = +inf. Throws DomainError on a
/// non-finite entry and ParameterError for q < 1.
double qnorm(VectorRef v, double q);

/// Hoelder conjugate q/(q-1); +inf for q = 1.
double dual_exponent(double q);

/// Norm exponent q, regularizer exponent q' and anchor x0.
///
/// Constructed only through make(), which enforces 1 < q' <= min(q, 2) and a
/// finite q.
class GeometryConfig {
 public:
  static GeometryConfig make(double q, double q_prime, Vector anchor);

  double q() const { return q_; }
  double dual_q() const { return dual_exponent(q_); }
  double q_prime() const { return q_prime_; }
  const Vector& anchor() const { return anchor_; }
  Eigen::Index dimension() const { return anchor_.size(); }

 private:
  GeometryConfig(double q, double q_prime, Vector anchor)
      : q_(q), q_prime_(q_prime), anchor_(std::move(anchor)) {}

  double q_;
  double q_prime_;
  Vector anchor_;
};

/// 0.5 * ||u||_r^2.
double half_squared_norm(VectorRef u, double r);

/// Gradient of 0.5 * ||u||_r^2 for r > 1:
///   ||u||_r^(2-r) * sign(u_i) * |u_i|^(r-1).
/// Zero when ||u||_r < 1e-300.
Vector half_squared_norm_gradient(VectorRef u, double r);

/// V_{q'}(x) = 0.5 * ||x - x0||_{q'}^2.
double regularizer_value(VectorRef x, const GeometryConfig& cfg);
double regularizer_value(VectorRef x, VectorRef anchor, double q_prime);

Vector regularizer_gradient(VectorRef x, const GeometryConfig& cfg);
Vector regularizer_gradient(VectorRef x, VectorRef anchor, double q_prime);

/// Inverse of the map x -> grad V_{q'}(x): returns x with grad V_{q'}(x) = y.
/// Uses that the inverse of grad(0.5||.||_{q'}^2) is grad(0.5||.||_{r}^2) with
/// r the conjugate of q'.
Vector regularizer_gradient_inverse(VectorRef y, VectorRef anchor, double q_prime);

/// 1 + 1/ln d, the exponent whose norm is within a factor e of the 1-norm.
double one_norm_surrogate_exponent(Eigen::Index d);

}  // namespace spsaa
