#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "spsaa/geometry.hpp"

namespace spsaa {

/// Row j holds scenario j; rows are contiguous.
using ScenarioMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Scenario families. Every family is a product of independent coordinates.

struct Gaussian {
  Vector mean;
  Vector std;
};

/// location + Exp(rate) per coordinate.
struct Exponential {
  Vector rate;
  Vector location;
};

/// location + scale * Pareto(tail_index), optionally shifted to mean zero
/// (so the coordinate mean equals location).
struct Pareto {
  double tail_index;
  Vector scale;
  Vector location;
  bool centered;
};

/// location + scale * t(dof).
struct StudentT {
  double dof;
  Vector scale;
  Vector location;
};

/// Deterministic scenario; the zero-variance case.
struct PointMass {
  Vector location;
};

class DistSpec {
 public:
  using Family = std::variant<Gaussian, Exponential, Pareto, StudentT, PointMass>;

  /// Validates parameters; throws ParameterError on a violated invariant.
  explicit DistSpec(Family family);

  const Family& family() const { return family_; }
  Eigen::Index dimension() const { return dimension_; }
  std::string family_name() const;

  Vector mean() const;
  /// Per-coordinate variance.
  Vector variance() const;
  /// Smallest point of the support of coordinate i (-inf if unbounded).
  double support_lower(Eigen::Index i) const;
  double cdf(Eigen::Index i, double t) const;
  double quantile(Eigen::Index i, double u) const;

  /// Copy with every coordinate translated by `shift`.
  DistSpec shifted(VectorRef shift) const;

 private:
  Family family_;
  Eigen::Index dimension_;
};

DistSpec gaussian(Eigen::Index d, double mean, double std);
DistSpec exponential(Eigen::Index d, double rate);
DistSpec pareto(Eigen::Index d, double tail_index, double scale, bool centered);
DistSpec student_t(Eigen::Index d, double dof, double scale);
DistSpec point_mass(Vector location);

/// Deterministic random stream addressed by (master seed, path).
///
/// The generator is seeded from every element of the address, so two streams
/// with the same address produce the same draws regardless of when or on which
/// thread they are consumed.
class RngStream {
 public:
  using Engine = std::mt19937_64;

  explicit RngStream(std::uint64_t master_seed, std::vector<std::uint64_t> path = {})
      : master_seed_(master_seed), path_(std::move(path)) {}

  std::uint64_t master_seed() const { return master_seed_; }
  const std::vector<std::uint64_t>& path() const { return path_; }

  RngStream child(std::uint64_t tag) const;
  Engine engine() const;
  /// "seed/p0/p1/..."
  std::string address() const;

  bool operator==(const RngStream&) const = default;

 private:
  std::uint64_t master_seed_;
  std::vector<std::uint64_t> path_;
};

/// n i.i.d. draws, one per row.
ScenarioMatrix sample(const DistSpec& spec, const RngStream& stream, Eigen::Index n);

enum class TailKind { subgaussian, subexponential, pth_moment };

struct TailClass {
  TailKind kind;
  /// Moment order for pth_moment (the tail index / degrees of freedom).
  double order = kInf;
  /// Tail constant phi for subgaussian / subexponential classes, when it is
  /// available in closed form for the centered coordinates.
  std::optional<double> phi;

  std::string name() const;
};

TailClass tail_class(const DistSpec& spec);

struct MomentParameters {
  double order;
  /// max_i ||xi_i - E xi_i||_{L^p}.
  double phi_p;
  /// d^{2/p} * phi_p^2, the aggregate bound on E||xi - E xi||_p^2.
  double sigma_p_sq;
  /// d^{1/p} * phi_p, bound on || ||xi - E xi||_p ||_{L^p}.
  double psi_p;
  /// E||xi - E xi||_2^2 (exact).
  double total_variance;
  /// Tail parameter for light-tailed families.
  std::optional<double> tail_phi;
};

/// Throws ParameterError when the p-th moment does not exist.
MomentParameters moment_parameters(const DistSpec& spec, double p);

/// E|X - E X|^p for one coordinate (exact where a closed form exists, else
/// tanh-sinh quadrature).
double central_absolute_moment(const DistSpec& spec, Eigen::Index i, double p);

}  // namespace spsaa
