#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace spsaa::harness {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of ln(mean) on ln(N). Needs >= 3 points with
/// positive N and mean.
LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double std_error = 0.0;
  /// (level, value) pairs in increasing level order.
  std::vector<std::pair<double, double>> quantiles;
};

inline const std::vector<double> kQuantileLevels{0.1, 0.5, 0.9};

/// Mean, standard error and linearly interpolated quantiles. The result does
/// not depend on the order of `values`.
Summary summarize(std::vector<double> values, const std::vector<double>& levels = kQuantileLevels);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Exact two-sided Clopper-Pearson interval for k successes in n trials.
Interval clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence = 0.95);

/// One-sided Fisher exact test p-value for H1: p1 > p2.
double fisher_greater_pvalue(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2,
                             std::uint64_t n2);

/// Spearman rank correlation with average ranks for ties.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace spsaa::harness
