#include "spsaa/harness/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/hypergeometric.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "spsaa/errors.hpp"

namespace spsaa::harness {

LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) {
    throw ParameterError(fmt::format("slope fit needs at least 3 points, got {}", points.size()));
  }
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& [n, mean] : points) {
    if (!(n > 0.0) || !(mean > 0.0) || !std::isfinite(mean)) {
      throw ParameterError(fmt::format("slope fit needs positive values, got ({}, {})", n, mean));
    }
    lx.push_back(std::log(n));
    ly.push_back(std::log(mean));
  }
  const double k = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / k;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw ParameterError("slope fit needs at least two distinct N values");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return fit;
}

Summary summarize(std::vector<double> values, const std::vector<double>& levels) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const double k = static_cast<double>(values.size());
  // Sorting first makes the floating-point sum order-independent.
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / k;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / (k - 1.0) / k);
  }
  std::vector<double> sorted_levels = levels;
  std::sort(sorted_levels.begin(), sorted_levels.end());
  for (double level : sorted_levels) {
    const double pos = level * (k - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    s.quantiles.emplace_back(level, values[lo] + frac * (values[hi] - values[lo]));
  }
  return s;
}

Interval clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence) {
  if (n == 0 || k > n) throw ParameterError(fmt::format("invalid binomial count {}/{}", k, n));
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ParameterError(fmt::format("confidence must lie in (0, 1), got {}", confidence));
  }
  const double alpha = 1.0 - confidence;
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  Interval ci;
  ci.lo = k == 0 ? 0.0 : boost::math::ibeta_inv(kd, nd - kd + 1.0, alpha / 2.0);
  ci.hi = k == n ? 1.0 : boost::math::ibeta_inv(kd + 1.0, nd - kd, 1.0 - alpha / 2.0);
  return ci;
}

double fisher_greater_pvalue(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2,
                             std::uint64_t n2) {
  if (k1 > n1 || k2 > n2 || n1 == 0 || n2 == 0) {
    throw ParameterError(fmt::format("invalid counts {}/{} and {}/{}", k1, n1, k2, n2));
  }
  const std::uint64_t successes = k1 + k2;
  if (successes == 0) return 1.0;
  // Given the margins, k1 is hypergeometric; large k1 favors p1 > p2.
  boost::math::hypergeometric_distribution<double> h(successes, n1, n1 + n2);
  const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(successes) -
                                                static_cast<std::int64_t>(n2));
  if (static_cast<std::int64_t>(k1) <= lo) return 1.0;
  return boost::math::cdf(boost::math::complement(h, k1 - 1));
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ParameterError("spearman correlation needs two equal-length samples of size >= 2");
  }
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double k = static_cast<double>(x.size());
  const double m = (k + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - m) * (ry[i] - m);
    sxx += (rx[i] - m) * (rx[i] - m);
    syy += (ry[i] - m) * (ry[i] - m);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace spsaa::harness
