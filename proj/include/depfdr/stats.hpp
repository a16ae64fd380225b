#pragma once

// Summary statistics used by the experiment harness: moments, normality
// shape diagnostics, Kolmogorov-Smirnov distance, quantiles, and a log-log
// slope fit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/normal.hpp>

namespace depfdr::stats {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>{}, p);
}

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

/// Unbiased sample variance.
inline double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("variance needs at least two values");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

/// Standard error of the mean.
inline double standard_error(std::span<const double> xs) {
  return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

inline double root_mean_square(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("rms of empty sample");
  double s = 0.0;
  for (double x : xs) s += x * x;
  return std::sqrt(s / static_cast<double>(xs.size()));
}

/// Moment-based skewness g1; zero for a constant sample.
inline double skewness(std::span<const double> xs) {
  const double m = mean(xs);
  double m2 = 0.0, m3 = 0.0;
  for (double x : xs) {
    const double d = x - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  const auto n = static_cast<double>(xs.size());
  m2 /= n;
  m3 /= n;
  if (m2 <= 0.0) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

/// Moment-based excess kurtosis g2; zero for a constant sample.
inline double excess_kurtosis(std::span<const double> xs) {
  const double m = mean(xs);
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - m;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const auto n = static_cast<double>(xs.size());
  m2 /= n;
  m4 /= n;
  if (m2 <= 0.0) return 0.0;
  return m4 / (m2 * m2) - 3.0;
}

/// Correlation between sorted sample and Blom normal scores. NaN for a
/// constant sample.
inline double qq_correlation(std::span<const double> xs) {
  if (xs.size() < 3) throw std::invalid_argument("qq_correlation needs at least three values");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  std::vector<double> scores(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    scores[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (n + 0.25));
  const double mx = mean(sorted), my = mean(scores);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    sxy += (sorted[i] - mx) * (scores[i] - my);
    sxx += (sorted[i] - mx) * (sorted[i] - mx);
    syy += (scores[i] - my) * (scores[i] - my);
  }
  if (sxx <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

/// Linear-interpolation quantile (type 7).
inline double quantile(std::span<const double> xs, double p) {
  if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// sup_z |F_emp(z) - F(z)|. `cdf_left` gives the left limit F(z-), which
/// matters when F has atoms.
template <class Cdf, class CdfLeft>
double ks_distance(std::span<const double> xs, Cdf cdf, CdfLeft cdf_left) {
  if (xs.empty()) throw std::invalid_argument("ks_distance of empty sample");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double below = static_cast<double>(i) / n;
    const double at = static_cast<double>(j) / n;
    d = std::max({d, std::abs(at - cdf(sorted[i])), std::abs(below - cdf_left(sorted[i]))});
    i = j;
  }
  return d;
}

template <class Cdf>
double ks_distance(std::span<const double> xs, Cdf cdf) {
  return ks_distance(xs, cdf, cdf);
}

struct LinearFit {
  double slope;
  double intercept;
};

inline LinearFit least_squares(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("least_squares needs two equally long series of length >= 2");
  const double mx = mean(xs), my = mean(ys);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx <= 0.0) throw std::invalid_argument("least_squares: abscissae are all equal");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

/// Slope of log(y) against log(x).
inline double log_log_slope(std::span<const double> xs, std::span<const double> ys) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  return least_squares(lx, ly).slope;
}

/// Shape diagnostics of a sample against the normal family.
struct NormalityDiagnostic {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double qq_correlation = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;  // zero spread; shape statistics undefined
};

inline NormalityDiagnostic normality(std::span<const double> xs) {
  NormalityDiagnostic d;
  d.count = xs.size();
  d.mean = stats::mean(xs);
  d.sd = std::sqrt(stats::variance(xs));
  if (d.sd <= 0.0) {
    d.degenerate = true;
    return d;
  }
  d.skewness = stats::skewness(xs);
  d.excess_kurtosis = stats::excess_kurtosis(xs);
  d.qq_correlation = stats::qq_correlation(xs);
  return d;
}

}  // namespace depfdr::stats
