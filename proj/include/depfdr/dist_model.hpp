#pragma once

// Alternative p-value laws and the two-component population model.
//
// Under a true null a p-value is uniform(0,1); under a false null it has CDF G
// with a bounded density g. The population mixture is
//     F(t) = pi0 * t + pi1 * G(t),   f(t) = pi0 + pi1 * g(t),
// and the constants that govern the BH procedure follow from it:
//     alpha_star = 1 / f(0)                          (criticality level)
//     nu_root(s) = sup{t in [0,1] : t*s/alpha <= F(t)}  (nu0 at s=1, nu_star at s=pi0)
//     c0         = -f'(0) / (2 sqrt(f(0)))           (boundary-law scale)

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace depfdr {

/// Numerical knobs of this module.
struct ModelTolerances {
  std::size_t root_scan_points = 4096;
  double root_tolerance = 1e-12;
  double slope_step = 1e-6;
};

/// Closed-form family g(x) = a(1+a)^2/(x+a)^2 - a on [0,1]. g(1) = 0 and
/// g(0) = (1+a)^2/a - a; a = 1/98 gives g(0) = 100.
namespace paper_family {

inline void check_args(double x, double a) {
  if (!(a > 0.0)) throw std::domain_error("alternative shape a must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("argument must lie in [0,1]");
}

inline double density(double x, double a) {
  check_args(x, a);
  const double b = 1.0 + a;
  return a * b * b / ((x + a) * (x + a)) - a;
}

/// G(x) = (1+a)^2 x/(x+a) - a x, equivalently 1 - a(1-x)^2/(x+a); the second
/// form is used on the upper half so that G(1) = 1 exactly.
inline double cdf(double x, double a) {
  check_args(x, a);
  if (x >= 0.5) return std::clamp(1.0 - a * (1.0 - x) * (1.0 - x) / (x + a), 0.0, 1.0);
  const double b = 1.0 + a;
  return std::clamp(b * b * x / (x + a) - a * x, 0.0, 1.0);
}

/// g'(x) = -2a(1+a)^2/(x+a)^3.
inline double density_slope(double x, double a) {
  check_args(x, a);
  const double b = 1.0 + a;
  return -2.0 * a * b * b / ((x + a) * (x + a) * (x + a));
}

/// Smallest x with G(x) >= u: the small root of a x^2 - (1 + 2a - u) x + u a = 0.
inline double inverse(double u, double a) {
  if (!(a > 0.0)) throw std::domain_error("alternative shape a must be positive");
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("probability must lie in [0,1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  if (u >= 0.5) {
    // Near u = 1 the small root is ill-conditioned; solve for y = 1 - x from
    // a y^2 + v y - v(1+a) = 0 with v = 1 - u instead.
    const double v = 1.0 - u;
    const double y = 2.0 * v * (1.0 + a) / (v + std::sqrt(v * v + 4.0 * a * v * (1.0 + a)));
    return std::clamp(1.0 - y, 0.0, 1.0);
  }
  const double lin = 1.0 + 2.0 * a - u;
  const double disc = lin * lin - 4.0 * a * a * u;
  if (disc >= 0.0) {
    // Rationalized small root; no cancellation when a*u is tiny.
    return std::clamp(2.0 * u * a / (lin + std::sqrt(disc)), 0.0, 1.0);
  }
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid, a) >= u ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace paper_family

enum class AlternativeFamily { paper, tabulated };

/// The p-value law under false nulls.
class AlternativeDistribution {
 public:
  static AlternativeDistribution paper(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw std::domain_error("alternative shape a must be positive");
    AlternativeDistribution d;
    d.family_ = AlternativeFamily::paper;
    d.shape_ = a;
    return d;
  }

  /// Piecewise-linear CDF through (knots[i], cdf[i]); knots must start at 0 and
  /// end at 1, cdf must run from 0 to 1 and be nondecreasing.
  static AlternativeDistribution tabulated(std::vector<double> knots, std::vector<double> cdf) {
    if (knots.size() < 2 || knots.size() != cdf.size())
      throw std::invalid_argument("tabulated alternative needs matching knot and CDF arrays of length >= 2");
    if (knots.front() != 0.0 || knots.back() != 1.0)
      throw std::invalid_argument("tabulated alternative knots must span [0,1]");
    if (cdf.front() != 0.0 || cdf.back() != 1.0)
      throw std::invalid_argument("tabulated alternative CDF must run from 0 to 1");
    for (std::size_t i = 1; i < knots.size(); ++i) {
      if (!(knots[i] > knots[i - 1])) throw std::invalid_argument("tabulated knots must increase strictly");
      if (cdf[i] < cdf[i - 1]) throw std::invalid_argument("tabulated CDF must be nondecreasing");
    }
    AlternativeDistribution d;
    d.family_ = AlternativeFamily::tabulated;
    d.knots_ = std::move(knots);
    d.table_ = std::move(cdf);
    return d;
  }

  AlternativeFamily family() const { return family_; }
  double shape() const { return shape_; }

  double density(double x) const {
    if (family_ == AlternativeFamily::paper) return paper_family::density(x, shape_);
    check_unit(x);
    const std::size_t seg = segment(x);
    return (table_[seg + 1] - table_[seg]) / (knots_[seg + 1] - knots_[seg]);
  }

  double cdf(double x) const {
    if (family_ == AlternativeFamily::paper) return paper_family::cdf(x, shape_);
    check_unit(x);
    const std::size_t seg = segment(x);
    const double w = (x - knots_[seg]) / (knots_[seg + 1] - knots_[seg]);
    return table_[seg] + w * (table_[seg + 1] - table_[seg]);
  }

  double inverse(double u) const {
    if (family_ == AlternativeFamily::paper) return paper_family::inverse(u, shape_);
    if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("probability must lie in [0,1]");
    if (u == 0.0) return 0.0;
    // First segment whose right end reaches u.
    const auto it = std::lower_bound(table_.begin() + 1, table_.end(), u);
    const auto seg = static_cast<std::size_t>(it - table_.begin()) - 1;
    const double rise = table_[seg + 1] - table_[seg];
    if (rise <= 0.0) return knots_[seg + 1];
    return knots_[seg] + (u - table_[seg]) / rise * (knots_[seg + 1] - knots_[seg]);
  }

  /// g'(0): analytic for the closed-form family, otherwise a forward
  /// difference of g with the given step.
  double density_slope_at_zero(double step = ModelTolerances{}.slope_step) const {
    if (family_ == AlternativeFamily::paper) return paper_family::density_slope(0.0, shape_);
    return (density(step) - density(0.0)) / step;
  }

  std::string describe() const {
    if (family_ == AlternativeFamily::paper) return "paper(a=" + std::to_string(shape_) + ")";
    return "tabulated(" + std::to_string(knots_.size()) + " knots)";
  }

 private:
  AlternativeDistribution() = default;

  static void check_unit(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("argument must lie in [0,1]");
  }

  std::size_t segment(double x) const {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const auto idx = static_cast<std::size_t>(it - knots_.begin());
    return std::min(idx == 0 ? 0 : idx - 1, knots_.size() - 2);
  }

  AlternativeFamily family_ = AlternativeFamily::paper;
  double shape_ = 1.0 / 98.0;
  std::vector<double> knots_;
  std::vector<double> table_;
};

/// Mixture of uniform nulls (weight pi0) and the alternative (weight pi1) at
/// control level alpha. Immutable; derived constants are computed on
/// construction.
class PopulationModel {
 public:
  PopulationModel(double pi0, AlternativeDistribution alternative, double alpha,
                  ModelTolerances tolerances = {})
      : pi0_(pi0), alternative_(std::move(alternative)), alpha_(alpha), tol_(tolerances) {
    if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw std::domain_error("pi0 must lie in [0,1]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0,1)");
    alpha_star_ = 1.0 / mixture_density(0.0);
    nu0_ = nu_root(1.0);
    nu_star_ = pi0_ > 0.0 ? nu_root(pi0_) : 1.0;
  }

  /// The default setting: pi0 = 1/2, a = 1/98, alpha = 0.1.
  static PopulationModel paper_default(double alpha = 0.1, double pi0 = 0.5, double a = 1.0 / 98.0) {
    return {pi0, AlternativeDistribution::paper(a), alpha};
  }

  PopulationModel with_alpha(double alpha) const { return {pi0_, alternative_, alpha, tol_}; }

  double pi0() const { return pi0_; }
  double pi1() const { return 1.0 - pi0_; }
  double alpha() const { return alpha_; }
  const AlternativeDistribution& alternative() const { return alternative_; }
  const ModelTolerances& tolerances() const { return tol_; }

  double mixture_cdf(double t) const { return pi0_ * t + pi1() * alternative_.cdf(t); }
  double mixture_density(double t) const { return pi0_ + pi1() * alternative_.density(t); }
  /// Lambda(t) = E Lambda_n(t) = t pi0.
  double null_mass(double t) const { return t * pi0_; }
  /// Delta(t) = E Delta_n(t) = G(t) pi1.
  double alternative_mass(double t) const { return alternative_.cdf(t) * pi1(); }

  double alpha_star() const { return alpha_star_; }
  double nu0() const { return nu0_; }
  double nu_star() const { return nu_star_; }

  /// sup{t in [0,1] : t * scale / alpha <= F(t)}.
  double nu_root(double scale) const {
    if (!(scale > 0.0 && scale <= 1.0)) throw std::domain_error("nu_root scale must lie in (0,1]");
    if (alternative_.family() == AlternativeFamily::paper && pi1() > 0.0) return nu_root_closed_form(scale);
    return nu_root_scan(scale);
  }

  /// Grid scan for the last point where F(t) - t*scale/alpha >= 0, refined by
  /// bisection. Valid for any alternative.
  double nu_root_scan(double scale) const {
    const double slope = scale / alpha_;
    const auto gap = [&](double t) { return mixture_cdf(t) - t * slope; };
    const std::size_t m = tol_.root_scan_points;
    std::size_t last = 0;
    for (std::size_t i = 0; i <= m; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(m);
      if (gap(t) >= 0.0) last = i;
    }
    if (last == m) return 1.0;
    double lo = static_cast<double>(last) / static_cast<double>(m);
    double hi = static_cast<double>(last + 1) / static_cast<double>(m);
    while (hi - lo > tol_.root_tolerance) {
      const double mid = 0.5 * (lo + hi);
      (gap(mid) >= 0.0 ? lo : hi) = mid;
    }
    return lo;
  }

  /// -f'(0) / (2 sqrt(f(0))); requires f'(0) < 0.
  double c0() const {
    const double slope = pi1() * alternative_.density_slope_at_zero(tol_.slope_step);
    if (!(slope < 0.0))
      throw std::domain_error("c0 requires f'(0) < 0; the mixture density is not decreasing at 0");
    return -slope / (2.0 * std::sqrt(mixture_density(0.0)));
  }

  /// alpha_star^{-1} > alpha^{-1} > f(nu0): the regime of the linear expansion.
  bool supercritical_chain_holds() const {
    return 1.0 / alpha_star_ > 1.0 / alpha_ && 1.0 / alpha_ > mixture_density(nu0_);
  }

 private:
  // For the closed-form family G(t)/t = (1+a)^2/(t+a) - a decreases from g(0)
  // to 1, so t*scale/alpha = F(t) has the single root
  //     t = (1+a)^2/(k+a) - a,  k = (scale/alpha - pi0)/pi1.
  double nu_root_closed_form(double scale) const {
    const double a = alternative_.shape();
    const double k = (scale / alpha_ - pi0_) / pi1();
    if (k <= 1.0) return 1.0;
    const double t = (1.0 + a) * (1.0 + a) / (k + a) - a;
    return std::clamp(t, 0.0, 1.0);
  }

  double pi0_;
  AlternativeDistribution alternative_;
  double alpha_;
  ModelTolerances tol_;
  double alpha_star_ = 1.0;
  double nu0_ = 0.0;
  double nu_star_ = 0.0;
};

}  // namespace depfdr
