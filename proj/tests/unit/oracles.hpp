#pragma once

// Independent reference computations for the unit and acceptance suites.
// Nothing here calls into the library code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

namespace detail {
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                           double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}
}  // namespace detail

/// Adaptive Simpson quadrature.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  if (b <= a) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, 60);
}

/// Root of an increasing function on [lo, hi] by bisection.
inline double bisect_increasing(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) >= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

/// The alternative density, typed in independently of the library.
inline double g(double x, double a) { return a * (1.0 + a) * (1.0 + a) / ((x + a) * (x + a)) - a; }

/// G(x) by quadrature of g.
inline double G_quadrature(double x, double a) { return integrate([a](double t) { return g(t, a); }, 0.0, x); }

/// i-th order statistic (1-based) with X_(0) = 0 and X_(n+1) = 1.
inline double order_stat(std::vector<double> x, std::size_t i) {
  if (i == 0) return 0.0;
  if (i == x.size() + 1) return 1.0;
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(i - 1), x.end());
  return x[i - 1];
}

/// R = max{i in 0..n+1 : X_(i) <= alpha i / n}, by exhaustive evaluation.
inline std::size_t bh_count(const std::vector<double>& x, double alpha) {
  const std::size_t n = x.size();
  std::size_t best = 0;
  for (std::size_t i = 0; i <= n + 1; ++i)
    if (order_stat(x, i) <= alpha * static_cast<double>(i) / static_cast<double>(n)) best = i;
  return best;
}

struct Counts {
  std::size_t at_most = 0, nulls = 0, alts_above = 0, n = 0;
};

inline Counts count(const std::vector<std::uint8_t>& h, const std::vector<double>& x, double t) {
  Counts c;
  c.n = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= t) {
      ++c.at_most;
      if (h[i] == 0) ++c.nulls;
    } else if (h[i] == 1) {
      ++c.alts_above;
    }
  }
  return c;
}

/// sup{t in [0,1] : t/alpha <= F_n(t)} by checking every candidate point: the
/// sup is attained either at 1 or at some alpha*k/n.
inline double nu_sup_candidates(const std::vector<double>& x, double level) {
  const auto n = static_cast<double>(x.size());
  const auto Fn = [&](double t) {
    return static_cast<double>(std::count_if(x.begin(), x.end(), [t](double v) { return v <= t; })) / n;
  };
  double best = 0.0;
  if (1.0 / level <= Fn(1.0)) best = 1.0;
  for (std::size_t k = 0; k <= x.size(); ++k) {
    const double t = std::min(1.0, level * static_cast<double>(k) / n);
    if (t / level <= Fn(t) + 1e-15) best = std::max(best, t);
  }
  return best;
}

}  // namespace oracle
