#pragma once

// Benjamini-Hochberg step-up and the plug-in procedure.
//
// Both rules reduce to the same primitive: for a level c > 0,
//     sup{t in [0,1] : t / c <= F_n(t)} = min(1, c k*/n),
//     k* = max{k in 0..n : X_(k) <= c k / n},   X_(0) = 0,
// because F_n only moves at the order statistics. BH uses c = alpha and
// rejects the k* smallest p-values; the plug-in rule uses c = alpha / pi0_hat.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "depfdr/empirical_proc.hpp"

namespace depfdr {

struct ProcedureConfig {
  double alpha = 0.1;
  /// Plug-in bandwidth b = bandwidth_constant * n^{-1/3}, clipped to (0, 1/2].
  double bandwidth_constant = 1.0;
  bool pi0_clip = true;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0,1)");
    if (!(bandwidth_constant > 0.0)) throw std::domain_error("bandwidth constant must be positive");
  }

  double bandwidth(std::size_t n) const {
    return std::min(0.5, bandwidth_constant * std::cbrt(1.0 / static_cast<double>(n)));
  }
};

enum class Procedure { bh, plugin };

inline std::string to_string(Procedure p) { return p == Procedure::bh ? "bh" : "plugin"; }

struct Accounting {
  std::size_t V = 0;
  double FDP = 0.0;
  double FNP = 0.0;
};

struct TestResult {
  Procedure procedure = Procedure::bh;
  std::size_t n = 0;
  double alpha = 0.0;
  std::size_t R = 0;
  std::vector<std::uint8_t> rejected;
  /// Largest rejected p-value; 0 when nothing is rejected.
  double threshold = 0.0;
  /// nu_BH or nu_PI.
  double nu = 0.0;
  double pi0_hat_raw = 1.0;
  double pi0_hat = 1.0;
  double bandwidth = 0.0;
  /// k* of the sup computation; equals R for BH.
  std::size_t step_level = 0;
  /// Plug-in only: the floor formula for R_PI disagreed with k*.
  bool floor_discrepancy = false;
  /// Filled when truth labels are known, or trivially when R = 0.
  std::optional<std::size_t> V;
  std::optional<double> FDP;
  std::optional<double> FNP;
};

struct SupCrossing {
  std::size_t level_index = 0;  // k*
  double nu = 0.0;
};

/// sup{t in [0,1] : t / level <= F_n(t)} and the step level attaining it.
inline SupCrossing sup_crossing(const PValueSample& s, double level) {
  if (!(level > 0.0)) throw std::domain_error("crossing level must be positive");
  const std::size_t n = s.size();
  const auto nd = static_cast<double>(n);
  const auto& x = s.sorted();
  std::size_t k = n;
  while (k > 0 && !(x[k - 1] <= level * static_cast<double>(k) / nd)) --k;
  return {k, std::min(1.0, level * static_cast<double>(k) / nd)};
}

/// nu_BH = sup{t in [0,1] : t/alpha <= F_n(t)}; satisfies R <= n nu_BH/alpha < R+1.
inline double nu_bh_empirical(const PValueSample& s, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0,1)");
  return sup_crossing(s, alpha).nu;
}

/// V, FDP = V/(R v 1) and FNP = #{accepted false nulls}/((n-R) v 1).
inline Accounting account(std::span<const std::uint8_t> rejected, std::span<const std::uint8_t> truth) {
  if (rejected.size() != truth.size()) throw std::invalid_argument("truth length does not match the rejection mask");
  std::size_t R = 0, V = 0, missed = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (rejected[i]) {
      ++R;
      if (truth[i] == 0) ++V;
    } else if (truth[i] == 1) {
      ++missed;
    }
  }
  Accounting a;
  a.V = V;
  a.FDP = static_cast<double>(V) / static_cast<double>(std::max<std::size_t>(R, 1));
  a.FNP = static_cast<double>(missed) / static_cast<double>(std::max<std::size_t>(truth.size() - R, 1));
  return a;
}

inline Accounting account(const TestResult& result, std::span<const std::uint8_t> truth) {
  return account(result.rejected, truth);
}

namespace detail {

// Rejects every X_i <= X_(r) and fills the accounting fields.
inline void reject_up_to(const PValueSample& s, std::size_t r, TestResult& out) {
  out.n = s.size();
  out.rejected.assign(s.size(), 0);
  out.threshold = s.order_statistic(r);
  if (r > 0) {
    for (std::size_t i = 0; i < s.size(); ++i) out.rejected[i] = s.pvalues()[i] <= out.threshold ? 1 : 0;
  }
  out.R = static_cast<std::size_t>(std::count(out.rejected.begin(), out.rejected.end(), 1));
  if (s.has_truth()) {
    const auto a = account(out.rejected, s.truth());
    out.V = a.V;
    out.FDP = a.FDP;
    out.FNP = a.FNP;
  } else if (out.R == 0) {
    out.V = 0;
    out.FDP = 0.0;
  }
}

}  // namespace detail

inline TestResult bh_procedure(const PValueSample& s, const ProcedureConfig& config) {
  config.validate();
  const SupCrossing c = sup_crossing(s, config.alpha);
  TestResult out;
  out.procedure = Procedure::bh;
  out.alpha = config.alpha;
  out.nu = c.nu;
  out.step_level = c.level_index;
  detail::reject_up_to(s, c.level_index, out);
  return out;
}

struct Pi0Estimate {
  double raw = 1.0;
  double value = 1.0;  // clipped into (0,1] when requested
};

/// pi0_hat = (1 - F_n(1 - b)) / b.
inline Pi0Estimate pi0_hat(const PValueSample& s, double bandwidth, bool clip = true) {
  if (!(bandwidth > 0.0 && bandwidth < 1.0)) throw std::domain_error("bandwidth must lie in (0,1)");
  const auto n = static_cast<double>(s.size());
  const auto above = static_cast<double>(s.size() - s.count_at_most(1.0 - bandwidth));
  Pi0Estimate e;
  e.raw = above / (n * bandwidth);
  e.value = e.raw;
  if (clip) {
    // An empty upper tail is read as a single observation there.
    if (e.value <= 0.0) e.value = 1.0 / (n * bandwidth);
    e.value = std::min(e.value, 1.0);
  }
  return e;
}

/// Plug-in rule: nu_PI = sup{t : t pi0_hat/alpha <= F_n(t)}, R_PI = floor(n nu_PI pi0_hat/alpha),
/// reject X_i <= X_(R_PI).
inline TestResult plugin_procedure(const PValueSample& s, const ProcedureConfig& config) {
  config.validate();
  if (s.size() < 2) throw std::invalid_argument("plug-in procedure needs at least two p-values");
  TestResult out;
  out.procedure = Procedure::plugin;
  out.alpha = config.alpha;
  out.bandwidth = config.bandwidth(s.size());
  const Pi0Estimate est = pi0_hat(s, out.bandwidth, config.pi0_clip);
  out.pi0_hat_raw = est.raw;
  out.pi0_hat = est.value;

  const double level = est.value > 0.0 ? config.alpha / est.value : std::numeric_limits<double>::infinity();
  const SupCrossing c = sup_crossing(s, level);
  out.nu = c.nu;
  out.step_level = c.level_index;

  const double scaled = static_cast<double>(s.size()) * c.nu * est.value / config.alpha;
  // Relative nudge absorbs rounding in n * (c k/n) / c.
  const double floored = std::floor(scaled * (1.0 + 1e-12));
  const auto r_pi = static_cast<std::size_t>(std::min(floored, static_cast<double>(s.size())));
  out.floor_discrepancy = r_pi != c.level_index;
  detail::reject_up_to(s, r_pi, out);
  return out;
}

inline TestResult run_procedure(Procedure p, const PValueSample& s, const ProcedureConfig& config) {
  return p == Procedure::bh ? bh_procedure(s, config) : plugin_procedure(s, config);
}

}  // namespace depfdr
