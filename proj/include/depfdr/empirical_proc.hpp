#pragma once

// Paired (truth, p-value) samples and the step-function processes built on them:
//     F_n(t)      = (1/n) #{X_i <= t}
//     Lambda_n(t) = (1/n) #{H_i = 0, X_i <= t}
//     Delta_n(t)  = (1/n) #{H_i = 1, X_i <= t}
//     Gamma_n(t)  = n Lambda_n(t) / (n F_n(t) + 1{all X_i > t})            (false discoveries)
//     Xi_n(t)     = Dtilde_n(t) / (1 - F_n(t) + 1{max X_i <= t}/n)          (false nondiscoveries)
// with Dtilde_n(t) = (1/n) #{H_i = 1, X_i > t}. All values are computed from
// integer counts and divided once.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "depfdr/dist_model.hpp"
#include "depfdr/field_gen.hpp"
#include "depfdr/rng.hpp"

namespace depfdr {

class PValueSample {
 public:
  /// Sample with known truth labels.
  PValueSample(std::vector<std::uint8_t> h, std::vector<double> x, std::vector<std::size_t> dims = {})
      : h_(std::move(h)), x_(std::move(x)), dims_(std::move(dims)), has_truth_(true) {
    if (h_.size() != x_.size()) throw std::invalid_argument("truth and p-value arrays differ in length");
    for (std::uint8_t v : h_)
      if (v > 1) throw std::invalid_argument("truth labels must be 0 or 1");
    build();
  }

  /// Sample of bare p-values; truth-dependent quantities are unavailable.
  explicit PValueSample(std::vector<double> x, std::vector<std::size_t> dims = {})
      : x_(std::move(x)), dims_(std::move(dims)), has_truth_(false) {
    build();
  }

  std::size_t size() const { return x_.size(); }
  bool has_truth() const { return has_truth_; }
  const std::vector<std::uint8_t>& truth() const {
    require_truth();
    return h_;
  }
  const std::vector<double>& pvalues() const { return x_; }
  /// Lattice shape of the source field; empty when unknown.
  const std::vector<std::size_t>& dims() const { return dims_; }
  /// Indices of x in nondecreasing p-value order.
  const std::vector<std::size_t>& order() const { return order_; }
  /// k-th order statistic X_(k), 1-based; X_(0) = 0.
  double order_statistic(std::size_t k) const { return k == 0 ? 0.0 : sorted_[k - 1]; }
  const std::vector<double>& sorted() const { return sorted_; }
  double max_pvalue() const { return sorted_.empty() ? 0.0 : sorted_.back(); }

  /// #{X_i <= t}.
  std::size_t count_at_most(double t) const {
    return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin());
  }
  /// #{H_i = 0 among the k smallest p-values}.
  std::size_t nulls_among_smallest(std::size_t k) const {
    require_truth();
    return null_prefix_[k];
  }
  /// N_C = #{H_i = 1}.
  std::size_t false_null_count() const {
    require_truth();
    return size() - null_prefix_.back();
  }

  void require_truth() const {
    if (!has_truth_) throw std::logic_error("sample carries no truth labels");
  }

 private:
  void build() {
    if (x_.empty()) throw std::invalid_argument("p-value sample must not be empty");
    for (double v : x_)
      if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("p-values must lie in [0,1]");
    if (!dims_.empty() && dims_volume(dims_) != x_.size())
      throw std::invalid_argument("sample dimensions do not match its length");
    struct Keyed {
      double x;
      std::size_t i;
    };
    std::vector<Keyed> keyed(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) keyed[i] = {x_[i], i};
    // Ties broken by site index, so the order is fully determined.
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) { return a.x < b.x || (a.x == b.x && a.i < b.i); });
    order_.resize(x_.size());
    sorted_.resize(x_.size());
    for (std::size_t k = 0; k < x_.size(); ++k) {
      order_[k] = keyed[k].i;
      sorted_[k] = keyed[k].x;
    }
    if (has_truth_) {
      null_prefix_.assign(x_.size() + 1, 0);
      for (std::size_t k = 0; k < x_.size(); ++k) null_prefix_[k + 1] = null_prefix_[k] + (h_[order_[k]] == 0 ? 1 : 0);
    }
  }

  std::vector<std::uint8_t> h_;
  std::vector<double> x_;
  std::vector<std::size_t> dims_;
  bool has_truth_;
  std::vector<std::size_t> order_;
  std::vector<double> sorted_;
  std::vector<std::size_t> null_prefix_;
};

/// X_i = (1 - H_i) U_i + H_i G^{-1}(U_i) with U_i iid uniform, independent of the field.
inline PValueSample generate_pvalues(const HypothesisField& field, const AlternativeDistribution& alt, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double u = rng.uniform();
    x[i] = field[i] ? alt.inverse(u) : u;
  }
  return {field.values(), std::move(x), field.dims()};
}

/// Integer counts behind every process at one t.
struct StepCounts {
  std::size_t n = 0;
  std::size_t at_most = 0;       // #{X_i <= t}
  std::size_t nulls_at_most = 0;  // #{H_i = 0, X_i <= t}
  std::size_t alts_above = 0;    // #{H_i = 1, X_i > t}

  std::size_t alts_at_most() const { return at_most - nulls_at_most; }
};

inline StepCounts step_counts(const PValueSample& s, double t) {
  StepCounts c;
  c.n = s.size();
  c.at_most = s.count_at_most(t);
  c.nulls_at_most = s.nulls_among_smallest(c.at_most);
  c.alts_above = s.false_null_count() - c.alts_at_most();
  return c;
}

inline double F_n(const PValueSample& s, double t) {
  return static_cast<double>(s.count_at_most(t)) / static_cast<double>(s.size());
}

inline double Lambda_n(const PValueSample& s, double t) {
  const auto c = step_counts(s, t);
  return static_cast<double>(c.nulls_at_most) / static_cast<double>(c.n);
}

inline double Delta_n(const PValueSample& s, double t) {
  const auto c = step_counts(s, t);
  return static_cast<double>(c.alts_at_most()) / static_cast<double>(c.n);
}

/// Gamma_n(t); zero when nothing lies at or below t.
inline double gamma_process(const PValueSample& s, double t) {
  const auto c = step_counts(s, t);
  const std::size_t denom = c.at_most + (c.at_most == 0 ? 1 : 0);
  return static_cast<double>(c.nulls_at_most) / static_cast<double>(denom);
}

/// False nondiscovery process Xi_n(t) of the theory (not the centred
/// auxiliary sharing its name).
inline double fnp_process(const PValueSample& s, double t) {
  const auto c = step_counts(s, t);
  const std::size_t denom = (c.n - c.at_most) + (c.at_most == c.n ? 1 : 0);
  return static_cast<double>(c.alts_above) / static_cast<double>(denom);
}

struct ProcessEvaluation {
  double t = 0.0;
  double F = 0.0;
  double Lambda = 0.0;
  double Delta = 0.0;
  double Gamma = 0.0;
  double Xi = 0.0;
  StepCounts counts;
};

inline ProcessEvaluation evaluate(const PValueSample& s, double t) {
  ProcessEvaluation e;
  e.t = t;
  e.counts = step_counts(s, t);
  const auto n = static_cast<double>(e.counts.n);
  e.F = static_cast<double>(e.counts.at_most) / n;
  e.Lambda = static_cast<double>(e.counts.nulls_at_most) / n;
  e.Delta = static_cast<double>(e.counts.alts_at_most()) / n;
  e.Gamma = gamma_process(s, t);
  e.Xi = fnp_process(s, t);
  return e;
}

/// Population FNP curve pi1 (1 - G(t)) / (1 - F(t)); 0 where F(t) = 1.
inline double population_Xi(double t, const PopulationModel& model) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("t must lie in [0,1]");
  const double tail = 1.0 - model.mixture_cdf(t);
  if (tail <= 0.0) return 0.0;
  return model.pi1() * (1.0 - model.alternative().cdf(t)) / tail;
}

}  // namespace depfdr
