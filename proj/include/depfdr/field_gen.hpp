#pragma once

// Stationary 0/1 hypothesis fields over d-dimensional boxes.
//
// Three generators are provided: independent Bernoulli sites, truncation
// indicators H_k = 1{Z_k <= z*} of a finite-window moving average
// Z_k = sum_i a_i eta_{k-i} with standard normal innovations, and the 2-D
// nearest-neighbour Ising model on a periodic torus sampled by single-site
// Gibbs updates at uniformly random sites. Values are stored in lexicographic
// (row-major) site order.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "depfdr/rng.hpp"
#include "depfdr/stats.hpp"

namespace depfdr {

struct GeneratorInfo {
  std::string kind;    // "iid", "linear", "ising", "estimate", "file"
  std::string params;  // free-form key=value list
  std::uint64_t seed = 0;
};

class HypothesisField {
 public:
  HypothesisField() = default;

  HypothesisField(std::vector<std::size_t> dims, std::vector<std::uint8_t> values, GeneratorInfo info = {})
      : dims_(std::move(dims)), values_(std::move(values)), info_(std::move(info)) {
    if (dims_.empty()) throw std::invalid_argument("field needs at least one dimension");
    std::size_t n = 1;
    for (std::size_t d : dims_) {
      if (d == 0) throw std::invalid_argument("field dimensions must be positive");
      n *= d;
    }
    if (values_.size() != n) throw std::invalid_argument("field value count does not match its dimensions");
    for (std::uint8_t v : values_)
      if (v > 1) throw std::invalid_argument("field values must be 0 or 1");
  }

  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<std::uint8_t>& values() const { return values_; }
  const GeneratorInfo& info() const { return info_; }
  std::size_t size() const { return values_.size(); }
  std::uint8_t operator[](std::size_t i) const { return values_[i]; }

  /// N_C: number of false nulls.
  std::size_t count_ones() const { return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), 1)); }

  bool is_square_lattice() const { return dims_.size() == 2 && dims_[0] == dims_[1]; }

  friend bool operator==(const HypothesisField& a, const HypothesisField& b) {
    return a.dims_ == b.dims_ && a.values_ == b.values_;
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::uint8_t> values_;
  GeneratorInfo info_;
};

inline std::string dims_to_string(const std::vector<std::size_t>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(dims[i]);
  }
  return s;
}

inline std::size_t dims_volume(const std::vector<std::size_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>{});
}

// ---------------------------------------------------------------------------
// Independent sites

inline HypothesisField gen_iid(double pi1, std::vector<std::size_t> dims, std::uint64_t seed) {
  if (!(pi1 >= 0.0 && pi1 <= 1.0)) throw std::domain_error("pi1 must lie in [0,1]");
  const std::size_t n = dims_volume(dims);
  Rng rng(seed);
  std::vector<std::uint8_t> values(n);
  for (auto& v : values) v = rng.bernoulli(pi1) ? 1 : 0;
  std::ostringstream params;
  params << "pi1=" << pi1;
  return {std::move(dims), std::move(values), {"iid", params.str(), seed}};
}

// ---------------------------------------------------------------------------
// Linear-process truncation indicators

struct LinearFieldParams {
  /// a_{-L}, ..., a_0, ..., a_L; odd length, centre entry is a_0 = 1.
  std::vector<double> coefficients{1.0};
  double threshold = 0.0;
  /// When set, the threshold is recalibrated so that P(H = 1) equals it.
  std::optional<double> target_pi1;

  std::size_t half_window() const { return coefficients.size() / 2; }

  double coefficient_norm() const {
    double s = 0.0;
    for (double a : coefficients) s += a * a;
    return std::sqrt(s);
  }

  void validate() const {
    if (coefficients.empty() || coefficients.size() % 2 == 0)
      throw std::invalid_argument("linear field needs an odd-length coefficient window a_{-L..L}");
    if (coefficients[half_window()] != 1.0) throw std::invalid_argument("linear field requires a_0 = 1");
    if (target_pi1 && !(*target_pi1 > 0.0 && *target_pi1 < 1.0))
      throw std::domain_error("target pi1 must lie in (0,1)");
  }

  /// z* used by the generator; Z is N(0, sum a_i^2) marginally.
  double effective_threshold() const {
    if (target_pi1) return stats::normal_quantile(*target_pi1) * coefficient_norm();
    return threshold;
  }

  double marginal_pi1() const { return stats::normal_cdf(effective_threshold() / coefficient_norm()); }

  /// a_i = rho^|i| for |i| <= L.
  static LinearFieldParams geometric(double rho, std::size_t half_window, std::optional<double> target_pi1 = 0.5) {
    LinearFieldParams p;
    p.coefficients.assign(2 * half_window + 1, 0.0);
    for (std::size_t k = 0; k <= 2 * half_window; ++k) {
      const auto lag = static_cast<int>(k) - static_cast<int>(half_window);
      p.coefficients[k] = std::pow(rho, std::abs(lag));
    }
    p.target_pi1 = target_pi1;
    return p;
  }

  /// Z_k = eta_k + eta_{k-1}, i.e. a_0 = a_1 = 1.
  static LinearFieldParams two_term(std::optional<double> target_pi1 = 0.5) {
    LinearFieldParams p;
    p.coefficients = {0.0, 1.0, 1.0};
    p.target_pi1 = target_pi1;
    return p;
  }
};

inline HypothesisField gen_linear_indicator(const LinearFieldParams& params, std::size_t n, std::uint64_t seed) {
  params.validate();
  if (n == 0) throw std::invalid_argument("linear field length must be positive");
  const std::size_t half = params.half_window();
  const double zstar = params.effective_threshold();
  Rng rng(seed);
  // eta[j] holds eta_{j - L}, j = 0 .. n + 2L - 1.
  std::vector<double> eta(n + 2 * half);
  for (auto& e : eta) e = rng.normal();
  std::vector<std::uint8_t> values(n);
  for (std::size_t k = 0; k < n; ++k) {
    double z = 0.0;
    // Z_k = sum_{i=-L}^{L} a_i eta_{k-i}; eta_{k-i} sits at index k - i + L.
    for (std::size_t c = 0; c < params.coefficients.size(); ++c) z += params.coefficients[c] * eta[k + 2 * half - c];
    values[k] = z <= zstar ? 1 : 0;
  }
  std::ostringstream desc;
  desc << "window=" << params.coefficients.size() << " zstar=" << zstar;
  return {{n}, std::move(values), {"linear", desc.str(), seed}};
}

// ---------------------------------------------------------------------------
// Ising model

/// (1/2) log(1 + sqrt 2).
inline double beta_critical() { return 0.5 * std::log(1.0 + std::sqrt(2.0)); }

/// True when beta is below the critical coupling; otherwise prints a warning.
inline bool check_ising_regime(double beta, std::ostream& warn = std::cerr) {
  if (beta < beta_critical()) return true;
  warn << "warning: beta=" << beta << " is not below the critical coupling " << beta_critical()
       << "; short-range dependence is not guaranteed\n";
  return false;
}

/// P(L_s = spin | neighbour sum) = exp(b s S) / (exp(b S) + exp(-b S)).
inline double ising_conditional(int spin, int neighbor_sum, double beta) {
  if (spin != 1 && spin != -1) throw std::invalid_argument("spin must be +1 or -1");
  if (neighbor_sum < -4 || neighbor_sum > 4 || neighbor_sum % 2 != 0)
    throw std::invalid_argument("neighbour sum must be one of -4,-2,0,2,4");
  // Logistic form of the same ratio, stable for large |beta|.
  return 1.0 / (1.0 + std::exp(-2.0 * beta * spin * neighbor_sum));
}

enum class IsingInit { all_minus, all_plus, random };

struct IsingParams {
  double beta = 0.3;
  std::size_t side = 50;
  std::uint64_t site_updates = 1'250'000;
  IsingInit init = IsingInit::random;

  void validate() const {
    if (side < 2) throw std::invalid_argument("Ising lattice side must be at least 2");
    if (site_updates < 1) throw std::invalid_argument("Ising sampler needs at least one site update");
    if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
  }
};

namespace detail {

class IsingSampler {
 public:
  IsingSampler(const IsingParams& p, std::uint64_t seed) : p_(p), rng_(seed), spins_(p.side * p.side) {
    p_.validate();
    for (auto& s : spins_) {
      switch (p_.init) {
        case IsingInit::all_minus: s = -1; break;
        case IsingInit::all_plus: s = 1; break;
        case IsingInit::random: s = rng_.bernoulli(0.5) ? 1 : -1; break;
      }
    }
    for (int k = 0; k < 5; ++k) plus_prob_[k] = ising_conditional(1, 2 * k - 4, p_.beta);
  }

  void update() {
    const std::size_t side = p_.side;
    const auto site = static_cast<std::size_t>(rng_.below(side * side));
    const std::size_t r = site / side, c = site % side;
    const std::size_t up = ((r + side - 1) % side) * side + c;
    const std::size_t down = ((r + 1) % side) * side + c;
    const std::size_t left = r * side + (c + side - 1) % side;
    const std::size_t right = r * side + (c + 1) % side;
    const int sum = spins_[up] + spins_[down] + spins_[left] + spins_[right];
    spins_[site] = rng_.uniform() < plus_prob_[(sum + 4) / 2] ? 1 : -1;
  }

  std::size_t count_plus() const {
    return static_cast<std::size_t>(std::count(spins_.begin(), spins_.end(), std::int8_t{1}));
  }

  HypothesisField field(std::uint64_t seed) const {
    std::vector<std::uint8_t> values(spins_.size());
    for (std::size_t i = 0; i < spins_.size(); ++i) values[i] = spins_[i] > 0 ? 1 : 0;
    std::ostringstream desc;
    desc << "beta=" << p_.beta << " updates=" << p_.site_updates;
    return {{p_.side, p_.side}, std::move(values), {"ising", desc.str(), seed}};
  }

 private:
  IsingParams p_;
  Rng rng_;
  std::vector<std::int8_t> spins_;
  std::array<double, 5> plus_prob_{};
};

}  // namespace detail

/// Runs params.site_updates random-site Gibbs updates; H_s = (L_s + 1)/2.
inline HypothesisField gen_ising(const IsingParams& params, std::uint64_t seed) {
  detail::IsingSampler sampler(params, seed);
  for (std::uint64_t u = 0; u < params.site_updates; ++u) sampler.update();
  return sampler.field(seed);
}

/// N_C recorded after every full sweep (side^2 updates) of a gen_ising run.
inline std::vector<double> ising_count_trace(const IsingParams& params, std::uint64_t seed) {
  detail::IsingSampler sampler(params, seed);
  const std::uint64_t sweep = params.side * params.side;
  std::vector<double> trace;
  for (std::uint64_t u = 1; u <= params.site_updates; ++u) {
    sampler.update();
    if (u % sweep == 0) trace.push_back(static_cast<double>(sampler.count_plus()));
  }
  return trace;
}

/// Lag-k sample autocorrelation.
inline double autocorrelation(std::span<const double> xs, std::size_t lag) {
  if (xs.size() <= lag + 1) throw std::invalid_argument("series too short for the requested lag");
  const double m = stats::mean(xs);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) den += (xs[i] - m) * (xs[i] - m);
  for (std::size_t i = 0; i + lag < xs.size(); ++i) num += (xs[i] - m) * (xs[i + lag] - m);
  return den > 0.0 ? num / den : 0.0;
}

/// Mean product of spins L_s L_t over horizontal and vertical neighbour pairs
/// of a square field, minus the squared mean spin.
inline double nearest_neighbor_correlation(const HypothesisField& field) {
  if (!field.is_square_lattice()) throw std::invalid_argument("nearest-neighbour correlation needs a square lattice");
  const std::size_t side = field.dims()[0];
  const auto spin = [&](std::size_t r, std::size_t c) { return 2.0 * field[r * side + c] - 1.0; };
  double prod = 0.0, mean = 0.0, sq = 0.0;
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) {
      const double s = spin(r, c);
      mean += s;
      sq += s * s;
      prod += s * spin(r, (c + 1) % side) + s * spin((r + 1) % side, c);
    }
  const auto n = static_cast<double>(side * side);
  mean /= n;
  const double var = sq / n - mean * mean;
  if (var <= 0.0) return 0.0;
  return (prod / (2.0 * n) - mean * mean) / var;
}

// ---------------------------------------------------------------------------
// Generator specs and CLT diagnostics

struct IidSpec {
  double pi1 = 0.5;
  std::vector<std::size_t> dims{50, 50};
};

struct LinearSpec {
  LinearFieldParams params = LinearFieldParams::geometric(0.5, 2);
  std::size_t n = 10'000;
};

struct IsingSpec {
  IsingParams params;
};

using GeneratorSpec = std::variant<IidSpec, LinearSpec, IsingSpec>;

inline HypothesisField generate(const GeneratorSpec& spec, std::uint64_t seed) {
  return std::visit(
      [&](const auto& s) -> HypothesisField {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IidSpec>) return gen_iid(s.pi1, s.dims, seed);
        else if constexpr (std::is_same_v<T, LinearSpec>) return gen_linear_indicator(s.params, s.n, seed);
        else return gen_ising(s.params, seed);
      },
      spec);
}

/// P(H = 1) implied by the generator. Ising fields use 1/2 by spin-flip symmetry.
inline double nominal_pi1(const GeneratorSpec& spec) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IidSpec>) return s.pi1;
        else if constexpr (std::is_same_v<T, LinearSpec>) return s.params.marginal_pi1();
        else return 0.5;
      },
      spec);
}

inline std::size_t field_size(const GeneratorSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IidSpec>) return dims_volume(s.dims);
        else if constexpr (std::is_same_v<T, LinearSpec>) return s.n;
        else return s.params.side * s.params.side;
      },
      spec);
}

struct CltDiagnostic {
  std::size_t replicates = 0;
  std::vector<double> standardized_sums;  // (N_C - n pi1) / sqrt(n)
  stats::NormalityDiagnostic shape;
  double variance = 0.0;  // sample variance of the standardized sums
};

/// Standardized sums over independent fields; replicate r uses stream_seed(seed, r).
inline CltDiagnostic clt_diagnostic(const GeneratorSpec& spec, std::size_t replicates, std::uint64_t seed) {
  if (replicates < 100) throw std::invalid_argument("clt_diagnostic needs at least 100 replicates");
  const double pi1 = nominal_pi1(spec);
  CltDiagnostic d;
  d.replicates = replicates;
  d.standardized_sums.reserve(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    const HypothesisField f = generate(spec, stream_seed(seed, r));
    const auto n = static_cast<double>(f.size());
    d.standardized_sums.push_back((static_cast<double>(f.count_ones()) - n * pi1) / std::sqrt(n));
  }
  d.shape = stats::normality(d.standardized_sums);
  d.variance = stats::variance(d.standardized_sums);
  return d;
}

}  // namespace depfdr
