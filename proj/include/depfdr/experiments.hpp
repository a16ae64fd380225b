#pragma once

// Monte Carlo harness for the asymptotic behaviour of BH and plug-in FDR
// procedures under dependent hypotheses.
//
// Seeding: a cell (one beta, one (alpha, n) pair, ...) gets master
// stream_seed(seed, cell); replicate r of the cell uses stream
// stream_seed(cell master, r), with independent sub-streams for the field and
// the p-values. Aggregates are computed in replicate order after all
// replicates finish, so outputs are identical for any worker count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "depfdr/dist_model.hpp"
#include "depfdr/empirical_proc.hpp"
#include "depfdr/field_gen.hpp"
#include "depfdr/io.hpp"
#include "depfdr/parallel.hpp"
#include "depfdr/stats.hpp"
#include "depfdr/testing_procedures.hpp"

namespace depfdr {

/// A required hypothesis of an experiment does not hold (e.g. alpha <= alpha_star).
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelSpec {
  double pi0 = 0.5;
  double a = 1.0 / 98.0;
  double alpha = 0.1;

  PopulationModel model() const { return {pi0, AlternativeDistribution::paper(a), alpha}; }
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

inline Estimate estimate_mean(std::span<const double> xs) {
  return {stats::mean(xs), xs.size() > 1 ? stats::standard_error(xs) : std::numeric_limits<double>::quiet_NaN()};
}

struct ReplicateSummary {
  std::size_t replicate = 0;
  std::uint64_t stream = 0;
  /// Gamma_n(nu_BH) - alpha pi0.
  double delta1 = 0.0;
  /// (alpha/nu0) [Lambda_n(nu0) - nu0 pi0]; NaN when nu0 = 0.
  double delta2 = std::numeric_limits<double>::quiet_NaN();
  double nu_bh = 0.0;
  std::size_t R = 0;
  double fdp = 0.0;
  double fnp = 0.0;
  double pi0_hat = 1.0;
  std::size_t false_nulls = 0;
  double elapsed_seconds = 0.0;  // not written to CSV
  /// Experiment-specific per-replicate values, same names on every row of a run.
  std::vector<std::pair<std::string, double>> extras;
};

namespace detail {

struct BhReplicate {
  PValueSample sample;
  TestResult bh;
  ReplicateSummary summary;
};

inline BhReplicate bh_replicate(const GeneratorSpec& field_spec, const PopulationModel& model, std::size_t r,
                                std::uint64_t stream) {
  const auto start = std::chrono::steady_clock::now();
  const HypothesisField field = generate(field_spec, substream_seed(stream, Substream::field));
  PValueSample sample = generate_pvalues(field, model.alternative(), substream_seed(stream, Substream::pvalues));
  TestResult bh = bh_procedure(sample, {.alpha = model.alpha()});

  ReplicateSummary s;
  s.replicate = r;
  s.stream = stream;
  s.nu_bh = bh.nu;
  s.R = bh.R;
  s.fdp = *bh.FDP;
  s.fnp = *bh.FNP;
  s.false_nulls = sample.false_null_count();
  s.delta1 = gamma_process(sample, bh.nu) - model.alpha() * model.pi0();
  if (model.nu0() > 0.0) {
    const double nu0 = model.nu0();
    s.delta2 = model.alpha() / nu0 * (Lambda_n(sample, nu0) - model.null_mass(nu0));
  }
  s.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(sample), std::move(bh), std::move(s)};
}

template <class F>
std::vector<double> column(const std::vector<ReplicateSummary>& reps, F get) {
  std::vector<double> out;
  out.reserve(reps.size());
  for (const auto& r : reps) out.push_back(get(r));
  return out;
}

inline std::vector<double> extra_column(const std::vector<ReplicateSummary>& reps, const std::string& name) {
  return column(reps, [&](const ReplicateSummary& r) {
    for (const auto& [k, v] : r.extras)
      if (k == name) return v;
    throw std::logic_error("missing replicate column " + name);
  });
}

inline void check_reps(std::size_t reps) {
  if (reps < 2) throw std::invalid_argument("experiments need at least two replicates");
}

inline void check_sizes(std::span<const std::size_t> ns) {
  if (ns.empty()) throw std::invalid_argument("experiment needs at least one size");
  for (auto n : ns)
    if (n < 100) throw std::invalid_argument("experiment sizes must be at least 100");
}

}  // namespace detail

/// Per-replicate rows of one experiment, grouped by cell label.
struct ReplicateTable {
  std::vector<std::string> cells;
  std::vector<std::vector<ReplicateSummary>> replicates;
};

inline void write_replicates_csv(std::ostream& out, const ReplicateTable& table) {
  io::CsvRow header;
  header << "cell" << "replicate" << "stream_seed" << "delta1" << "delta2" << "nu_bh" << "R" << "FDP" << "FNP"
         << "pi0_hat" << "false_nulls";
  const ReplicateSummary* first = nullptr;
  for (const auto& cell : table.replicates)
    if (!cell.empty()) {
      first = &cell.front();
      break;
    }
  if (first)
    for (const auto& [k, v] : first->extras) header << k;
  out << header.str();
  for (std::size_t c = 0; c < table.cells.size(); ++c) {
    for (const auto& r : table.replicates[c]) {
      io::CsvRow row;
      row << table.cells[c] << r.replicate << std::to_string(r.stream) << r.delta1 << r.delta2 << r.nu_bh << r.R
          << r.fdp << r.fnp << r.pi0_hat << r.false_nulls;
      for (const auto& [k, v] : r.extras) row << v;
      out << row.str();
    }
  }
}

// ---------------------------------------------------------------------------
// Dependence table: E(delta1^2) and E(|delta1 - delta2|^2) across Ising couplings

struct Table1Config {
  std::vector<double> betas{-0.3, 0.0, 0.1, 0.2, 0.3, 0.4, 0.44};
  std::size_t reps = 100;
  std::size_t side = 50;
  std::uint64_t site_updates = 1'250'000;
  double alpha = 0.1;
  double a = 1.0 / 98.0;
  std::uint64_t seed = kDefaultMasterSeed;
  std::size_t jobs = 1;

  /// Reduced Gibbs run length for quick checks.
  static Table1Config fast() {
    Table1Config c;
    c.site_updates = 100'000;
    return c;
  }
};

struct Table1Row {
  double beta = 0.0;
  std::size_t reps = 0;
  Estimate delta1_sq;
  Estimate diff_sq;
  Estimate delta1;
  Estimate fdp;
  Estimate pi1_realized;
};

struct Table1Result {
  std::vector<Table1Row> rows;
  ReplicateTable replicates;
};

inline Table1Result table1_experiment(const Table1Config& cfg) {
  detail::check_reps(cfg.reps);
  if (cfg.side * cfg.side < 100) throw std::invalid_argument("lattice must have at least 100 sites");
  // pi0 = 1/2 by spin-flip symmetry, for every beta below criticality.
  const ModelSpec spec{.pi0 = 0.5, .a = cfg.a, .alpha = cfg.alpha};
  const PopulationModel model = spec.model();
  if (!(model.alpha() > model.alpha_star()))
    throw PreconditionError("dependence table needs alpha > alpha_star so that nu0 > 0");
  for (double beta : cfg.betas)
    if (!(beta < beta_critical())) throw PreconditionError("every beta must lie below the critical coupling");

  Table1Result out;
  for (std::size_t c = 0; c < cfg.betas.size(); ++c) {
    const double beta = cfg.betas[c];
    const GeneratorSpec field = IsingSpec{{.beta = beta, .side = cfg.side, .site_updates = cfg.site_updates}};
    auto reps = run_replicates(cfg.reps, stream_seed(cfg.seed, c), cfg.jobs, [&](std::size_t r, std::uint64_t s) {
      return detail::bh_replicate(field, model, r, s).summary;
    });
    const auto d1 = detail::column(reps, [](const auto& r) { return r.delta1; });
    const auto d1sq = detail::column(reps, [](const auto& r) { return r.delta1 * r.delta1; });
    const auto diff = detail::column(reps, [](const auto& r) { return (r.delta1 - r.delta2) * (r.delta1 - r.delta2); });
    const auto fdp = detail::column(reps, [](const auto& r) { return r.fdp; });
    const double n = static_cast<double>(cfg.side * cfg.side);
    const auto pi1 = detail::column(reps, [&](const auto& r) { return static_cast<double>(r.false_nulls) / n; });
    out.rows.push_back({beta, cfg.reps, estimate_mean(d1sq), estimate_mean(diff), estimate_mean(d1), estimate_mean(fdp),
                        estimate_mean(pi1)});
    out.replicates.cells.push_back("beta=" + io::format_double(beta));
    out.replicates.replicates.push_back(std::move(reps));
  }
  return out;
}

inline void write_table1_csv(std::ostream& out, const Table1Result& res) {
  out << "beta,reps,E_delta1_sq,se_E_delta1_sq,E_diff_sq,se_E_diff_sq,mean_delta1,se_mean_delta1,mean_FDP,se_mean_FDP,"
         "mean_pi1,se_mean_pi1\n";
  for (const auto& r : res.rows) {
    io::CsvRow row;
    row << r.beta << r.reps << r.delta1_sq.value << r.delta1_sq.se << r.diff_sq.value << r.diff_sq.se << r.delta1.value
        << r.delta1.se << r.fdp.value << r.fdp.se << r.pi1_realized.value << r.pi1_realized.se;
    out << row.str();
  }
}

// ---------------------------------------------------------------------------
// Criticality: growth of R on both sides of alpha_star

struct CriticalityConfig {
  std::vector<double> alphas{0.1, 0.01};
  std::vector<std::size_t> ns{10'000, 100'000};
  std::size_t reps = 200;
  double pi0 = 0.5;
  double a = 1.0 / 98.0;
  /// When set, hypotheses follow this 1-D linear field (pi1 recalibrated to 1 - pi0).
  std::optional<LinearFieldParams> linear;
  std::uint64_t seed = kDefaultMasterSeed;
  std::size_t jobs = 1;
};

struct CriticalityCell {
  double alpha = 0.0;
  std::size_t n = 0;
  std::size_t reps = 0;
  double alpha_star = 0.0;
  double nu0 = 0.0;
  /// nu0 / alpha, the limit of R/n above criticality.
  double limit_ratio = 0.0;
  Estimate R_mean;
  double R_median = 0.0;
  double R_p95 = 0.0;
  double R_max = 0.0;
  Estimate ratio_mean;
  double ratio_median = 0.0;
  double ratio_p95 = 0.0;
  double ratio_max = 0.0;
};

struct CriticalityResult {
  std::vector<CriticalityCell> cells;
  ReplicateTable replicates;

  const CriticalityCell& cell(double alpha, std::size_t n) const {
    for (const auto& c : cells)
      if (c.alpha == alpha && c.n == n) return c;
    throw std::out_of_range("no such criticality cell");
  }
};

inline CriticalityResult criticality_experiment(const CriticalityConfig& cfg) {
  detail::check_reps(cfg.reps);
  detail::check_sizes(cfg.ns);
  CriticalityResult out;
  std::size_t cell_index = 0;
  for (double alpha : cfg.alphas) {
    const PopulationModel model = ModelSpec{cfg.pi0, cfg.a, alpha}.model();
    for (std::size_t n : cfg.ns) {
      GeneratorSpec field = IidSpec{1.0 - cfg.pi0, {n}};
      if (cfg.linear) {
        LinearFieldParams p = *cfg.linear;
        p.target_pi1 = 1.0 - cfg.pi0;
        field = LinearSpec{p, n};
      }
      auto reps = run_replicates(cfg.reps, stream_seed(cfg.seed, cell_index++), cfg.jobs,
                                 [&](std::size_t r, std::uint64_t s) { return detail::bh_replicate(field, model, r, s).summary; });
      const auto R = detail::column(reps, [](const auto& r) { return static_cast<double>(r.R); });
      const auto ratio = detail::column(reps, [&](const auto& r) { return static_cast<double>(r.R) / static_cast<double>(n); });
      CriticalityCell c;
      c.alpha = alpha;
      c.n = n;
      c.reps = cfg.reps;
      c.alpha_star = model.alpha_star();
      c.nu0 = model.nu0();
      c.limit_ratio = model.nu0() / alpha;
      c.R_mean = estimate_mean(R);
      c.R_median = stats::quantile(R, 0.5);
      c.R_p95 = stats::quantile(R, 0.95);
      c.R_max = *std::max_element(R.begin(), R.end());
      c.ratio_mean = estimate_mean(ratio);
      c.ratio_median = stats::quantile(ratio, 0.5);
      c.ratio_p95 = stats::quantile(ratio, 0.95);
      c.ratio_max = *std::max_element(ratio.begin(), ratio.end());
      out.cells.push_back(c);
      out.replicates.cells.push_back("alpha=" + io::format_double(alpha) + ";n=" + std::to_string(n));
      out.replicates.replicates.push_back(std::move(reps));
    }
  }
  return out;
}

inline void write_criticality_csv(std::ostream& out, const CriticalityResult& res) {
  out << "alpha,n,reps,alpha_star,nu0,limit_ratio,mean_R,se_mean_R,median_R,p95_R,max_R,mean_ratio,se_mean_ratio,"
         "median_ratio,p95_ratio,max_ratio\n";
  for (const auto& c : res.cells) {
    io::CsvRow row;
    row << c.alpha << c.n << c.reps << c.alpha_star << c.nu0 << c.limit_ratio << c.R_mean.value << c.R_mean.se
        << c.R_median << c.R_p95 << c.R_max << c.ratio_mean.value << c.ratio_mean.se << c.ratio_median << c.ratio_p95
        << c.ratio_max;
    out << row.str();
  }
}

// ---------------------------------------------------------------------------
// Boundary case alpha = alpha_star: n^{1/3} nu_BH => [max(N/c0, 0)]^{2/3}

/// P(Z <= z) for Z = [max(N/c0, 0)]^{2/3}: 0 for z < 0, Phi(c0 z^{3/2}) for z >= 0.
inline double boundary_limit_cdf(double z, double c0) {
  if (z < 0.0) return 0.0;
  return stats::normal_cdf(c0 * std::pow(z, 1.5));
}

/// Median of the positive part of the limit law: (Phi^{-1}(3/4) / c0)^{2/3}.
inline double boundary_limit_positive_median(double c0) {
  return std::pow(stats::normal_quantile(0.75) / c0, 2.0 / 3.0);
}

struct BoundaryConfig {
  std::vector<std::size_t> ns{100'000};
  std::size_t reps = 1000;
  double pi0 = 0.5;
  double a = 1.0 / 98.0;
  /// Half-width of the neighbourhood of 0, as a multiple of the limit scale c0^{-2/3}.
  double zero_band = 0.05;
  std::uint64_t seed = kDefaultMasterSeed;
  std::size_t jobs = 1;
};

struct BoundaryCell {
  std::size_t n = 0;
  std::size_t reps = 0;
  double alpha = 0.0;
  double c0 = 0.0;
  double ks_distance = 0.0;
  double zero_band = 0.0;  // absolute band on the n^{1/3} nu_BH scale
  double zero_mass = 0.0;  // empirical P(Z <= band)
  double limit_zero_mass = 0.0;
  Estimate z_mean;
  std::vector<double> z;
};

struct BoundaryResult {
  std::vector<BoundaryCell> cells;
  ReplicateTable replicates;
};

inline BoundaryResult boundary_experiment(const BoundaryConfig& cfg) {
  detail::check_reps(cfg.reps);
  detail::check_sizes(cfg.ns);
  const PopulationModel base = ModelSpec{cfg.pi0, cfg.a, 0.1}.model();
  const double alpha_star = base.alpha_star();
  if (!(alpha_star < 1.0)) throw PreconditionError("boundary experiment needs alpha_star < 1");
  const PopulationModel model = base.with_alpha(alpha_star);
  double c0 = 0.0;
  try {
    c0 = model.c0();
  } catch (const std::domain_error& e) {
    throw PreconditionError(e.what());
  }

  BoundaryResult out;
  for (std::size_t c = 0; c < cfg.ns.size(); ++c) {
    const std::size_t n = cfg.ns[c];
    const GeneratorSpec field = IidSpec{model.pi1(), {n}};
    const double scale = std::cbrt(static_cast<double>(n));
    auto reps = run_replicates(cfg.reps, stream_seed(cfg.seed, c), cfg.jobs, [&](std::size_t r, std::uint64_t s) {
      auto rep = detail::bh_replicate(field, model, r, s).summary;
      rep.extras.emplace_back("z", scale * rep.nu_bh);
      return rep;
    });
    BoundaryCell cell;
    cell.n = n;
    cell.reps = cfg.reps;
    cell.alpha = alpha_star;
    cell.c0 = c0;
    cell.z = detail::extra_column(reps, "z");
    cell.ks_distance = stats::ks_distance(
        std::span<const double>(cell.z), [&](double z) { return boundary_limit_cdf(z, c0); },
        [&](double z) { return z <= 0.0 ? 0.0 : boundary_limit_cdf(z, c0); });
    cell.zero_band = cfg.zero_band * std::pow(c0, -2.0 / 3.0);
    cell.zero_mass = static_cast<double>(std::count_if(cell.z.begin(), cell.z.end(), [&](double z) { return z <= cell.zero_band; })) /
                     static_cast<double>(cell.z.size());
    cell.limit_zero_mass = boundary_limit_cdf(cell.zero_band, c0);
    cell.z_mean = estimate_mean(cell.z);
    out.cells.push_back(std::move(cell));
    out.replicates.cells.push_back("n=" + std::to_string(n));
    out.replicates.replicates.push_back(std::move(reps));
  }
  return out;
}

inline void write_boundary_csv(std::ostream& out, const BoundaryResult& res) {
  out << "n,reps,alpha,c0,ks_distance,zero_band,zero_mass,limit_zero_mass,mean_z,se_mean_z,limit_positive_median\n";
  for (const auto& c : res.cells) {
    io::CsvRow row;
    row << c.n << c.reps << c.alpha << c.c0 << c.ks_distance << c.zero_band << c.zero_mass << c.limit_zero_mass
        << c.z_mean.value << c.z_mean.se << boundary_limit_positive_median(c.c0);
    out << row.str();
  }
}

// ---------------------------------------------------------------------------
// Linear expansion of nu_BH and its remainder rate

struct BahadurConfig {
  std::vector<std::size_t> ns{1'000, 3'000, 10'000, 30'000, 100'000};
  std::size_t reps = 500;
  ModelSpec model;
  std::uint64_t seed = kDefaultMasterSeed;
  std::size_t jobs = 1;
};

struct BahadurCell {
  std::size_t n = 0;
  std::size_t reps = 0;
  Estimate remainder_mean;
  double remainder_rms = 0.0;
  Estimate deviation_mean;  // nu_BH - nu0
  double deviation_rms = 0.0;
};

struct BahadurResult {
  std::vector<BahadurCell> cells;
  double remainder_slope = 0.0;  // log RMS(remainder) vs log n
  double deviation_slope = 0.0;  // log RMS(nu_BH - nu0) vs log n
  ReplicateTable replicates;
};

inline BahadurResult bahadur_experiment(const BahadurConfig& cfg) {
  detail::check_reps(cfg.reps);
  detail::check_sizes(cfg.ns);
  const PopulationModel model = cfg.model.model();
  if (!model.supercritical_chain_holds())
    throw PreconditionError("linear expansion needs 1/alpha_star > 1/alpha > f(nu0)");
  const double nu0 = model.nu0();
  const double denom = 1.0 / model.alpha() - model.mixture_density(nu0);

  BahadurResult out;
  std::vector<double> ns, rem_rms, dev_rms;
  for (std::size_t c = 0; c < cfg.ns.size(); ++c) {
    const std::size_t n = cfg.ns[c];
    const GeneratorSpec field = IidSpec{model.pi1(), {n}};
    auto reps = run_replicates(cfg.reps, stream_seed(cfg.seed, c), cfg.jobs, [&](std::size_t r, std::uint64_t s) {
      auto rep = detail::bh_replicate(field, model, r, s);
      const double linear = (F_n(rep.sample, nu0) - nu0 / model.alpha()) / denom;
      rep.summary.extras.emplace_back("deviation", rep.summary.nu_bh - nu0);
      rep.summary.extras.emplace_back("remainder", rep.summary.nu_bh - nu0 - linear);
      return std::move(rep.summary);
    });
    const auto rem = detail::extra_column(reps, "remainder");
    const auto dev = detail::extra_column(reps, "deviation");
    BahadurCell cell{n, cfg.reps, estimate_mean(rem), stats::root_mean_square(rem), estimate_mean(dev),
                     stats::root_mean_square(dev)};
    ns.push_back(static_cast<double>(n));
    rem_rms.push_back(cell.remainder_rms);
    dev_rms.push_back(cell.deviation_rms);
    out.cells.push_back(cell);
    out.replicates.cells.push_back("n=" + std::to_string(n));
    out.replicates.replicates.push_back(std::move(reps));
  }
  if (ns.size() >= 2) {
    out.remainder_slope = stats::log_log_slope(ns, rem_rms);
    out.deviation_slope = stats::log_log_slope(ns, dev_rms);
  } else {
    out.remainder_slope = out.deviation_slope = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

inline void write_bahadur_csv(std::ostream& out, const BahadurResult& res) {
  out << "n,reps,mean_remainder,se_mean_remainder,rms_remainder,mean_deviation,se_mean_deviation,rms_deviation,"
         "remainder_slope,deviation_slope\n";
  for (const auto& c : res.cells) {
    io::CsvRow row;
    row << c.n << c.reps << c.remainder_mean.value << c.remainder_mean.se << c.remainder_rms << c.deviation_mean.value
        << c.deviation_mean.se << c.deviation_rms << res.remainder_slope << res.deviation_slope;
    out << row.str();
  }
}

// ---------------------------------------------------------------------------
// Normality shape of the root-n statistics

enum class CltStatistic {
  nu_bh,  // sqrt(n) (nu_BH - nu0)
  fdp,    // sqrt(n) (Gamma_n(nu_BH) - alpha pi0)
  count,  // (N_C - n pi1) / sqrt(n)
};

inline std::string to_string(CltStatistic s) {
  switch (s) {
    case CltStatistic::nu_bh: return "nu_bh";
    case CltStatistic::fdp: return "fdp";
    case CltStatistic::count: return "count";
  }
  return "?";
}

struct CltConfig {
  CltStatistic statistic = CltStatistic::nu_bh;
  GeneratorSpec field = IidSpec{0.5, {10'000}};
  double alpha = 0.1;
  double a = 1.0 / 98.0;
  std::size_t reps = 1000;
  std::uint64_t seed = kDefaultMasterSeed;
  std::size_t jobs = 1;
};

struct CltResult {
  CltStatistic statistic = CltStatistic::nu_bh;
  std::size_t n = 0;
  double pi0 = 0.0;
  double centre = 0.0;  // nu0, alpha pi0 or n pi1
  stats::NormalityDiagnostic shape;
  ReplicateTable replicates;
};

inline CltResult clt_experiments(const CltConfig& cfg) {
  detail::check_reps(cfg.reps);
  const double pi1 = nominal_pi1(cfg.field);
  const PopulationModel model{1.0 - pi1, AlternativeDistribution::paper(cfg.a), cfg.alpha};
  if (cfg.statistic != CltStatistic::count && !(model.nu0() > 0.0))
    throw PreconditionError("normality of the BH statistics needs nu0 > 0 (alpha > alpha_star)");
  const std::size_t n = field_size(cfg.field);
  const double root_n = std::sqrt(static_cast<double>(n));

  CltResult out;
  out.statistic = cfg.statistic;
  out.n = n;
  out.pi0 = model.pi0();
  switch (cfg.statistic) {
    case CltStatistic::nu_bh: out.centre = model.nu0(); break;
    case CltStatistic::fdp: out.centre = model.alpha() * model.pi0(); break;
    case CltStatistic::count: out.centre = static_cast<double>(n) * pi1; break;
  }
  auto reps = run_replicates(cfg.reps, stream_seed(cfg.seed, 0), cfg.jobs, [&](std::size_t r, std::uint64_t s) {
    auto rep = detail::bh_replicate(cfg.field, model, r, s).summary;
    double value = 0.0;
    switch (cfg.statistic) {
      case CltStatistic::nu_bh: value = root_n * (rep.nu_bh - out.centre); break;
      case CltStatistic::fdp: value = root_n * rep.delta1; break;
      case CltStatistic::count: value = (static_cast<double>(rep.false_nulls) - out.centre) / root_n; break;
    }
    rep.extras.emplace_back("statistic", value);
    return rep;
  });
  out.shape = stats::normality(detail::extra_column(reps, "statistic"));
  out.replicates.cells.push_back(to_string(cfg.statistic));
  out.replicates.replicates.push_back(std::move(reps));
  return out;
}

inline void write_clt_csv(std::ostream& out, const CltResult& res) {
  out << "statistic,n,reps,centre,mean,se_mean,sd,skewness,excess_kurtosis,qq_correlation,degenerate\n";
  const auto& s = res.shape;
  io::CsvRow row;
  row << to_string(res.statistic) << res.n << s.count << res.centre << s.mean
      << s.sd / std::sqrt(static_cast<double>(s.count)) << s.sd << s.skewness << s.excess_kurtosis << s.qq_correlation
      << s.degenerate;
  out << row.str();
}

// ---------------------------------------------------------------------------
// Plug-in procedure against BH

struct PluginConfig {
  std::vector<std::size_t> ns{10'000, 100'000};
  std::size_t reps = 500;
  ModelSpec model;
  double bandwidth_constant = 1.0;
  std::uint64_t seed = kDefaultMasterSeed;
  std::size_t jobs = 1;
};

struct PluginCell {
  std::size_t n = 0;
  std::size_t reps = 0;
  Estimate gamma_pi;  // Gamma_n(nu_PI)
  Estimate fdp_pi;
  Estimate fdp_bh;
  Estimate extra_rejections;  // R_PI - R
  double frac_rpi_ge_r = 0.0;
  Estimate pi0_hat;
  /// alpha * mean(pi0_hat) / pi0, the finite-n reference for Gamma_n(nu_PI).
  double adjusted_target = 0.0;
  Estimate residual;  // Gamma_n(nu_PI) - alpha - alpha (1 - pi0_hat/pi0)
  double residual_rms = 0.0;
  std::size_t floor_discrepancies = 0;
};

struct PluginResult {
  std::vector<PluginCell> cells;
  ReplicateTable replicates;
};

inline PluginResult plugin_experiment(const PluginConfig& cfg) {
  detail::check_reps(cfg.reps);
  detail::check_sizes(cfg.ns);
  const PopulationModel model = cfg.model.model();
  if (!(model.alpha() / model.pi0() > model.alpha_star()))
    throw PreconditionError("plug-in analysis needs alpha/pi0 > alpha_star");
  const ProcedureConfig proc{.alpha = model.alpha(), .bandwidth_constant = cfg.bandwidth_constant};

  PluginResult out;
  for (std::size_t c = 0; c < cfg.ns.size(); ++c) {
    const std::size_t n = cfg.ns[c];
    const GeneratorSpec field = IidSpec{model.pi1(), {n}};
    auto reps = run_replicates(cfg.reps, stream_seed(cfg.seed, c), cfg.jobs, [&](std::size_t r, std::uint64_t s) {
      auto rep = detail::bh_replicate(field, model, r, s);
      const TestResult pi = plugin_procedure(rep.sample, proc);
      const double gamma_pi = gamma_process(rep.sample, pi.nu);
      auto& sum = rep.summary;
      sum.pi0_hat = pi.pi0_hat;
      sum.extras.emplace_back("nu_pi", pi.nu);
      sum.extras.emplace_back("R_pi", static_cast<double>(pi.R));
      sum.extras.emplace_back("FDP_pi", *pi.FDP);
      sum.extras.emplace_back("gamma_pi", gamma_pi);
      sum.extras.emplace_back("residual", gamma_pi - model.alpha() - model.alpha() * (1.0 - pi.pi0_hat / model.pi0()));
      sum.extras.emplace_back("floor_discrepancy", pi.floor_discrepancy ? 1.0 : 0.0);
      return std::move(sum);
    });
    PluginCell cell;
    cell.n = n;
    cell.reps = cfg.reps;
    cell.gamma_pi = estimate_mean(detail::extra_column(reps, "gamma_pi"));
    cell.fdp_pi = estimate_mean(detail::extra_column(reps, "FDP_pi"));
    cell.fdp_bh = estimate_mean(detail::column(reps, [](const auto& r) { return r.fdp; }));
    const auto rpi = detail::extra_column(reps, "R_pi");
    std::vector<double> extra;
    std::size_t ge = 0;
    for (std::size_t i = 0; i < reps.size(); ++i) {
      extra.push_back(rpi[i] - static_cast<double>(reps[i].R));
      if (rpi[i] >= static_cast<double>(reps[i].R)) ++ge;
    }
    cell.extra_rejections = estimate_mean(extra);
    cell.frac_rpi_ge_r = static_cast<double>(ge) / static_cast<double>(reps.size());
    cell.pi0_hat = estimate_mean(detail::column(reps, [](const auto& r) { return r.pi0_hat; }));
    cell.adjusted_target = model.alpha() * cell.pi0_hat.value / model.pi0();
    const auto resid = detail::extra_column(reps, "residual");
    cell.residual = estimate_mean(resid);
    cell.residual_rms = stats::root_mean_square(resid);
    const auto flags = detail::extra_column(reps, "floor_discrepancy");
    cell.floor_discrepancies = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1.0));
    out.cells.push_back(cell);
    out.replicates.cells.push_back("n=" + std::to_string(n));
    out.replicates.replicates.push_back(std::move(reps));
  }
  return out;
}

inline void write_plugin_csv(std::ostream& out, const PluginResult& res) {
  out << "n,reps,mean_gamma_pi,se_mean_gamma_pi,adjusted_target,mean_FDP_pi,se_mean_FDP_pi,mean_FDP_bh,se_mean_FDP_bh,"
         "mean_extra_rejections,se_mean_extra_rejections,frac_Rpi_ge_R,mean_pi0_hat,se_mean_pi0_hat,mean_residual,"
         "se_mean_residual,rms_residual,floor_discrepancies\n";
  for (const auto& c : res.cells) {
    io::CsvRow row;
    row << c.n << c.reps << c.gamma_pi.value << c.gamma_pi.se << c.adjusted_target << c.fdp_pi.value << c.fdp_pi.se
        << c.fdp_bh.value << c.fdp_bh.se << c.extra_rejections.value << c.extra_rejections.se << c.frac_rpi_ge_r
        << c.pi0_hat.value << c.pi0_hat.se << c.residual.value << c.residual.se << c.residual_rms
        << c.floor_discrepancies;
    out << row.str();
  }
}

}  // namespace depfdr
