// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "depfdr/dist_model.hpp"
#include "depfdr/empirical_proc.hpp"
#include "depfdr/experiments.hpp"
#include "depfdr/field_gen.hpp"
#include "depfdr/imaging.hpp"
#include "depfdr/stats.hpp"
#include "depfdr/testing_procedures.hpp"
#include "../unit/oracles.hpp"

using namespace depfdr;

namespace {

constexpr double kA = 1.0 / 98.0;
constexpr std::uint64_t kSeed = kDefaultMasterSeed;

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Report {
  int failures = 0;

  void line(int id, bool pass, const std::string& detail) {
    std::printf("C%-2d %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

std::string fmt(const char* f, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

bool within_factor(double value, double target, double factor) {
  return value >= target / factor && value <= target * factor;
}

void table1(Report& rep) {
  Table1Config iid;
  iid.betas = {0.0};
  iid.jobs = jobs();
  iid.seed = kSeed;
  auto start = std::chrono::steady_clock::now();
  const auto r0 = table1_experiment(iid).rows.at(0);
  const double t0 = seconds_since(start);

  Table1Config ising = iid;
  ising.betas = {0.3};
  ising.site_updates = 1'250'000;
  start = std::chrono::steady_clock::now();
  const auto r3 = table1_experiment(ising).rows.at(0);
  const double t3 = seconds_since(start);

  const bool ok0 = within_factor(r0.delta1_sq.value, 4.4e-5, 2.0) && t0 < 60.0;
  const bool ok3 = within_factor(r3.delta1_sq.value, 6.0e-5, 3.0) && r3.diff_sq.value < r3.delta1_sq.value / 5.0 && t3 < 1200.0;
  rep.line(1, ok0 && ok3,
           fmt("beta=0: E(d1^2)=%.3g (%.1fs); beta=0.3: E(d1^2)=%.3g E(diff^2)=%.3g (%.1fs)", r0.delta1_sq.value, t0,
               r3.delta1_sq.value, r3.diff_sq.value, t3));
}

void fdr_identity(Report& rep) {
  const PopulationModel model = PopulationModel::paper_default(0.1, 0.5, kA);
  const GeneratorSpec field = IidSpec{0.5, {2500}};
  const std::size_t reps = 2000;
  const auto out = run_replicates(reps, stream_seed(kSeed, 2), jobs(), [&](std::size_t r, std::uint64_t s) {
    return detail::bh_replicate(field, model, r, s).summary.fdp;
  });
  const Estimate m = estimate_mean(out);
  rep.line(2, std::abs(m.value - 0.05) <= 0.005, fmt("mean FDP=%.5f (se %.5f) over %zu reps, n=2500", m.value, m.se, reps));
}

void criticality(Report& rep) {
  CriticalityConfig cfg;
  cfg.alphas = {0.1, 0.01};
  cfg.ns = {10'000, 100'000};
  cfg.reps = 200;
  cfg.jobs = jobs();
  cfg.seed = kSeed;
  const auto res = criticality_experiment(cfg);
  const double nu0 = oracle::bisect_increasing(
      [](double t) { return t / 0.1 - (0.5 * t + 0.5 * oracle::G_quadrature(t, kA)); }, 1e-3, 1.0, 1e-13);
  const auto& sup = res.cell(0.1, 100'000);
  const double limit = nu0 / 0.1;
  const bool ok_sup = std::abs(sup.ratio_mean.value / limit - 1.0) <= 0.02;
  const auto& s4 = res.cell(0.01, 10'000);
  const auto& s5 = res.cell(0.01, 100'000);
  const bool ok_growth = s5.R_p95 < 2.0 * s4.R_p95;
  const bool ok_small = s5.ratio_max < 1e-3;
  rep.line(3, ok_sup && ok_growth && ok_small,
           fmt("alpha=0.1: mean R/n=%.5f vs %.5f; alpha=0.01: p95 R %.2f -> %.2f, max R/n at 1e5=%.2g (at 1e4=%.2g)",
               sup.ratio_mean.value, limit, s4.R_p95, s5.R_p95, s5.ratio_max, s4.ratio_max));
}

void bahadur(Report& rep) {
  BahadurConfig cfg;
  cfg.ns = {1'000, 3'000, 10'000, 30'000, 100'000};
  cfg.reps = 500;
  cfg.jobs = jobs();
  cfg.seed = kSeed;
  const auto res = bahadur_experiment(cfg);
  const bool ok = res.remainder_slope <= -0.6 && res.deviation_slope >= -0.6 && res.deviation_slope <= -0.4;
  rep.line(4, ok, fmt("remainder slope=%.3f, first-order slope=%.3f", res.remainder_slope, res.deviation_slope));
}

void boundary(Report& rep) {
  BoundaryConfig cfg;
  cfg.ns = {100'000};
  cfg.reps = 1000;
  cfg.jobs = jobs();
  cfg.seed = kSeed;
  const auto res = boundary_experiment(cfg);
  const auto& c = res.cells.at(0);
  const bool ok = c.ks_distance <= 0.1 && std::abs(c.zero_mass - 0.5) <= 0.05;
  rep.line(5, ok, fmt("KS=%.3f, mass near 0=%.3f (band %.2g), mean z=%.4g", c.ks_distance, c.zero_mass, c.zero_band,
                      c.z_mean.value));
}

void plugin(Report& rep) {
  PluginConfig cfg;
  cfg.ns = {10'000, 100'000};
  cfg.reps = 500;
  cfg.jobs = jobs();
  cfg.seed = kSeed;
  const auto res = plugin_experiment(cfg);
  const auto& small = res.cells.at(0);
  const auto& big = res.cells.at(1);
  const bool ok = std::abs(big.gamma_pi.value - 0.1) <= 0.01 && big.frac_rpi_ge_r >= 0.99 &&
                  big.residual_rms < small.residual_rms;
  rep.line(6, ok,
           fmt("mean Gamma(nu_PI)=%.5f, P(R_PI>=R)=%.3f, RMS residual %.3g -> %.3g", big.gamma_pi.value,
               big.frac_rpi_ge_r, small.residual_rms, big.residual_rms));
}

// Visits every nondecreasing sample of size n on {0, 1/16, ..., 1}.
template <typename Fn>
void for_each_grid_sample(std::size_t n, Fn&& fn) {
  std::vector<int> idx(n, 0);
  std::vector<double> x(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) x[i] = idx[i] / 16.0;
    fn(x);
    std::size_t pos = n;
    while (pos > 0 && idx[pos - 1] == 16) --pos;
    if (pos == 0) return;
    const int v = idx[pos - 1] + 1;
    for (std::size_t i = pos - 1; i < n; ++i) idx[i] = v;
  }
}

// Each sample is presented in rotated order with one truth pattern to the
// procedure; the remaining patterns are checked against its rejection set.
void brute_force(Report& rep) {
  std::size_t samples = 0, mismatches = 0, sandwich_failures = 0;
  for (double alpha : {0.05, 0.1, 0.2, 0.45}) {
    for (std::size_t n = 1; n <= 8; ++n) {
      for_each_grid_sample(n, [&](const std::vector<double>& sorted) {
        const std::size_t shift = samples % n;
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = sorted[(i + shift) % n];
        const unsigned patterns = 1u << n;
        const unsigned chosen = static_cast<unsigned>(samples % patterns);
        ++samples;
        std::vector<std::uint8_t> h(n);
        for (std::size_t i = 0; i < n; ++i) h[i] = (chosen >> i) & 1u;
        const auto r = bh_procedure(PValueSample(h, x), {alpha});
        const std::size_t R = std::min(oracle::bh_count(x, alpha), n);
        const double thr = oracle::order_stat(x, R);
        bool bad = r.R != R || r.threshold != thr;
        for (std::size_t i = 0; i < n; ++i) bad |= (r.rejected[i] != 0) != (R > 0 && x[i] <= thr);
        for (unsigned mask = 0; mask < patterns && !bad; ++mask) {
          std::vector<std::uint8_t> hm(n);
          std::size_t V = 0, missed = 0;
          for (std::size_t i = 0; i < n; ++i) {
            hm[i] = (mask >> i) & 1u;
            const bool rej = R > 0 && x[i] <= thr;
            V += rej && !hm[i];
            missed += !rej && hm[i];
          }
          const auto acc = account(r.rejected, hm);
          bad |= acc.V != V || acc.FNP != static_cast<double>(missed) / static_cast<double>(std::max<std::size_t>(n - R, 1));
          if (mask == chosen) bad |= *r.V != V;
        }
        mismatches += bad;
        const double nu = nu_bh_empirical(PValueSample(x), alpha);
        const double scaled = static_cast<double>(n) * nu / alpha;
        sandwich_failures += !(static_cast<double>(R) <= scaled * (1.0 + 1e-12) && scaled < static_cast<double>(R + 1));
      });
    }
  }
  rep.line(7, mismatches == 0 && sandwich_failures == 0,
           fmt("%zu samples x all truth patterns: %zu mismatches, %zu sandwich failures", samples, mismatches,
               sandwich_failures));
}

double forward_slope(const std::function<double(double)>& f, double h) {
  const double d1 = (f(h) - f(0.0)) / h;
  const double d2 = (f(h / 2) - f(0.0)) / (h / 2);
  return 2.0 * d2 - d1;
}

void analytic(Report& rep) {
  const auto alt = AlternativeDistribution::paper(kA);
  double quad_err = 0.0, inv_err = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    quad_err = std::max(quad_err, std::abs(alt.cdf(x) - oracle::G_quadrature(x, kA)));
    inv_err = std::max(inv_err, std::abs(alt.inverse(alt.cdf(x)) - x));
  }
  const PopulationModel model = PopulationModel::paper_default(0.1, 0.5, kA);
  const double star_err = std::abs(model.alpha_star() - 2.0 / 101.0);
  const double fd = forward_slope([&](double t) { return model.mixture_density(t); }, 1e-6);
  const double slope_rel = std::abs(fd / -9801.0 - 1.0);
  const double c0_rel = std::abs(model.c0() * 2.0 * std::sqrt(50.5) / 9801.0 - 1.0);
  const bool ok = quad_err <= 1e-10 && inv_err <= 1e-10 && star_err <= 1e-16 && slope_rel <= 1e-4 && c0_rel <= 1e-4;
  rep.line(8, ok,
           fmt("|G-quad|=%.2g, |Ginv(G)-x|=%.2g, |alpha*-2/101|=%.2g, f'(0) FD rel err=%.2g, c0 rel err=%.2g", quad_err,
               inv_err, star_err, slope_rel, c0_rel));
}

void clt(Report& rep) {
  CltConfig count;
  count.statistic = CltStatistic::count;
  count.field = IsingSpec{{.beta = 0.2, .side = 50, .site_updates = 1'250'000, .init = IsingInit::random}};
  count.reps = 500;
  count.jobs = jobs();
  count.seed = kSeed;
  const auto a = clt_experiments(count).shape;

  CltConfig nu;
  nu.statistic = CltStatistic::nu_bh;
  nu.field = IidSpec{0.5, {10'000}};
  nu.reps = 1000;
  nu.jobs = jobs();
  nu.seed = kSeed;
  const auto b = clt_experiments(nu).shape;
  const auto pass = [](const stats::NormalityDiagnostic& d) {
    return !d.degenerate && d.qq_correlation > 0.99 && std::abs(d.skewness) < 0.2;
  };
  rep.line(9, pass(a) && pass(b),
           fmt("Ising N_C: QQ=%.4f skew=%.3f; iid nu_BH: QQ=%.4f skew=%.3f", a.qq_correlation, a.skewness,
               b.qq_correlation, b.skewness));
}

void imaging(Report& rep) {
  const bool pgm = write_pgm(HypothesisField({1, 1}, {1})) == std::string("P5\n1 1\n255\n\x00", 12);
  const ClassificationGrid g{1, 2, {Label::FP, Label::FN}};
  const bool ppm = write_ppm(g) == std::string("P6\n2 1\n255\n") + std::string("\xff\x00\x00\x00\x00\xff", 6);
  std::size_t runs = 0, bad = 0;
  for (std::uint64_t r = 0; r < 10; ++r) {
    RestoreConfig cfg;
    cfg.ising = {0.3, 50, 1'250'000, IsingInit::random};
    cfg.seed = stream_seed(kSeed, r);
    cfg.procedure = r % 2 ? Procedure::plugin : Procedure::bh;
    const auto run = run_restore(cfg);
    const auto colours = count_ppm_colors(run.diff_ppm);
    const auto acc = account(run.result.rejected, run.truth.values());
    std::size_t fn = 0;
    for (std::size_t i = 0; i < run.truth.size(); ++i) fn += run.truth[i] == 1 && !run.result.rejected[i];
    bad += colours.red != *run.result.V || colours.red != acc.V || colours.blue != fn;
    ++runs;
  }
  rep.line(10, pgm && ppm && bad == 0,
           fmt("PGM golden %s, PPM golden %s, %zu/%zu restore runs with red=V and blue=FN", pgm ? "ok" : "bad",
               ppm ? "ok" : "bad", runs - bad, runs));
}

}  // namespace

int main() {
  Report rep;
  const auto start = std::chrono::steady_clock::now();
  table1(rep);
  fdr_identity(rep);
  criticality(rep);
  bahadur(rep);
  boundary(rep);
  plugin(rep);
  brute_force(rep);
  analytic(rep);
  clt(rep);
  imaging(rep);
  std::printf("%d of 10 criteria failed (%.0fs)\n", rep.failures, seconds_since(start));
  return rep.failures == 0 ? 0 : 1;
}
