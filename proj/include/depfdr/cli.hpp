#pragma once

// Command-line front end.
//
//   depfdr field gen-iid|gen-linear|gen-ising   write a hypothesis field (CSV, optional PGM)
//   depfdr pvalues                              draw p-values for a field
//   depfdr test bh|plugin                       run a procedure on a p-value file
//   depfdr exp table1|criticality|boundary|bahadur|clt|plugin
//   depfdr restore                              Ising restoration images
//
// Exit codes: 0 success, 1 runtime failure (I/O), 2 usage error, 3 failed
// experiment precondition. Values come from flags, then the --config file
// (plain key=value lines), then defaults; DEPFDR_SEED replaces the default seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "depfdr/depfdr.hpp"

namespace depfdr::cli {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every tunable of every subcommand; each leaf exposes the subset it uses.
struct Settings {
  // model
  double alpha = 0.1;
  double pi0 = 0.5;
  double a = 1.0 / 98.0;
  // fields
  double pi1 = 0.5;
  std::string dims = "50x50";
  std::size_t n = 10'000;
  double rho = 0.5;
  std::size_t window = 2;
  std::optional<double> zstar;
  double beta = 0.3;
  std::size_t side = 50;
  std::uint64_t updates = 1'250'000;
  std::string init = "random";
  std::string field_kind = "iid";
  // procedures
  double cb = 1.0;
  bool no_clip = false;
  std::string procedure = "bh";
  // experiments
  std::string betas = "-0.3,0,0.1,0.2,0.3,0.4,0.44";
  std::string alphas = "0.1,0.01";
  std::string ns;          // empty: per-experiment default
  std::size_t reps = 0;    // 0: per-experiment default
  std::string stat = "nu_bh";
  // plumbing
  std::string seed_text;
  std::uint64_t seed = kDefaultMasterSeed;
  std::size_t jobs = 1;
  std::string config;
  std::string out;
  std::string field_path;
  std::string pvals_path;
  std::string pgm_path;
  std::string run_id = "1";
};

struct Invocation {
  std::vector<std::string> path;  // e.g. {"exp", "table1"}
  Settings settings;
  std::string manifest;           // resolved configuration, one line
};

namespace detail {

inline std::vector<double> parse_double_list(const std::string& s, const char* what) {
  std::vector<double> out;
  try {
    for (const auto& cell : io::split(s, ',')) out.push_back(io::parse_double(cell));
  } catch (const io::FormatError&) {
    throw UsageError(std::string("bad ") + what + " list '" + s + "'");
  }
  return out;
}

inline std::vector<std::size_t> parse_size_list(const std::string& s, const char* what) {
  std::vector<std::size_t> out;
  for (double v : parse_double_list(s, what)) {
    if (!(v >= 1.0) || v != std::floor(v)) throw UsageError(std::string("bad ") + what + " entry in '" + s + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

inline IsingInit parse_init(const std::string& s) {
  if (s == "random") return IsingInit::random;
  if (s == "all-minus") return IsingInit::all_minus;
  if (s == "all-plus") return IsingInit::all_plus;
  throw UsageError("unknown --init '" + s + "'");
}

inline Procedure parse_procedure(const std::string& s) {
  if (s == "bh") return Procedure::bh;
  if (s == "plugin") return Procedure::plugin;
  throw UsageError("unknown procedure '" + s + "'");
}

// Builds the CLI11 tree bound to one Settings object.
class Parser {
 public:
  Parser() : app_("Simulation laboratory for false discovery control under dependent hypotheses", "depfdr") {
    app_.require_subcommand(1);
    auto* field = app_.add_subcommand("field", "Generate a hypothesis field");
    field->require_subcommand(1);
    auto* iid = leaf(field, "gen-iid", "Independent Bernoulli(pi1) sites");
    opt(iid, "pi1", s_.pi1, "P(H=1)")->check(CLI::Range(0.0, 1.0));
    opt(iid, "dims", s_.dims, "Box shape, e.g. 50x50");
    field_outputs(iid);
    auto* lin = leaf(field, "gen-linear", "Truncation indicators of a moving average with a_i = rho^|i|");
    opt(lin, "n", s_.n, "Number of sites")->check(CLI::PositiveNumber);
    opt(lin, "rho", s_.rho, "Coefficient decay");
    opt(lin, "window", s_.window, "Half window L");
    opt(lin, "pi1", s_.pi1, "Target P(H=1); calibrates z*")->check(CLI::Range(0.0, 1.0));
    lin->add_option("--zstar", s_.zstar, "Explicit threshold z* (overrides --pi1)");
    field_outputs(lin);
    auto* ising = leaf(field, "gen-ising", "2-D Ising field by random-site Gibbs updates");
    ising_options(ising);
    field_outputs(ising);

    auto* pv = leaf(&app_, "pvalues", "Draw p-values for a field");
    pv->add_option("--field", s_.field_path, "Field CSV")->required();
    opt(pv, "a", s_.a, "Alternative shape a")->check(CLI::PositiveNumber);
    pv->add_option("--out", s_.out, "Output sample CSV (default pvalues.csv)");

    auto* test = app_.add_subcommand("test", "Run a testing procedure on a p-value file");
    test->require_subcommand(1);
    for (const char* name : {"bh", "plugin"}) {
      auto* t = leaf(test, name, std::string(name) == "bh" ? "Benjamini-Hochberg step-up" : "Plug-in procedure");
      t->add_option("--pvals", s_.pvals_path, "Sample CSV with header h,x or x")->required();
      alpha_option(t);
      if (std::string(name) == "plugin") plugin_options(t);
      t->add_option("--out", s_.out, "Results CSV (optional)");
      opt(t, "run-id", s_.run_id, "run_id column value");
    }

    auto* exp = app_.add_subcommand("exp", "Monte Carlo experiments");
    exp->require_subcommand(1);
    auto* t1 = leaf(exp, "table1", "E(delta1^2) and E(|delta1-delta2|^2) across Ising couplings");
    opt(t1, "betas", s_.betas, "Comma-separated couplings");
    opt(t1, "side", s_.side, "Lattice side");
    opt(t1, "updates", s_.updates, "Gibbs site updates per field");
    alpha_option(t1);
    opt(t1, "a", s_.a, "Alternative shape a")->check(CLI::PositiveNumber);
    experiment_outputs(t1, "100");

    auto* crit = leaf(exp, "criticality", "Distribution of R on both sides of alpha_star");
    opt(crit, "alphas", s_.alphas, "Comma-separated levels");
    model_options(crit);
    opt(crit, "field", s_.field_kind, "iid or linear");
    opt(crit, "rho", s_.rho, "Linear field coefficient decay");
    opt(crit, "window", s_.window, "Linear field half window");
    ns_option(crit, "10000,100000");
    experiment_outputs(crit, "200");

    auto* bnd = leaf(exp, "boundary", "Law of n^{1/3} nu_BH at alpha = alpha_star");
    model_options(bnd);
    ns_option(bnd, "100000");
    experiment_outputs(bnd, "1000");

    auto* bah = leaf(exp, "bahadur", "Remainder rate of the linear expansion of nu_BH");
    alpha_option(bah);
    model_options(bah);
    ns_option(bah, "1000,3000,10000,30000,100000");
    experiment_outputs(bah, "500");

    auto* clt = leaf(exp, "clt", "Normality diagnostics of root-n statistics");
    opt(clt, "stat", s_.stat, "nu_bh, fdp or count");
    opt(clt, "field", s_.field_kind, "iid, linear or ising");
    opt(clt, "pi1", s_.pi1, "P(H=1) of the iid field")->check(CLI::Range(0.0, 1.0));
    opt(clt, "n", s_.n, "Sites of iid/linear fields")->check(CLI::PositiveNumber);
    opt(clt, "rho", s_.rho, "Linear field coefficient decay");
    opt(clt, "window", s_.window, "Linear field half window");
    ising_options(clt);
    alpha_option(clt);
    opt(clt, "a", s_.a, "Alternative shape a")->check(CLI::PositiveNumber);
    experiment_outputs(clt, "1000");

    auto* plug = leaf(exp, "plugin", "Plug-in procedure against BH");
    alpha_option(plug);
    model_options(plug);
    plugin_options(plug);
    ns_option(plug, "10000,100000");
    experiment_outputs(plug, "500");

    auto* rest = leaf(&app_, "restore", "Ising truth, restored and difference images");
    ising_options(rest);
    alpha_option(rest);
    opt(rest, "a", s_.a, "Alternative shape a")->check(CLI::PositiveNumber);
    opt(rest, "procedure", s_.procedure, "bh or plugin");
    plugin_options(rest);
    rest->add_option("--out", s_.out, "Output directory (default restore)");
  }

  CLI::App& app() { return app_; }
  Settings& settings() { return s_; }

  CLI::App* active_leaf() {
    CLI::App* cur = &app_;
    while (true) {
      auto subs = cur->get_subcommands();
      if (subs.empty()) return cur;
      cur = subs.front();
    }
  }

  /// Experiment-specific default of --reps / --ns for the active leaf.
  std::string leaf_default(CLI::App* leaf, const std::string& key) const {
    const auto it = defaults_.find(leaf->get_name() + "/" + key);
    return it == defaults_.end() ? std::string{} : it->second;
  }

 private:
  CLI::App* leaf(CLI::App* parent, const std::string& name, const std::string& help) {
    auto* sub = parent->add_subcommand(name, help);
    sub->add_option("--seed", s_.seed_text, "Master seed (decimal or 0x hex; default 0x5EEDF00D or $DEPFDR_SEED)");
    sub->add_option("--config", s_.config, "File of key=value lines; flags take precedence");
    return sub;
  }

  template <class T>
  CLI::Option* opt(CLI::App* sub, const std::string& name, T& target, const std::string& help) {
    return sub->add_option("--" + name, target, help)->capture_default_str();
  }

  void alpha_option(CLI::App* sub) {
    opt(sub, "alpha", s_.alpha, "Control level in (0,1)")
        ->check(CLI::Validator(
            [](std::string& v) {
              double x = 0.0;
              try {
                x = io::parse_double(v);
              } catch (const io::FormatError&) {
                return std::string("alpha is not a number");
              }
              return (x > 0.0 && x < 1.0) ? std::string{} : std::string("alpha must lie strictly inside (0,1)");
            },
            "(0,1)"));
  }

  void model_options(CLI::App* sub) {
    opt(sub, "pi0", s_.pi0, "Proportion of true nulls")->check(CLI::Range(0.0, 1.0));
    opt(sub, "a", s_.a, "Alternative shape a")->check(CLI::PositiveNumber);
  }

  void plugin_options(CLI::App* sub) {
    opt(sub, "cb", s_.cb, "Bandwidth constant: b = cb * n^(-1/3)")->check(CLI::PositiveNumber);
    sub->add_flag("--no-clip", s_.no_clip, "Do not clip pi0_hat into (0,1]");
  }

  void ising_options(CLI::App* sub) {
    opt(sub, "beta", s_.beta, "Ising coupling");
    opt(sub, "side", s_.side, "Lattice side")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
    opt(sub, "updates", s_.updates, "Gibbs site updates")->check(CLI::PositiveNumber);
    opt(sub, "init", s_.init, "random, all-minus or all-plus");
  }

  void field_outputs(CLI::App* sub) {
    sub->add_option("--out", s_.out, "Field CSV path (default field.csv)");
    sub->add_option("--pgm", s_.pgm_path, "Also write a PGM image (1-D/2-D fields)");
  }

  void ns_option(CLI::App* sub, const std::string& def) {
    sub->add_option("--ns", s_.ns, "Comma-separated sizes (default " + def + ")");
    defaults_[sub->get_name() + "/ns"] = def;
  }

  void experiment_outputs(CLI::App* sub, const std::string& reps) {
    sub->add_option("--reps", s_.reps, "Replicates per cell (default " + reps + ")");
    defaults_[sub->get_name() + "/reps"] = reps;
    sub->add_option("--jobs", s_.jobs, "Worker threads; never changes output")->check(CLI::PositiveNumber);
    sub->add_option("--out", s_.out, "Output directory (default .)");
  }

  CLI::App app_;
  Settings s_;
  std::map<std::string, std::string> defaults_;
};

inline std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = io::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError("config line is not key=value: '" + t + "'");
    kv[io::trim(t.substr(0, eq))] = io::trim(t.substr(eq + 1));
  }
  return kv;
}

inline void parse_reversed(CLI::App& app, std::vector<std::string> args) {
  std::reverse(args.begin(), args.end());
  app.parse(args);
}

inline std::string manifest_line(CLI::App* leaf, const std::vector<std::string>& path, const Settings& s) {
  std::ostringstream m;
  m << "depfdr";
  for (const auto& p : path) m << ' ' << p;
  for (const auto* o : leaf->get_options()) {
    const std::string name = o->get_single_name();
    if (name.empty() || name == "help" || name == "seed" || name == "jobs" || name == "config") continue;
    std::string value;
    if (o->count() > 0) {
      for (const auto& r : o->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = o->get_default_str();
    }
    m << ' ' << name << '=' << value;
  }
  m << " seed=" << s.seed;
  return m.str();
}

}  // namespace detail

namespace detail {

inline Invocation finalize(Parser& parser, std::vector<std::string> path) {
  Invocation inv{std::move(path), parser.settings(), {}};
  CLI::App* leaf = parser.active_leaf();
  Settings& s = inv.settings;
  if (s.reps == 0) {
    const auto def = parser.leaf_default(leaf, "reps");
    if (!def.empty()) s.reps = std::stoul(def);
  }
  if (s.ns.empty()) s.ns = parser.leaf_default(leaf, "ns");
  if (!s.seed_text.empty()) {
    s.seed = io::parse_unsigned(s.seed_text);
  } else if (const char* env = std::getenv("DEPFDR_SEED")) {
    s.seed = io::parse_unsigned(env);
  }
  inv.manifest = manifest_line(leaf, inv.path, s);
  return inv;
}

}  // namespace detail

/// Resolves flags, config file, environment and defaults. Throws CLI::ParseError
/// or UsageError on bad input.
inline Invocation parse_config(const std::vector<std::string>& args) {
  detail::Parser parser;
  detail::parse_reversed(parser.app(), args);
  CLI::App* leaf = parser.active_leaf();

  std::vector<std::string> path;
  for (CLI::App* cur = leaf; cur && cur->get_parent(); cur = cur->get_parent()) path.insert(path.begin(), cur->get_name());

  if (parser.settings().config.empty()) return detail::finalize(parser, std::move(path));

  std::vector<std::string> combined = args;
  for (const auto& [key, value] : detail::read_config_file(parser.settings().config)) {
    const CLI::Option* o = leaf->get_option_no_throw("--" + key);
    if (o == nullptr || key == "config" || key == "help") throw UsageError("unknown config key '" + key + "'");
    if (o->count() == 0) combined.push_back("--" + key + "=" + value);
  }
  detail::Parser reparsed;
  detail::parse_reversed(reparsed.app(), combined);
  return detail::finalize(reparsed, std::move(path));
}

namespace detail {

inline std::filesystem::path output_dir(const Settings& s, const char* fallback) {
  std::filesystem::path dir = s.out.empty() ? fallback : s.out;
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_manifest(const std::filesystem::path& dir, const Invocation& inv) {
  io::write_file((dir / "manifest.txt").string(), inv.manifest + "\n");
}

inline std::string to_text(auto writer, const auto& result) {
  std::ostringstream ss;
  writer(ss, result);
  return ss.str();
}

inline void save_experiment(const Invocation& inv, const std::string& kind, const std::string& summary,
                            const ReplicateTable& reps) {
  const auto dir = output_dir(inv.settings, ".");
  io::write_file((dir / (kind + ".csv")).string(), summary);
  std::ostringstream r;
  write_replicates_csv(r, reps);
  io::write_file((dir / (kind + "_replicates.csv")).string(), r.str());
  write_manifest(dir, inv);
}

inline std::string fmt(double v) { return io::format_double(v); }

inline int run_field(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const Settings& s = inv.settings;
  const std::string kind = inv.path.at(1);
  HypothesisField field;
  if (kind == "gen-iid") {
    field = gen_iid(s.pi1, io::parse_dims(s.dims), s.seed);
  } else if (kind == "gen-linear") {
    auto p = LinearFieldParams::geometric(s.rho, s.window, s.pi1);
    if (s.zstar) {
      p.target_pi1.reset();
      p.threshold = *s.zstar;
    } else if (!(s.pi1 > 0.0 && s.pi1 < 1.0)) {
      throw UsageError("gen-linear needs --pi1 strictly inside (0,1) or an explicit --zstar");
    }
    field = gen_linear_indicator(p, s.n, s.seed);
  } else {
    check_ising_regime(s.beta, err);
    field = gen_ising({s.beta, s.side, s.updates, parse_init(s.init)}, s.seed);
  }
  const std::string path = s.out.empty() ? "field.csv" : s.out;
  std::ostringstream csv;
  io::write_field_csv(csv, field);
  io::write_file(path, csv.str());
  if (!s.pgm_path.empty()) io::write_file(s.pgm_path, write_pgm(field));
  const auto parent = std::filesystem::absolute(path).parent_path();
  write_manifest(parent, inv);
  out << "field kind=" << field.info().kind << " dims=" << dims_to_string(field.dims()) << " N_C=" << field.count_ones()
      << " out=" << path << '\n';
  return 0;
}

inline int run_pvalues(const Invocation& inv, std::ostream& out) {
  const Settings& s = inv.settings;
  std::istringstream in(io::read_file(s.field_path));
  const HypothesisField field = io::read_field_csv(in);
  const PValueSample sample = generate_pvalues(field, AlternativeDistribution::paper(s.a), s.seed);
  std::ostringstream csv;
  io::write_sample_csv(csv, sample);
  const std::string path = s.out.empty() ? "pvalues.csv" : s.out;
  io::write_file(path, csv.str());
  write_manifest(std::filesystem::absolute(path).parent_path(), inv);
  out << "pvalues n=" << sample.size() << " N_C=" << field.count_ones() << " out=" << path << '\n';
  return 0;
}

inline std::string opt_text(const std::optional<double>& v) { return v ? fmt(*v) : "NA"; }
inline std::string opt_text(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "NA"; }

inline int run_test(const Invocation& inv, std::ostream& out) {
  const Settings& s = inv.settings;
  std::istringstream in(io::read_file(s.pvals_path));
  const PValueSample sample = io::read_sample_csv(in);
  const ProcedureConfig cfg{.alpha = s.alpha, .bandwidth_constant = s.cb, .pi0_clip = !s.no_clip};
  const TestResult r = run_procedure(parse_procedure(inv.path.at(1)), sample, cfg);
  if (!s.out.empty()) {
    io::write_file(s.out, std::string(io::kResultHeader) + io::result_row(s.run_id, r));
    write_manifest(std::filesystem::absolute(s.out).parent_path(), inv);
  }
  out << to_string(r.procedure) << ": R=" << r.R << " FDP=" << opt_text(r.FDP) << " V=" << opt_text(r.V)
      << " FNP=" << opt_text(r.FNP) << " nu=" << fmt(r.nu) << " threshold=" << fmt(r.threshold);
  if (r.procedure == Procedure::plugin) out << " pi0_hat=" << fmt(r.pi0_hat) << " pi0_hat_raw=" << fmt(r.pi0_hat_raw);
  out << '\n';
  return 0;
}

inline GeneratorSpec clt_field(const Settings& s) {
  if (s.field_kind == "iid") return IidSpec{s.pi1, {s.n}};
  if (s.field_kind == "linear") return LinearSpec{LinearFieldParams::geometric(s.rho, s.window, 0.5), s.n};
  if (s.field_kind == "ising") return IsingSpec{{s.beta, s.side, s.updates, parse_init(s.init)}};
  throw UsageError("unknown --field '" + s.field_kind + "'");
}

inline int run_experiment(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const Settings& s = inv.settings;
  const std::string kind = inv.path.at(1);
  if (kind == "table1") {
    Table1Config c;
    c.betas = parse_double_list(s.betas, "--betas");
    for (double b : c.betas) check_ising_regime(b, err);
    c.reps = s.reps;
    c.side = s.side;
    c.site_updates = s.updates;
    c.alpha = s.alpha;
    c.a = s.a;
    c.seed = s.seed;
    c.jobs = s.jobs;
    const auto res = table1_experiment(c);
    save_experiment(inv, kind, to_text(write_table1_csv, res), res.replicates);
    for (const auto& r : res.rows)
      out << "beta=" << fmt(r.beta) << " E(delta1^2)=" << fmt(r.delta1_sq.value) << " (se " << fmt(r.delta1_sq.se)
          << ") E(|delta1-delta2|^2)=" << fmt(r.diff_sq.value) << " (se " << fmt(r.diff_sq.se) << ")\n";
  } else if (kind == "criticality") {
    CriticalityConfig c;
    c.alphas = parse_double_list(s.alphas, "--alphas");
    for (double a : c.alphas)
      if (!(a > 0.0 && a < 1.0)) throw UsageError("every --alphas entry must lie in (0,1)");
    c.ns = parse_size_list(s.ns, "--ns");
    c.reps = s.reps;
    c.pi0 = s.pi0;
    c.a = s.a;
    if (s.field_kind == "linear") c.linear = LinearFieldParams::geometric(s.rho, s.window);
    else if (s.field_kind != "iid") throw UsageError("criticality supports --field iid or linear");
    c.seed = s.seed;
    c.jobs = s.jobs;
    const auto res = criticality_experiment(c);
    save_experiment(inv, kind, to_text(write_criticality_csv, res), res.replicates);
    for (const auto& cell : res.cells)
      out << "alpha=" << fmt(cell.alpha) << " n=" << cell.n << " mean_R/n=" << fmt(cell.ratio_mean.value) << " (se "
          << fmt(cell.ratio_mean.se) << ") p95_R=" << fmt(cell.R_p95) << " limit=" << fmt(cell.limit_ratio) << '\n';
  } else if (kind == "boundary") {
    BoundaryConfig c;
    c.ns = parse_size_list(s.ns, "--ns");
    c.reps = s.reps;
    c.pi0 = s.pi0;
    c.a = s.a;
    c.seed = s.seed;
    c.jobs = s.jobs;
    const auto res = boundary_experiment(c);
    save_experiment(inv, kind, to_text(write_boundary_csv, res), res.replicates);
    for (const auto& cell : res.cells)
      out << "n=" << cell.n << " alpha_star=" << fmt(cell.alpha) << " c0=" << fmt(cell.c0)
          << " KS=" << fmt(cell.ks_distance) << " zero_mass=" << fmt(cell.zero_mass) << '\n';
  } else if (kind == "bahadur") {
    BahadurConfig c;
    c.ns = parse_size_list(s.ns, "--ns");
    c.reps = s.reps;
    c.model = {s.pi0, s.a, s.alpha};
    c.seed = s.seed;
    c.jobs = s.jobs;
    const auto res = bahadur_experiment(c);
    save_experiment(inv, kind, to_text(write_bahadur_csv, res), res.replicates);
    out << "remainder_slope=" << fmt(res.remainder_slope) << " deviation_slope=" << fmt(res.deviation_slope) << '\n';
  } else if (kind == "clt") {
    CltConfig c;
    if (s.stat == "nu_bh") c.statistic = CltStatistic::nu_bh;
    else if (s.stat == "fdp") c.statistic = CltStatistic::fdp;
    else if (s.stat == "count") c.statistic = CltStatistic::count;
    else throw UsageError("unknown --stat '" + s.stat + "'");
    if (s.field_kind == "ising") check_ising_regime(s.beta, err);
    c.field = clt_field(s);
    c.alpha = s.alpha;
    c.a = s.a;
    c.reps = s.reps;
    c.seed = s.seed;
    c.jobs = s.jobs;
    const auto res = clt_experiments(c);
    save_experiment(inv, kind, to_text(write_clt_csv, res), res.replicates);
    out << "stat=" << to_string(res.statistic) << " qq=" << fmt(res.shape.qq_correlation)
        << " skewness=" << fmt(res.shape.skewness) << " excess_kurtosis=" << fmt(res.shape.excess_kurtosis) << '\n';
  } else {
    PluginConfig c;
    c.ns = parse_size_list(s.ns, "--ns");
    c.reps = s.reps;
    c.model = {s.pi0, s.a, s.alpha};
    c.bandwidth_constant = s.cb;
    c.seed = s.seed;
    c.jobs = s.jobs;
    const auto res = plugin_experiment(c);
    save_experiment(inv, kind, to_text(write_plugin_csv, res), res.replicates);
    for (const auto& cell : res.cells)
      out << "n=" << cell.n << " mean_gamma_pi=" << fmt(cell.gamma_pi.value) << " mean_FDP_bh=" << fmt(cell.fdp_bh.value)
          << " frac_Rpi_ge_R=" << fmt(cell.frac_rpi_ge_r) << " rms_residual=" << fmt(cell.residual_rms) << '\n';
  }
  return 0;
}

inline int run_restore_cmd(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const Settings& s = inv.settings;
  check_ising_regime(s.beta, err);
  RestoreConfig c;
  c.ising = {s.beta, s.side, s.updates, parse_init(s.init)};
  c.a = s.a;
  c.procedure_config = {.alpha = s.alpha, .bandwidth_constant = s.cb, .pi0_clip = !s.no_clip};
  c.procedure = parse_procedure(s.procedure);
  c.seed = s.seed;
  const RestoreRun run = run_restore(c);
  const auto dir = output_dir(s, "restore");
  io::write_file((dir / "truth.pgm").string(), run.truth_pgm);
  io::write_file((dir / "restored.pgm").string(), run.restored_pgm);
  io::write_file((dir / "diff.ppm").string(), run.diff_ppm);
  io::write_file((dir / "result.csv").string(), std::string(io::kResultHeader) + io::result_row(s.run_id, run.result));
  write_manifest(dir, inv);
  out << "restore R=" << run.result.R << " V=" << *run.result.V << " FP=" << run.grid.count(Label::FP)
      << " FN=" << run.grid.count(Label::FN) << " FDP=" << fmt(*run.result.FDP) << " out=" << dir.string() << '\n';
  return 0;
}

}  // namespace detail

/// Entry point; returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Invocation inv;
  try {
    inv = parse_config(args);
  } catch (const CLI::CallForHelp&) {
    detail::Parser p;
    try {
      detail::parse_reversed(p.app(), args);
    } catch (const CLI::CallForHelp&) {
    } catch (const CLI::ParseError&) {
    }
    out << p.active_leaf()->help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const io::FormatError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  err << inv.manifest << '\n';
  try {
    const std::string& top = inv.path.at(0);
    if (top == "field") return detail::run_field(inv, out, err);
    if (top == "pvalues") return detail::run_pvalues(inv, out);
    if (top == "test") return detail::run_test(inv, out);
    if (top == "exp") return detail::run_experiment(inv, out, err);
    return detail::run_restore_cmd(inv, out, err);
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << '\n';
    return 3;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, out, err);
}

}  // namespace depfdr::cli
