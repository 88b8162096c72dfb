// Command-line front end: every experiment is reproducible from its seed
// and emits its full configuration as a provenance header.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "bridgefactor/bridge_rule.hpp"
#include "bridgefactor/concrete.hpp"
#include "bridgefactor/curve_table.hpp"
#include "bridgefactor/exponential_case.hpp"
#include "bridgefactor/mathcore.hpp"
#include "bridgefactor/simlab.hpp"
#include "json.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kDefaultSeed = 20240814;

using bridgefactor::CurveTable;
namespace table_io = bridgefactor::table_io;
namespace simlab = bridgefactor::simlab;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Insertion-ordered config echo: '#' comment lines for CSV, one object for
// JSON. Worker counts are deliberately excluded so outputs stay identical
// across thread counts.
class RunConfig {
 public:
  explicit RunConfig(const std::string& subcommand) {
    lines_.push_back(std::string("bridgefactor ") + kVersion);
    lines_.push_back("subcommand = " + subcommand);
    json_["version"] = kVersion;
    json_["subcommand"] = subcommand;
  }
  void add(const std::string& key, const std::string& value) {
    lines_.push_back(key + " = " + value);
    json_[key] = value;
  }
  void add(const std::string& key, const char* value) {
    add(key, std::string(value));
  }
  void add(const std::string& key, double value) {
    lines_.push_back(key + " = " + format_number(value));
    json_[key] = value;
  }
  void add(const std::string& key, std::uint64_t value) {
    lines_.push_back(key + " = " + std::to_string(value));
    json_[key] = value;
  }
  void add(const std::string& key, bool value) {
    lines_.push_back(key + " = " + (value ? "true" : "false"));
    json_[key] = value;
  }
  const std::vector<std::string>& lines() const { return lines_; }
  std::string json() const { return json_.dump(); }

 private:
  std::vector<std::string> lines_;
  nlohmann::json json_;
};

std::uint64_t parse_u64(const std::string& text) {
  std::size_t used = 0;
  if (text.empty() || text[0] == '-') throw std::invalid_argument(text);
  const unsigned long long v = std::stoull(text, &used);
  if (used != text.size()) throw std::invalid_argument(text);
  return v;
}

double parse_real(const std::string& text) {
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument(text);
  return v;
}

// LO:HI:STEP inclusive ranges or comma lists.
std::vector<std::size_t> parse_size_grid(const std::string& text,
                                         const std::string& flag) {
  try {
    std::vector<std::size_t> grid;
    if (text.find(':') != std::string::npos) {
      const auto a = text.find(':');
      const auto b = text.find(':', a + 1);
      if (b == std::string::npos || text.find(':', b + 1) != std::string::npos)
        throw std::invalid_argument(text);
      const std::uint64_t lo = parse_u64(text.substr(0, a));
      const std::uint64_t hi = parse_u64(text.substr(a + 1, b - a - 1));
      const std::uint64_t step = parse_u64(text.substr(b + 1));
      if (step == 0 || hi < lo) throw std::invalid_argument(text);
      for (std::uint64_t v = lo; v <= hi; v += step)
        grid.push_back(static_cast<std::size_t>(v));
    } else {
      std::size_t start = 0;
      while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = text.substr(
            start, comma == std::string::npos ? comma : comma - start);
        grid.push_back(static_cast<std::size_t>(parse_u64(piece)));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
    if (grid.empty()) throw std::invalid_argument(text);
    return grid;
  } catch (const std::exception&) {
    throw std::invalid_argument(flag + ": invalid grid '" + text + "'");
  }
}

std::vector<double> parse_real_grid(const std::string& text,
                                    const std::string& flag) {
  try {
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
      const auto a = text.find(':');
      const auto b = text.find(':', a + 1);
      if (b == std::string::npos || text.find(':', b + 1) != std::string::npos)
        throw std::invalid_argument(text);
      const double lo = parse_real(text.substr(0, a));
      const double hi = parse_real(text.substr(a + 1, b - a - 1));
      const double step = parse_real(text.substr(b + 1));
      if (!(step > 0.0) || hi < lo) throw std::invalid_argument(text);
      const auto count =
          static_cast<std::size_t>((hi - lo) / step + 1e-9) + 1;
      for (std::size_t i = 0; i < count; ++i)
        grid.push_back(lo + static_cast<double>(i) * step);
    } else {
      std::size_t start = 0;
      while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = text.substr(
            start, comma == std::string::npos ? comma : comma - start);
        grid.push_back(parse_real(piece));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
    if (grid.empty()) throw std::invalid_argument(text);
    return grid;
  } catch (const std::exception&) {
    throw std::invalid_argument(flag + ": invalid grid '" + text + "'");
  }
}

std::vector<std::size_t> range_grid(std::size_t lo, std::size_t hi,
                                    std::size_t step,
                                    const std::string& flags) {
  if (step == 0 || hi < lo) {
    throw std::invalid_argument(flags + ": invalid range");
  }
  std::vector<std::size_t> grid;
  for (std::size_t v = lo; v <= hi; v += step) grid.push_back(v);
  return grid;
}

std::uint64_t resolve_seed(const CLI::App* sub, std::uint64_t flag_value) {
  if (sub->count("--seed") > 0) return flag_value;
  if (const char* env = std::getenv("BRIDGEFACTOR_SEED")) {
    try {
      return parse_u64(env);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("BRIDGEFACTOR_SEED: invalid seed '") +
                                  env + "'");
    }
  }
  return kDefaultSeed;
}

void emit(const CurveTable& table, const RunConfig& config,
          const std::string& out, const std::string& format) {
  const std::string text = format == "json"
                               ? table_io::to_json(table, config.json())
                               : table_io::to_csv(table, config.lines());
  if (out.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) throw std::runtime_error("--out: cannot write " + out);
  file << text;
}

simlab::ExperimentCase case_from_name(const std::string& name) {
  if (name == "normal-known") return simlab::ExperimentCase::normal_known;
  if (name == "normal-two") return simlab::ExperimentCase::normal_two;
  if (name == "normal-unknown") return simlab::ExperimentCase::normal_unknown;
  if (name == "exponential") return simlab::ExperimentCase::exponential;
  throw std::invalid_argument("--case: unknown case '" + name + "'");
}

std::size_t default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void add_io_options(CLI::App* sub, std::string& out, std::string& format,
                    std::size_t& threads, std::uint64_t& seed) {
  sub->add_option("--out", out, "output path (stdout when omitted)");
  sub->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", threads,
                  "worker count; output is identical for any value");
  sub->add_option("--seed", seed,
                  "RNG seed (default: BRIDGEFACTOR_SEED or 20240814)");
}

int run(int argc, char** argv) {
  CLI::App app{"Bayes-factor experiment toolkit"};
  app.require_subcommand(1);
  const std::size_t hw_threads = default_threads();

  auto* bridge_cmd =
      app.add_subcommand("bridge", "training-size rule for one sample size");
  std::uint64_t bridge_n = 0;
  std::uint64_t bridge_k = 1;
  bridge_cmd->add_option("--n", bridge_n, "sample size")->required();
  bridge_cmd->add_option("--k", bridge_k, "parameter count");

  auto* fit_cmd = app.add_subcommand(
      "bridge-fit", "linear fit of N/ln N over a sample-size grid");
  std::uint64_t fit_nmin = 5;
  std::uint64_t fit_nmax = 500;
  std::uint64_t fit_step = 5;
  fit_cmd->add_option("--nmin", fit_nmin, "first sample size");
  fit_cmd->add_option("--nmax", fit_nmax, "last sample size");
  fit_cmd->add_option("--step", fit_step, "grid step");

  auto* cons_cmd = app.add_subcommand(
      "consistency", "replicate curves of log CVBF and log corrected GIBF");
  struct {
    std::string case_name;
    std::uint64_t n_min = 100;
    std::uint64_t n_max = 500;
    std::uint64_t step = 100;
    std::uint64_t reps = 1000;
    double theta = 0.0;
    double theta0 = 0.0;
    double sigma = 1.0;
    double beta = 1.0;
    double beta0 = 1.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    std::uint64_t splits = 50;
    double trim = 0.25;
    std::string out;
    std::string format = "csv";
    std::size_t threads = 1;
    std::uint64_t seed = kDefaultSeed;
  } cons;
  cons.threads = hw_threads;
  cons_cmd->add_option("--case", cons.case_name, "sampling model")
      ->required()
      ->check(CLI::IsMember(
          {"normal-known", "normal-two", "normal-unknown", "exponential"}));
  cons_cmd->add_option("--n-min", cons.n_min, "first sample size");
  cons_cmd->add_option("--n-max", cons.n_max, "last sample size");
  cons_cmd->add_option("--step", cons.step, "sample-size step");
  cons_cmd->add_option("--reps", cons.reps, "Monte-Carlo replicates");
  cons_cmd->add_option("--theta", cons.theta, "sampling mean");
  cons_cmd->add_option("--theta0", cons.theta0, "null mean");
  cons_cmd->add_option("--sigma", cons.sigma, "noise scale");
  cons_cmd->add_option("--beta", cons.beta, "exponential sampling rate");
  cons_cmd->add_option("--beta0", cons.beta0, "exponential null rate");
  cons_cmd->add_option("--mu1", cons.mu1, "group-1 mean (two-mean case)");
  cons_cmd->add_option("--mu2", cons.mu2, "group-2 mean (two-mean case)");
  cons_cmd->add_option("--splits", cons.splits, "random splits per CVBF");
  cons_cmd->add_option("--trim", cons.trim, "trimmed-mean fraction");
  add_io_options(cons_cmd, cons.out, cons.format, cons.threads, cons.seed);

  auto* roc_cmd = app.add_subcommand(
      "roc", "null/alternative detection rates over the training-size grid");
  struct {
    std::uint64_t n = 100;
    std::string m_grid = "5:95:5";
    std::uint64_t reps = 1000;
    std::uint64_t splits_per_bf = 2;
    std::uint64_t gibf_batch = 5;
    double theta0 = 0.0;
    double theta1 = 0.25;
    double sigma = 1.0;
    std::string out;
    std::string format = "csv";
    std::size_t threads = 1;
    std::uint64_t seed = kDefaultSeed;
  } roc;
  roc.threads = hw_threads;
  roc_cmd->add_option("--n", roc.n, "sample size");
  roc_cmd->add_option("--m-grid", roc.m_grid, "training-size grid");
  roc_cmd->add_option("--reps", roc.reps, "datasets per hypothesis per m");
  roc_cmd->add_option("--splits-per-bf", roc.splits_per_bf,
                      "random splits behind each CVBF score");
  roc_cmd->add_option("--gibf-batch", roc.gibf_batch,
                      "datasets pooled into one GIBF score");
  roc_cmd->add_option("--theta0", roc.theta0, "null mean");
  roc_cmd->add_option("--theta1", roc.theta1, "alternative mean");
  roc_cmd->add_option("--sigma", roc.sigma, "noise scale");
  add_io_options(roc_cmd, roc.out, roc.format, roc.threads, roc.seed);

  auto* sweep_cmd = app.add_subcommand(
      "exp-sweep", "exponential-rate sweep of mean log CVBF and GIBF");
  struct {
    std::string beta_grid = "0.12:0.30:0.002";
    std::uint64_t n = 100;
    std::uint64_t reps = 100;
    double beta0 = 0.2;
    std::uint64_t splits = 1;
    std::string out;
    std::string format = "csv";
    std::size_t threads = 1;
    std::uint64_t seed = kDefaultSeed;
  } sweep;
  sweep.threads = hw_threads;
  sweep_cmd->add_option("--beta-grid", sweep.beta_grid, "sampling-rate grid");
  sweep_cmd->add_option("--n", sweep.n, "sample size");
  sweep_cmd->add_option("--reps", sweep.reps, "replicates per grid rate");
  sweep_cmd->add_option("--beta0", sweep.beta0, "null rate");
  sweep_cmd->add_option("--splits", sweep.splits, "random splits per CVBF");
  add_io_options(sweep_cmd, sweep.out, sweep.format, sweep.threads,
                 sweep.seed);

  auto* crit_cmd = app.add_subcommand(
      "criteria", "penalized criteria next to CVBF and corrected GIBF");
  struct {
    std::string case_name;
    std::uint64_t n_min = 100;
    std::uint64_t n_max = 500;
    std::uint64_t step = 100;
    std::uint64_t reps = 1000;
    double theta = 0.0;
    double theta0 = 0.0;
    double sigma = 1.0;
    std::uint64_t splits = 50;
    std::string out;
    std::string format = "csv";
    std::size_t threads = 1;
    std::uint64_t seed = kDefaultSeed;
  } crit;
  crit.threads = hw_threads;
  crit_cmd->add_option("--case", crit.case_name, "sampling model")
      ->required()
      ->check(CLI::IsMember({"normal-known", "normal-unknown"}));
  crit_cmd->add_option("--n-min", crit.n_min, "first sample size");
  crit_cmd->add_option("--n-max", crit.n_max, "last sample size");
  crit_cmd->add_option("--step", crit.step, "sample-size step");
  crit_cmd->add_option("--reps", crit.reps, "Monte-Carlo replicates");
  crit_cmd->add_option("--theta", crit.theta, "sampling mean");
  crit_cmd->add_option("--theta0", crit.theta0, "null mean");
  crit_cmd->add_option("--sigma", crit.sigma, "noise scale");
  crit_cmd->add_option("--splits", crit.splits, "random splits per CVBF");
  add_io_options(crit_cmd, crit.out, crit.format, crit.threads, crit.seed);

  auto* conc_cmd = app.add_subcommand(
      "concrete", "heteroscedasticity case study on a strength table");
  struct {
    std::string data;
    bool has_header = false;
    std::string m_grid = "50,100,200,300,400,500,600";
    std::uint64_t splits = 200;
    std::string beta_mode = "per-split";
    std::string residuals_out;
    std::string out;
    std::string format = "csv";
    std::size_t threads = 1;
    std::uint64_t seed = kDefaultSeed;
  } conc;
  conc.threads = hw_threads;
  conc_cmd->add_option("--data", conc.data, "input CSV path")
      ->required()
      ->check(CLI::ExistingFile);
  conc_cmd->add_flag("--has-header", conc.has_header,
                     "drop the first data line");
  conc_cmd->add_option("--m-grid", conc.m_grid, "training-size grid");
  conc_cmd->add_option("--splits", conc.splits, "random splits per m");
  conc_cmd->add_option("--beta-mode", conc.beta_mode,
                       "regression refit policy")
      ->check(CLI::IsMember({"per-split", "global"}));
  conc_cmd->add_option("--residuals-out", conc.residuals_out,
                       "residual-vs-fitted table path");
  add_io_options(conc_cmd, conc.out, conc.format, conc.threads, conc.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (bridge_cmd->parsed()) {
    const auto n = static_cast<std::size_t>(bridge_n);
    const auto k = static_cast<std::size_t>(bridge_k);
    const std::size_t m = bridgefactor::bridge::bridge_m(n, k);
    std::printf("m = %zu\n", m);
    std::printf("rule = %.17g\n", bridgefactor::bridge::bridge_value(n, k));
    return 0;
  }

  if (fit_cmd->parsed()) {
    const auto grid =
        range_grid(static_cast<std::size_t>(fit_nmin),
                   static_cast<std::size_t>(fit_nmax),
                   static_cast<std::size_t>(fit_step), "--nmin/--nmax/--step");
    const auto [intercept, slope] = bridgefactor::bridge::bridge_linear_fit(grid);
    std::printf("intercept = %.17g\n", intercept);
    std::printf("slope = %.17g\n", slope);
    return 0;
  }

  if (cons_cmd->parsed()) {
    cons.seed = resolve_seed(cons_cmd, cons.seed);
    simlab::ExperimentConfig config;
    config.which = case_from_name(cons.case_name);
    config.theta = config.which == simlab::ExperimentCase::normal_two
                       ? cons.mu1
                       : cons.theta;
    config.theta0 = cons.theta0;
    config.mu2 = cons.mu2;
    config.sigma = cons.sigma;
    config.beta = cons.beta;
    config.beta0 = cons.beta0;
    config.n_grid = range_grid(static_cast<std::size_t>(cons.n_min),
                               static_cast<std::size_t>(cons.n_max),
                               static_cast<std::size_t>(cons.step),
                               "--n-min/--n-max/--step");
    config.reps = static_cast<std::size_t>(cons.reps);
    config.splits_per_bf = static_cast<std::size_t>(cons.splits);
    config.trim_fraction = cons.trim;
    config.seed = cons.seed;
    config.threads = cons.threads;

    RunConfig echo("consistency");
    echo.add("case", cons.case_name);
    echo.add("n_min", cons.n_min);
    echo.add("n_max", cons.n_max);
    echo.add("step", cons.step);
    echo.add("reps", cons.reps);
    echo.add("theta", cons.theta);
    echo.add("theta0", cons.theta0);
    echo.add("sigma", cons.sigma);
    echo.add("beta", cons.beta);
    echo.add("beta0", cons.beta0);
    echo.add("mu1", cons.mu1);
    echo.add("mu2", cons.mu2);
    echo.add("splits", cons.splits);
    echo.add("trim", cons.trim);
    echo.add("seed", cons.seed);
    emit(simlab::run_consistency(config), echo, cons.out, cons.format);
    return 0;
  }

  if (roc_cmd->parsed()) {
    roc.seed = resolve_seed(roc_cmd, roc.seed);
    simlab::RocConfig config;
    config.n = static_cast<std::size_t>(roc.n);
    config.m_grid = parse_size_grid(roc.m_grid, "--m-grid");
    config.reps = static_cast<std::size_t>(roc.reps);
    config.splits_per_bf = static_cast<std::size_t>(roc.splits_per_bf);
    config.gibf_batch = static_cast<std::size_t>(roc.gibf_batch);
    config.theta0 = roc.theta0;
    config.theta1 = roc.theta1;
    config.sigma = roc.sigma;
    config.seed = roc.seed;
    config.threads = roc.threads;

    RunConfig echo("roc");
    echo.add("n", roc.n);
    echo.add("m_grid", roc.m_grid);
    echo.add("reps", roc.reps);
    echo.add("splits_per_bf", roc.splits_per_bf);
    echo.add("gibf_batch", roc.gibf_batch);
    echo.add("theta0", roc.theta0);
    echo.add("theta1", roc.theta1);
    echo.add("sigma", roc.sigma);
    echo.add("seed", roc.seed);
    const auto [cvbf, gibf] = simlab::run_roc(config);
    emit(simlab::roc_table(cvbf, gibf), echo, roc.out, roc.format);
    return 0;
  }

  if (sweep_cmd->parsed()) {
    sweep.seed = resolve_seed(sweep_cmd, sweep.seed);
    const auto grid = parse_real_grid(sweep.beta_grid, "--beta-grid");
    RunConfig echo("exp-sweep");
    echo.add("beta_grid", sweep.beta_grid);
    echo.add("n", sweep.n);
    echo.add("reps", sweep.reps);
    echo.add("beta0", sweep.beta0);
    echo.add("splits", sweep.splits);
    echo.add("seed", sweep.seed);
    bridgefactor::mathcore::rng64 rng(sweep.seed);
    const auto table = bridgefactor::exponential_case::exp_sweep(
        grid, static_cast<std::size_t>(sweep.n),
        static_cast<std::size_t>(sweep.reps), sweep.beta0, rng,
        static_cast<std::size_t>(sweep.splits), sweep.threads);
    emit(table, echo, sweep.out, sweep.format);
    return 0;
  }

  if (crit_cmd->parsed()) {
    crit.seed = resolve_seed(crit_cmd, crit.seed);
    simlab::ExperimentConfig config;
    config.which = case_from_name(crit.case_name);
    config.theta = crit.theta;
    config.theta0 = crit.theta0;
    config.sigma = crit.sigma;
    config.n_grid = range_grid(static_cast<std::size_t>(crit.n_min),
                               static_cast<std::size_t>(crit.n_max),
                               static_cast<std::size_t>(crit.step),
                               "--n-min/--n-max/--step");
    config.reps = static_cast<std::size_t>(crit.reps);
    config.splits_per_bf = static_cast<std::size_t>(crit.splits);
    config.seed = crit.seed;
    config.threads = crit.threads;

    RunConfig echo("criteria");
    echo.add("case", crit.case_name);
    echo.add("n_min", crit.n_min);
    echo.add("n_max", crit.n_max);
    echo.add("step", crit.step);
    echo.add("reps", crit.reps);
    echo.add("theta", crit.theta);
    echo.add("theta0", crit.theta0);
    echo.add("sigma", crit.sigma);
    echo.add("splits", crit.splits);
    echo.add("seed", crit.seed);
    emit(simlab::run_criteria_compare(config), echo, crit.out, crit.format);
    return 0;
  }

  if (conc_cmd->parsed()) {
    conc.seed = resolve_seed(conc_cmd, conc.seed);
    const auto grid = parse_size_grid(conc.m_grid, "--m-grid");
    const auto records =
        bridgefactor::concrete::load_concrete(conc.data, conc.has_header);
    const auto mode = conc.beta_mode == "global"
                          ? bridgefactor::concrete::BetaMode::global
                          : bridgefactor::concrete::BetaMode::per_split;

    RunConfig echo("concrete");
    echo.add("data", conc.data);
    echo.add("has_header", conc.has_header);
    echo.add("m_grid", conc.m_grid);
    echo.add("splits", conc.splits);
    echo.add("beta_mode", conc.beta_mode);
    echo.add("seed", conc.seed);

    bridgefactor::mathcore::rng64 rng(conc.seed);
    const auto table = bridgefactor::concrete::concrete_cvbf(
        records, grid, static_cast<std::size_t>(conc.splits), rng, mode,
        conc.threads);
    emit(table, echo, conc.out, conc.format);

    // The residual-vs-fitted table rides along: explicit path wins, else it
    // lands next to --out; stdout runs skip it unless a path was given.
    std::string residual_path = conc.residuals_out;
    if (residual_path.empty() && !conc.out.empty()) {
      const auto slash = conc.out.find_last_of('/');
      const auto dot = conc.out.find_last_of('.');
      if (dot != std::string::npos &&
          (slash == std::string::npos || dot > slash)) {
        residual_path = conc.out.substr(0, dot) + "_residuals" +
                        conc.out.substr(dot);
      } else {
        residual_path = conc.out + "_residuals";
      }
    }
    if (!residual_path.empty()) {
      const auto fit = bridgefactor::concrete::fit_ols(records);
      CurveTable residual_table;
      residual_table.columns = {"fitted", "residual"};
      for (std::size_t i = 0; i < fit.fitted.size(); ++i) {
        residual_table.rows.push_back({fit.fitted[i], fit.residuals[i]});
      }
      RunConfig residual_echo = echo;
      residual_echo.add("table", "residual_vs_fitted");
      emit(residual_table, residual_echo, residual_path, conc.format);
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
