#include "bridgefactor/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bridgefactor/bridge_rule.hpp"
#include "bridgefactor/criteria.hpp"
#include "bridgefactor/exponential_case.hpp"
#include "bridgefactor/mathcore.hpp"
#include "bridgefactor/normal_cases.hpp"
#include "bridgefactor/parallel.hpp"
#include "bridgefactor/splitkit.hpp"

namespace bridgefactor::simlab {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
// Intrinsic pair plans: enumerate all C(n,2) pairs up to this cap, else
// draw this many distinct random pairs per replicate.
constexpr std::size_t kPairExhaustiveCap = 100000;
constexpr std::size_t kPairRandomCount = 10000;

void require_config(const ExperimentConfig& config) {
  if (config.n_grid.empty()) throw std::invalid_argument("empty n grid");
  if (config.reps == 0) throw std::invalid_argument("reps must be positive");
  if (config.splits_per_bf == 0)
    throw std::invalid_argument("splits_per_bf must be positive");
  if (!(config.trim_fraction >= 0.0 && config.trim_fraction < 0.5))
    throw std::invalid_argument("trim fraction outside [0, 0.5)");
  if (!(config.sigma > 0.0)) throw std::domain_error("sigma must be positive");
  if (config.which == ExperimentCase::exponential &&
      (!(config.beta > 0.0) || !(config.beta0 > 0.0)))
    throw std::domain_error("rates must be positive");
  if (config.which == ExperimentCase::normal_unknown && config.theta0 != 0.0)
    throw std::invalid_argument("unknown-sigma case fixes theta0 = 0");
}

struct GridPlan {
  std::size_t n = 0;
  std::size_t m = 0;  // CVBF training size from the bridge rule
};

// False when the bridge rule is undefined at n for the case (or n is odd
// in the two-mean case); such grid entries are skipped.
bool plan_grid_entry(ExperimentCase which, std::size_t n, GridPlan& out) {
  out.n = n;
  switch (which) {
    case ExperimentCase::normal_known:
      if (n < 3) return false;
      out.m = bridge::bridge_m(n, 1, 1);
      return true;
    case ExperimentCase::normal_two: {
      if (n < 6 || n % 2 != 0) return false;
      std::size_t m = bridge::bridge_m(n, 2, 2);
      if (m % 2 != 0) ++m;  // balanced splits need an even training size
      out.m = std::min(m, n - 2);
      return true;
    }
    case ExperimentCase::normal_unknown:
      if (n < 6) return false;
      out.m = bridge::bridge_m(n, 2, 4);
      return true;
    case ExperimentCase::exponential:
      if (n < 3) return false;
      out.m = bridge::bridge_m(n, 1, 2);
      return true;
  }
  return false;
}

// Exhaustive training plan shared across replicates at one grid point:
// singles for the known-sigma and exponential intrinsic averages, pairs
// for the unknown-sigma one when C(n,2) fits the cap (else each replicate
// draws its own random pairs).
bool make_shared_plan(ExperimentCase which, std::size_t n,
                      splitkit::SplitPlan& out) {
  mathcore::rng64 scratch(0);
  switch (which) {
    case ExperimentCase::normal_known:
    case ExperimentCase::exponential:
      out = splitkit::make_splits(n, 1, splitkit::SplitMode::exhaustive, 0,
                                  scratch);
      return true;
    case ExperimentCase::normal_unknown:
      if (splitkit::combination_count_capped(n, 2, kPairExhaustiveCap) >
          kPairExhaustiveCap)
        return false;
      out = splitkit::make_splits(n, 2, splitkit::SplitMode::exhaustive, 0,
                                  scratch, kPairExhaustiveCap);
      return true;
    case ExperimentCase::normal_two:
      return false;  // the two-mean intrinsic side is a chi-square sampler
  }
  return false;
}

splitkit::Sample draw_normal(mathcore::rng64& rng, std::size_t n, double mean,
                             double sigma) {
  splitkit::Sample data(n);
  for (auto& x : data) x = mathcore::sample_normal(rng, mean, sigma);
  return data;
}

double geometric_cvbf(
    const splitkit::SplitPlan& plan,
    const std::function<double(const splitkit::Split&)>& log_bf) {
  std::vector<double> logs;
  logs.reserve(plan.splits.size());
  for (const auto& split : plan.splits) logs.push_back(log_bf(split));
  return splitkit::geometric_avg_log(logs);
}

struct RepOut {
  double cvbf = 0.0;
  double gibf = 0.0;
};

RepOut consistency_rep(const ExperimentConfig& c, const GridPlan& g,
                       const splitkit::SplitPlan* shared,
                       mathcore::rng64& rng) {
  RepOut out;
  switch (c.which) {
    case ExperimentCase::normal_known: {
      const normal_cases::NormalKnownHyp hyp{c.theta0, c.sigma};
      const auto data = draw_normal(rng, g.n, c.theta, c.sigma);
      const auto plan = splitkit::make_splits(
          g.n, g.m, splitkit::SplitMode::random, c.splits_per_bf, rng);
      out.cvbf = geometric_cvbf(plan, [&](const splitkit::Split& s) {
        return normal_cases::nk_cvbf_log(data, hyp, s);
      });
      out.gibf = normal_cases::nk_cgibf_log(data, hyp);
      return out;
    }
    case ExperimentCase::normal_two: {
      const normal_cases::TwoMeanHyp hyp{c.theta, c.mu2, c.sigma};
      splitkit::Sample data(g.n);
      const std::size_t half = g.n / 2;
      for (std::size_t i = 0; i < g.n; ++i)
        data[i] = mathcore::sample_normal(rng, i < half ? hyp.mu1 : hyp.mu2,
                                          c.sigma);
      const auto plan =
          normal_cases::tm_balanced_splits(g.n, g.m, c.splits_per_bf, rng);
      out.cvbf = geometric_cvbf(plan, [&](const splitkit::Split& s) {
        return normal_cases::tm_cvbf_log_data(data, c.sigma, s);
      });
      out.gibf = normal_cases::tm_cibf_sample(rng, g.n, 2, hyp);
      return out;
    }
    case ExperimentCase::normal_unknown: {
      const auto data = draw_normal(rng, g.n, c.theta, c.sigma);
      const auto plan = splitkit::make_splits(
          g.n, g.m, splitkit::SplitMode::random, c.splits_per_bf, rng);
      out.cvbf = geometric_cvbf(plan, [&](const splitkit::Split& s) {
        return normal_cases::nu_cvbf_log(data, s);
      });
      if (shared != nullptr) {
        out.gibf = normal_cases::nu_gibf_log(data, *shared).log_bf;
      } else {
        const auto pairs = splitkit::make_splits(
            g.n, 2, splitkit::SplitMode::random, kPairRandomCount, rng);
        out.gibf = normal_cases::nu_gibf_log(data, pairs).log_bf;
      }
      return out;
    }
    case ExperimentCase::exponential: {
      const exponential_case::ExpHyp hyp{c.beta0, c.beta};
      splitkit::Sample data(g.n);
      for (auto& x : data) x = mathcore::sample_exponential(rng, c.beta);
      const auto plan = splitkit::make_splits(
          g.n, g.m, splitkit::SplitMode::random, c.splits_per_bf, rng);
      out.cvbf = geometric_cvbf(plan, [&](const splitkit::Split& s) {
        return exponential_case::exp_cvbf_log(data, hyp, s);
      });
      out.gibf = exponential_case::exp_cgibf_log(data, hyp, *shared);
      return out;
    }
  }
  throw std::logic_error("unhandled case");
}

// (cvbf_expect, gibf_expect); NaN where no closed form exists.
std::pair<double, double> overlays(const ExperimentConfig& c,
                                   const GridPlan& g) {
  switch (c.which) {
    case ExperimentCase::normal_known: {
      const auto mo = normal_cases::nk_expectations(g.n, g.m, c.theta,
                                                    {c.theta0, c.sigma});
      return {mo.e_log_cvbf, mo.e_log_cgibf};
    }
    case ExperimentCase::normal_two: {
      const normal_cases::TwoMeanHyp hyp{c.theta, c.mu2, c.sigma};
      return {normal_cases::tm_expectations(g.n, g.m, hyp).e_log_cvbf,
              normal_cases::tm_expectations(g.n, 2, hyp).e_log_cibf};
    }
    case ExperimentCase::normal_unknown: {
      if (c.theta != 0.0) return {kNan, kNan};
      const auto null = normal_cases::nu_null_expectations(g.n, g.m);
      return {null.second, null.first};
    }
    case ExperimentCase::exponential: {
      const auto e =
          exponential_case::exp_expectations(g.n, g.m, {c.beta0, c.beta});
      return {e.e_log_cvbf_m1, e.e_log_cgibf_m1};
    }
  }
  return {kNan, kNan};
}

void append_stats(std::vector<double>& row, const std::vector<double>& values,
                  double trim, double expect) {
  row.push_back(mathcore::mean(values));
  row.push_back(splitkit::trimmed_mean(values, trim));
  row.push_back(mathcore::quantile(values, 0.25));
  row.push_back(mathcore::quantile(values, 0.75));
  row.push_back(expect);
}

}  // namespace

CurveTable run_consistency(const ExperimentConfig& config) {
  require_config(config);
  CurveTable table;
  table.columns = {"n",       "m_cvbf",       "cvbf_mean", "cvbf_trimmed_mean",
                   "cvbf_q1", "cvbf_q3",      "cvbf_expect", "gibf_mean",
                   "gibf_trimmed_mean", "gibf_q1", "gibf_q3", "gibf_expect"};
  for (std::size_t n : config.n_grid) {
    GridPlan plan;
    if (!plan_grid_entry(config.which, n, plan)) continue;
    splitkit::SplitPlan shared;
    const splitkit::SplitPlan* shared_ptr =
        make_shared_plan(config.which, n, shared) ? &shared : nullptr;
    std::vector<double> cvbf(config.reps);
    std::vector<double> gibf(config.reps);
    const std::uint64_t grid_seed = mathcore::substream_seed(config.seed, n);
    parallel::parallel_for(config.reps, config.threads, [&](std::size_t r) {
      mathcore::rng64 rng(mathcore::substream_seed(grid_seed, r));
      const RepOut out = consistency_rep(config, plan, shared_ptr, rng);
      cvbf[r] = out.cvbf;
      gibf[r] = out.gibf;
    });
    const auto [cv_expect, gi_expect] = overlays(config, plan);
    std::vector<double> row{static_cast<double>(n),
                            static_cast<double>(plan.m)};
    append_stats(row, cvbf, config.trim_fraction, cv_expect);
    append_stats(row, gibf, config.trim_fraction, gi_expect);
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty())
    throw std::invalid_argument("no feasible grid entries");
  return table;
}

double roc_auc(std::vector<RocPoint> points) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(points.size() + 2);
  for (const auto& p : points) {
    if (!(p.fpr >= 0.0 && p.fpr <= 1.0 && p.tpr >= 0.0 && p.tpr <= 1.0))
      throw std::invalid_argument("classification rates outside [0, 1]");
    pts.emplace_back(p.fpr, p.tpr);
  }
  pts.emplace_back(0.0, 0.0);
  pts.emplace_back(1.0, 1.0);
  std::sort(pts.begin(), pts.end());
  double auc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    auc += (pts[i].first - pts[i - 1].first) *
           (pts[i].second + pts[i - 1].second) / 2.0;
  return auc;
}

std::pair<RocCurve, RocCurve> run_roc(const RocConfig& config) {
  if (config.n < 2) throw std::invalid_argument("need n >= 2");
  if (config.m_grid.empty()) throw std::invalid_argument("empty m grid");
  for (std::size_t m : config.m_grid)
    if (m < 1 || m >= config.n)
      throw std::invalid_argument("training size outside [1, n-1]");
  if (config.reps == 0) throw std::invalid_argument("reps must be positive");
  if (config.splits_per_bf == 0)
    throw std::invalid_argument("splits_per_bf must be positive");
  if (config.gibf_batch == 0 || config.reps % config.gibf_batch != 0)
    throw std::invalid_argument("reps must be a multiple of gibf_batch");
  if (!(config.sigma > 0.0)) throw std::domain_error("sigma must be positive");

  const normal_cases::NormalKnownHyp hyp{config.theta0, config.sigma};
  RocCurve cv_curve;
  RocCurve gi_curve;
  for (std::size_t m : config.m_grid) {
    const std::uint64_t m_seed = mathcore::substream_seed(config.seed, m);
    std::vector<std::vector<double>> cv(2,
                                        std::vector<double>(config.reps));
    std::vector<std::vector<double>> gi(2,
                                        std::vector<double>(config.reps));
    parallel::parallel_for(
        2 * config.reps, config.threads, [&](std::size_t job) {
          const std::size_t r = job / 2;
          const std::size_t side = job % 2;
          mathcore::rng64 rng(
              mathcore::substream_seed(m_seed, 2 * r + side));
          const double mean = side == 0 ? config.theta0 : config.theta1;
          const auto data = draw_normal(rng, config.n, mean, config.sigma);
          const auto plan =
              splitkit::make_splits(config.n, m, splitkit::SplitMode::random,
                                    config.splits_per_bf, rng);
          cv[side][r] = geometric_cvbf(plan, [&](const splitkit::Split& s) {
            return normal_cases::nk_cvbf_log(data, hyp, s);
          });
          gi[side][r] = normal_cases::nk_cgibf_exhaustive_log(data, hyp, m);
        });
    const std::size_t batches = config.reps / config.gibf_batch;
    double cv_rate[2];
    double gi_rate[2];
    for (std::size_t side = 0; side < 2; ++side) {
      std::size_t cv_hits = 0;
      for (double v : cv[side]) cv_hits += v > 0.0 ? 1 : 0;
      cv_rate[side] =
          static_cast<double>(cv_hits) / static_cast<double>(config.reps);
      std::size_t gi_hits = 0;
      for (std::size_t b = 0; b < batches; ++b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < config.gibf_batch; ++i)
          sum += gi[side][b * config.gibf_batch + i];
        gi_hits += sum > 0.0 ? 1 : 0;
      }
      gi_rate[side] =
          static_cast<double>(gi_hits) / static_cast<double>(batches);
    }
    cv_curve.points.push_back({m, cv_rate[0], cv_rate[1]});
    gi_curve.points.push_back({m, gi_rate[0], gi_rate[1]});
  }
  cv_curve.auc = roc_auc(cv_curve.points);
  gi_curve.auc = roc_auc(gi_curve.points);
  return {cv_curve, gi_curve};
}

CurveTable roc_table(const RocCurve& cvbf, const RocCurve& gibf) {
  if (cvbf.points.size() != gibf.points.size())
    throw std::invalid_argument("curves cover different grids");
  CurveTable table;
  table.columns = {"m", "cvbf_fpr", "cvbf_tpr", "gibf_fpr", "gibf_tpr"};
  for (std::size_t i = 0; i < cvbf.points.size(); ++i) {
    if (cvbf.points[i].m != gibf.points[i].m)
      throw std::invalid_argument("curves cover different grids");
    table.rows.push_back({static_cast<double>(cvbf.points[i].m),
                          cvbf.points[i].fpr, cvbf.points[i].tpr,
                          gibf.points[i].fpr, gibf.points[i].tpr});
  }
  table.summary["auc_cvbf"] = cvbf.auc;
  table.summary["auc_gibf"] = gibf.auc;
  return table;
}

CurveTable run_criteria_compare(const ExperimentConfig& config) {
  require_config(config);
  if (config.which != ExperimentCase::normal_known &&
      config.which != ExperimentCase::normal_unknown)
    throw std::invalid_argument(
        "criteria comparison covers the one-mean normal cases");
  const bool known = config.which == ExperimentCase::normal_known;
  const auto crit_case = known ? criteria::CriterionCase::normal_known
                               : criteria::CriterionCase::normal_unknown;
  const normal_cases::NormalKnownHyp hyp{config.theta0, config.sigma};
  CurveTable table;
  table.columns = {"n",         "m_cvbf",    "cvbf_mean", "cvbf_q1",
                   "cvbf_q3",   "gibf_mean", "gibf_q1",   "gibf_q3",
                   "bic_mean",  "pbic_mean", "pbic_star_mean",
                   "fbf_mean",  "aibf_mean"};
  for (std::size_t n : config.n_grid) {
    GridPlan plan;
    if (!plan_grid_entry(config.which, n, plan)) continue;
    splitkit::SplitPlan shared;
    const splitkit::SplitPlan* shared_ptr =
        make_shared_plan(config.which, n, shared) ? &shared : nullptr;
    std::vector<double> cv(config.reps);
    std::vector<double> gi(config.reps);
    std::vector<double> bic(config.reps);
    std::vector<double> pbic(config.reps);
    std::vector<double> star(config.reps);
    std::vector<double> fbf(config.reps);
    std::vector<double> aibf(config.reps);
    const std::uint64_t grid_seed = mathcore::substream_seed(config.seed, n);
    parallel::parallel_for(config.reps, config.threads, [&](std::size_t r) {
      mathcore::rng64 rng(mathcore::substream_seed(grid_seed, r));
      const auto data = draw_normal(rng, n, config.theta, config.sigma);
      const auto split_plan = splitkit::make_splits(
          n, plan.m, splitkit::SplitMode::random, config.splits_per_bf, rng);
      cv[r] = geometric_cvbf(split_plan, [&](const splitkit::Split& s) {
        return known ? normal_cases::nk_cvbf_log(data, hyp, s)
                     : normal_cases::nu_cvbf_log(data, s);
      });
      splitkit::SplitPlan local;
      const splitkit::SplitPlan* intrinsic = shared_ptr;
      if (intrinsic == nullptr) {
        local = splitkit::make_splits(n, 2, splitkit::SplitMode::random,
                                      kPairRandomCount, rng);
        intrinsic = &local;
      }
      gi[r] = known ? normal_cases::nk_cgibf_log(data, hyp)
                    : normal_cases::nu_gibf_log(data, *intrinsic).log_bf;
      bic[r] = criteria::bic_log(data, crit_case, hyp).log_value;
      pbic[r] = criteria::pbic_log(data, crit_case, hyp).log_value;
      star[r] = criteria::pbic_star_log(data, crit_case, hyp).log_value;
      fbf[r] = criteria::fbf_log(data, crit_case, hyp).log_value;
      aibf[r] = criteria::aibf_log(data, crit_case, hyp, *intrinsic).log_value;
    });
    std::vector<double> row{static_cast<double>(n),
                            static_cast<double>(plan.m)};
    row.push_back(mathcore::mean(cv));
    row.push_back(mathcore::quantile(cv, 0.25));
    row.push_back(mathcore::quantile(cv, 0.75));
    row.push_back(mathcore::mean(gi));
    row.push_back(mathcore::quantile(gi, 0.25));
    row.push_back(mathcore::quantile(gi, 0.75));
    row.push_back(mathcore::mean(bic));
    row.push_back(mathcore::mean(pbic));
    row.push_back(mathcore::mean(star));
    row.push_back(mathcore::mean(fbf));
    row.push_back(mathcore::mean(aibf));
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty())
    throw std::invalid_argument("no feasible grid entries");
  return table;
}

}  // namespace bridgefactor::simlab
