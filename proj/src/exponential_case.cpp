#include "bridgefactor/exponential_case.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bridgefactor/bridge_rule.hpp"
#include "bridgefactor/parallel.hpp"

namespace bridgefactor::exponential_case {

namespace {

void require_positive_data(const splitkit::Sample& data) {
  if (data.size() < 2) throw std::invalid_argument("need at least two points");
  for (double x : data)
    if (!(x > 0.0)) throw std::domain_error("data must be positive");
}

void require_rates(double beta0, double beta) {
  if (!(beta0 > 0.0)) throw std::domain_error("beta0 must be positive");
  if (!(beta > 0.0)) throw std::domain_error("beta must be positive");
}

double sum_of(const splitkit::Sample& data) {
  double s = 0.0;
  for (double x : data) s += x;
  return s;
}

// Uncorrected mean of exp_ibf_log over all n training points; the
// per-point terms collapse to the log-mean of the data.
double ibf_log_mean_all(const splitkit::Sample& data, double beta0) {
  const double nd = static_cast<double>(data.size());
  const double total = sum_of(data);
  double mean_log = 0.0;
  for (double x : data) mean_log += std::log(x);
  mean_log /= nd;
  return mathcore::log_gamma(nd) + mean_log - nd * std::log(total) -
         (nd - 1.0) * std::log(beta0) + beta0 * (nd - 1.0) * (total / nd);
}

}  // namespace

double exp_ibf_log(const splitkit::Sample& data, const ExpHyp& hyp,
                   std::size_t training_index) {
  require_positive_data(data);
  require_rates(hyp.beta0, hyp.beta);
  if (training_index >= data.size())
    throw std::invalid_argument("training index out of range");
  const double nd = static_cast<double>(data.size());
  const double total = sum_of(data);
  const double xl = data[training_index];
  const double rest_mean = (total - xl) / (nd - 1.0);
  return mathcore::log_gamma(nd) + std::log(xl) - nd * std::log(total) -
         (nd - 1.0) * std::log(hyp.beta0) +
         hyp.beta0 * (nd - 1.0) * rest_mean;
}

double exp_cgibf_log(const splitkit::Sample& data, const ExpHyp& hyp,
                     const splitkit::SplitPlan& plan) {
  require_positive_data(data);
  require_rates(hyp.beta0, hyp.beta);
  if (plan.m != 1)
    throw std::invalid_argument("intrinsic average needs training size 1");
  if (plan.splits.empty()) throw std::invalid_argument("empty split plan");
  double sum = 0.0;
  for (const auto& split : plan.splits) {
    if (split.train.size() != 1)
      throw std::invalid_argument("intrinsic average needs training size 1");
    sum += exp_ibf_log(data, hyp, split.train[0]);
  }
  return sum / static_cast<double>(plan.splits.size()) -
         mathcore::digamma(1.0);
}

double exp_cvbf_log(const splitkit::Sample& data, const ExpHyp& hyp,
                    const splitkit::Split& split) {
  require_positive_data(data);
  require_rates(hyp.beta0, hyp.beta);
  if (split.train.empty()) throw std::invalid_argument("empty training set");
  if (split.validation.empty())
    throw std::invalid_argument("empty validation set");
  double sum_t = 0.0;
  for (std::size_t i : split.train) {
    if (i >= data.size()) throw std::invalid_argument("train index out of range");
    sum_t += data[i];
  }
  double sum_v = 0.0;
  for (std::size_t i : split.validation) {
    if (i >= data.size())
      throw std::invalid_argument("validation index out of range");
    sum_v += data[i];
  }
  const double md = static_cast<double>(split.train.size());
  const double vd = static_cast<double>(split.validation.size());
  const double xbar_t = sum_t / md;
  const double xbar_v = sum_v / vd;
  return -vd * std::log(hyp.beta0 * xbar_t) - vd * xbar_v / xbar_t +
         hyp.beta0 * vd * xbar_v;
}

splitkit::ParametricPair make_exp_pair(double beta0) {
  if (!(beta0 > 0.0)) throw std::domain_error("beta0 must be positive");
  splitkit::ParametricPair pair;
  pair.model1.min_train = 1;
  pair.model1.fit = [](const splitkit::Sample& data,
                       const std::vector<std::size_t>& train) {
    double s = 0.0;
    for (std::size_t i : train) s += data[i];
    return std::vector<double>{static_cast<double>(train.size()) / s};
  };
  pair.model1.loglik = [](const std::vector<double>& params,
                          const splitkit::Sample& data, std::size_t i) {
    return std::log(params[0]) - params[0] * data[i];
  };
  pair.model0.min_train = 0;
  pair.model0.fit = [beta0](const splitkit::Sample&,
                            const std::vector<std::size_t>&) {
    return std::vector<double>{beta0};
  };
  pair.model0.loglik = [](const std::vector<double>& params,
                          const splitkit::Sample& data, std::size_t i) {
    return std::log(params[0]) - params[0] * data[i];
  };
  return pair;
}

ExpExpectations exp_expectations(std::size_t n, std::size_t m,
                                 const ExpHyp& hyp) {
  require_rates(hyp.beta0, hyp.beta);
  if (n < 2) throw std::invalid_argument("need n >= 2");
  if (m < 2) throw std::domain_error("CVBF expectation needs m >= 2");
  if (m >= n) throw std::invalid_argument("need m < n");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double ratio = std::log(hyp.beta / hyp.beta0);
  const double inv_ratio = hyp.beta0 / hyp.beta;
  ExpExpectations out;
  out.e_log_cgibf_m1 = mathcore::log_gamma(nd) - nd * mathcore::digamma(nd) +
                       (nd - 1.0) * ratio + (nd - 1.0) * inv_ratio;
  out.e_log_cvbf_m1 = (nd - md) * ratio - (nd - md) * mathcore::digamma(md) +
                      (nd - md) * std::log(md) + inv_ratio * (nd - md) -
                      (nd - md) * md / (md - 1.0);
  out.e_log_cibf_m0_approx = (nd - 1.0) * std::log(nd - 1.0) +
                             0.5 * std::log(2.0 * 3.14159265358979323846 *
                                            (nd - 1.0)) -
                             nd * std::log(nd - 0.5);
  const double mb = nd / std::log(nd);
  out.e_log_cvbf_m0_approx =
      (nd - mb) * (std::log(mb / (mb - 0.5)) - 1.0 / (mb - 1.0));
  return out;
}

CurveTable exp_sweep(const std::vector<double>& beta_grid, std::size_t n,
                     std::size_t reps, double beta0, mathcore::rng64& rng,
                     std::size_t splits, std::size_t threads) {
  if (beta_grid.empty()) throw std::invalid_argument("empty rate grid");
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    if (!(beta_grid[i] > 0.0))
      throw std::domain_error("rate grid must be positive");
    if (i > 0 && !(beta_grid[i] > beta_grid[i - 1]))
      throw std::invalid_argument("rate grid must be strictly increasing");
  }
  if (!(beta0 > 0.0)) throw std::domain_error("beta0 must be positive");
  if (n < 4) throw std::invalid_argument("need n >= 4");
  if (reps < 1) throw std::invalid_argument("need at least one replicate");
  if (splits < 1) throw std::invalid_argument("need at least one split");

  const std::size_t m = bridge::bridge_m(n, 1, 2);
  const double psi1 = mathcore::digamma(1.0);
  const std::uint64_t base_seed = rng.next_u64();

  CurveTable table;
  table.columns = {"beta", "cvbf_mean", "gibf_mean", "cvbf_expect",
                   "gibf_expect"};
  table.rows.resize(beta_grid.size());

  parallel::parallel_for(
      beta_grid.size(), threads, [&](std::size_t g) {
        const double beta = beta_grid[g];
        mathcore::rng64 local(mathcore::substream_seed(base_seed, g));
        const ExpHyp hyp{beta0, beta};
        double cvbf_sum = 0.0;
        double gibf_sum = 0.0;
        splitkit::Sample data(n);
        std::vector<double> split_values;
        for (std::size_t rep = 0; rep < reps; ++rep) {
          for (auto& x : data) x = mathcore::sample_exponential(local, beta);
          auto plan = splitkit::make_splits(n, m, splitkit::SplitMode::random,
                                            splits, local);
          split_values.clear();
          for (const auto& s : plan.splits)
            split_values.push_back(exp_cvbf_log(data, hyp, s));
          cvbf_sum += splitkit::geometric_avg_log(split_values);
          gibf_sum += ibf_log_mean_all(data, beta0) + psi1;
        }
        const auto expect = exp_expectations(n, m, hyp);
        auto& row = table.rows[g];
        row = {beta, cvbf_sum / static_cast<double>(reps),
               gibf_sum / static_cast<double>(reps), expect.e_log_cvbf_m1,
               expect.e_log_cgibf_m1 + 2.0 * psi1};
      });

  // Null-favoring interval: first downward and last upward zero crossing of
  // each mean curve, linearly interpolated.
  auto crossings = [&](std::size_t col, double& lo, double& hi) {
    lo = std::numeric_limits<double>::quiet_NaN();
    hi = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
      const double y0 = table.rows[i][col];
      const double y1 = table.rows[i + 1][col];
      if (y0 == y1) continue;
      const double x0 = table.rows[i][0];
      const double x1 = table.rows[i + 1][0];
      const double root = x0 - y0 * (x1 - x0) / (y1 - y0);
      if (y0 > 0.0 && y1 <= 0.0 && std::isnan(lo)) lo = root;
      if (y0 <= 0.0 && y1 > 0.0) hi = root;
    }
  };
  double lo = 0.0, hi = 0.0;
  crossings(1, lo, hi);
  table.summary["cvbf_null_lo"] = lo;
  table.summary["cvbf_null_hi"] = hi;
  crossings(2, lo, hi);
  table.summary["gibf_null_lo"] = lo;
  table.summary["gibf_null_hi"] = hi;
  return table;
}

}  // namespace bridgefactor::exponential_case
