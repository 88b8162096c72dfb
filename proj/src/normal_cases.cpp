#include "bridgefactor/normal_cases.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace bridgefactor::normal_cases {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_sigma(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
}

void require_split(const splitkit::Sample& data, const splitkit::Split& split) {
  if (split.train.empty()) throw std::invalid_argument("empty training set");
  if (split.validation.empty())
    throw std::invalid_argument("empty validation set");
  for (std::size_t i : split.train)
    if (i >= data.size()) throw std::invalid_argument("train index out of range");
  for (std::size_t i : split.validation)
    if (i >= data.size())
      throw std::invalid_argument("validation index out of range");
}

double subset_mean(const splitkit::Sample& data,
                   const std::vector<std::size_t>& idx) {
  double s = 0.0;
  for (std::size_t i : idx) s += data[i];
  return s / static_cast<double>(idx.size());
}

double subset_sumsq_about(const splitkit::Sample& data,
                          const std::vector<std::size_t>& idx, double center) {
  double s = 0.0;
  for (std::size_t i : idx) {
    const double d = data[i] - center;
    s += d * d;
  }
  return s;
}

double normal_logpdf(double x, double mean, double var) {
  return -0.5 * std::log(2.0 * kPi * var) - (x - mean) * (x - mean) / (2.0 * var);
}

}  // namespace

double nk_cvbf_log(const splitkit::Sample& data, const NormalKnownHyp& hyp,
                   const splitkit::Split& split) {
  require_sigma(hyp.sigma);
  require_split(data, split);
  const double n = static_cast<double>(data.size());
  const double m = static_cast<double>(split.train.size());
  const double xbar_t = subset_mean(data, split.train);
  const double xbar_v = subset_mean(data, split.validation);
  const double dt = xbar_t - xbar_v;
  const double d0 = xbar_v - hyp.theta0;
  return -(n - m) / (2.0 * hyp.sigma * hyp.sigma) * (dt * dt - d0 * d0);
}

double nk_cibf_log(const splitkit::Sample& data, const NormalKnownHyp& hyp,
                   std::size_t training_index) {
  require_sigma(hyp.sigma);
  if (data.size() < 2) throw std::invalid_argument("need at least two points");
  if (training_index >= data.size())
    throw std::invalid_argument("training index out of range");
  const double n = static_cast<double>(data.size());
  const double xbar = mathcore::mean(data);
  const double di = data[training_index] - hyp.theta0;
  const double dn = xbar - hyp.theta0;
  return 0.5 * (1.0 - std::log(n)) -
         (di * di - n * dn * dn) / (2.0 * hyp.sigma * hyp.sigma);
}

double nk_cgibf_log(const splitkit::Sample& data, const NormalKnownHyp& hyp) {
  require_sigma(hyp.sigma);
  if (data.size() < 2) throw std::invalid_argument("need at least two points");
  const double n = static_cast<double>(data.size());
  const double xbar = mathcore::mean(data);
  double avg_sq = 0.0;
  for (double x : data) {
    const double d = x - hyp.theta0;
    avg_sq += d * d;
  }
  avg_sq /= n;
  const double dn = xbar - hyp.theta0;
  return 0.5 * (1.0 - std::log(n)) -
         (avg_sq - n * dn * dn) / (2.0 * hyp.sigma * hyp.sigma);
}

double nk_cgibf_exhaustive_log(const splitkit::Sample& data,
                               const NormalKnownHyp& hyp, std::size_t m) {
  require_sigma(hyp.sigma);
  const std::size_t n = data.size();
  if (n < 2) throw std::invalid_argument("need at least two points");
  if (m < 1 || m >= n)
    throw std::invalid_argument("training size must lie in [1, n-1]");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double xbar = mathcore::mean(data);
  double ss = 0.0;
  for (double x : data) {
    const double d = x - xbar;
    ss += d * d;
  }
  const double dn = xbar - hyp.theta0;
  return 0.5 * std::log(md / nd) + 0.5 +
         (nd - md) / (2.0 * hyp.sigma * hyp.sigma) *
             (dn * dn - ss / (nd * (nd - 1.0)));
}

NkMoments nk_expectations(std::size_t n, std::size_t m, double theta,
                          const NormalKnownHyp& hyp) {
  require_sigma(hyp.sigma);
  if (n < 2 || m < 1 || m >= n)
    throw std::invalid_argument("need 1 <= m < n and n >= 2");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double delta = theta - hyp.theta0;
  const double lam = (nd - md) * delta * delta / (hyp.sigma * hyp.sigma);
  NkMoments out;
  out.e_log_cvbf = -0.5 * (nd / md - 1.0 - lam);
  out.var_log_cvbf = nd * nd / (2.0 * md * md) + 0.5 + lam;
  out.e_log_cgibf = 0.5 * (1.0 - std::log(nd)) +
                    (nd - 1.0) * delta * delta / (2.0 * hyp.sigma * hyp.sigma);
  out.var_log_cibf =
      1.0 - 1.0 / nd + (nd - 1.0) * delta * delta / (hyp.sigma * hyp.sigma);
  return out;
}

double nk_cvbf_distributional_sample(mathcore::rng64& rng, std::size_t n,
                                     std::size_t m, double theta,
                                     const NormalKnownHyp& hyp) {
  require_sigma(hyp.sigma);
  if (n < 2 || m < 1 || m >= n)
    throw std::invalid_argument("need 1 <= m < n and n >= 2");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double delta = theta - hyp.theta0;
  const double lam = (nd - md) * delta * delta / (hyp.sigma * hyp.sigma);
  const double q_null = mathcore::sample_chisq(rng, 1.0, 0.0);
  const double q_alt = mathcore::sample_chisq(rng, 1.0, lam);
  return -0.5 * ((nd / md) * q_null - q_alt);
}

splitkit::ParametricPair make_nk_pair(const NormalKnownHyp& hyp) {
  require_sigma(hyp.sigma);
  const double theta0 = hyp.theta0;
  const double var = hyp.sigma * hyp.sigma;
  splitkit::ParametricPair pair;
  pair.model1.min_train = 1;
  pair.model1.fit = [](const splitkit::Sample& data,
                       const std::vector<std::size_t>& train) {
    return std::vector<double>{subset_mean(data, train)};
  };
  pair.model1.loglik = [var](const std::vector<double>& params,
                             const splitkit::Sample& data, std::size_t i) {
    return normal_logpdf(data[i], params[0], var);
  };
  pair.model0.min_train = 0;
  pair.model0.fit = [theta0](const splitkit::Sample&,
                             const std::vector<std::size_t>&) {
    return std::vector<double>{theta0};
  };
  pair.model0.loglik = [var](const std::vector<double>& params,
                             const splitkit::Sample& data, std::size_t i) {
    return normal_logpdf(data[i], params[0], var);
  };
  return pair;
}

namespace {

void require_tm_sizes(std::size_t n, std::size_t m) {
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("two-mean case needs even n >= 4");
  if (m < 2 || m >= n)
    throw std::invalid_argument("training size must lie in [2, n-1]");
}

}  // namespace

double tm_cibf_sample(mathcore::rng64& rng, std::size_t n, std::size_t m,
                      const TwoMeanHyp& hyp) {
  require_sigma(hyp.sigma);
  require_tm_sizes(n, m);
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double v = hyp.sigma * hyp.sigma;
  const double sum2 = (hyp.mu1 + hyp.mu2) * (hyp.mu1 + hyp.mu2);
  const double q1 = mathcore::sample_chisq(rng, 1.0, md * sum2 / (4.0 * v));
  const double q2 = mathcore::sample_chisq(rng, 1.0, nd * sum2 / (4.0 * v));
  const double q3 =
      mathcore::sample_chisq(rng, 1.0, 0.5 * nd * hyp.mu1 * hyp.mu1 / v);
  const double q4 =
      mathcore::sample_chisq(rng, 1.0, 0.5 * md * hyp.mu1 * hyp.mu1 / v);
  const double q5 =
      mathcore::sample_chisq(rng, 1.0, 0.5 * nd * hyp.mu2 * hyp.mu2 / v);
  const double q6 =
      mathcore::sample_chisq(rng, 1.0, 0.5 * md * hyp.mu2 * hyp.mu2 / v);
  return 0.5 * std::log(std::exp(1.0) * md / nd) -
         0.5 * (-q1 + q2 - q3 + q4 - q5 + q6);
}

double tm_cvbf_sample(mathcore::rng64& rng, std::size_t n, std::size_t m,
                      const TwoMeanHyp& hyp) {
  require_sigma(hyp.sigma);
  require_tm_sizes(n, m);
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double v = hyp.sigma * hyp.sigma;
  const double diff2 = (hyp.mu1 - hyp.mu2) * (hyp.mu1 - hyp.mu2);
  const double nc_pooled = md * diff2 / (4.0 * v);
  const double nc_group = md * (nd - md) * diff2 / (2.0 * nd * v);
  const double q1 = mathcore::sample_chisq(rng, 1.0, nc_pooled);
  const double q2 = mathcore::sample_chisq(rng, 1.0, 0.0);
  const double q3 = mathcore::sample_chisq(rng, 1.0, 0.0);
  const double q4 = mathcore::sample_chisq(rng, 1.0, nc_group);
  const double q5 = mathcore::sample_chisq(rng, 1.0, nc_group);
  const double scale = nd / (4.0 * md);
  return -((nd - md) / (2.0 * md) * q1 + scale * q2 + scale * q3 -
           scale * q4 - scale * q5);
}

splitkit::ParametricPair make_tm_pair(double sigma, std::size_t n) {
  require_sigma(sigma);
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("two-mean case needs even n >= 4");
  const std::size_t half = n / 2;
  const double var = sigma * sigma;
  splitkit::ParametricPair pair;
  pair.model1.min_train = 2;
  pair.model1.fit = [half](const splitkit::Sample& data,
                           const std::vector<std::size_t>& train) {
    double s1 = 0.0, s2 = 0.0;
    std::size_t c1 = 0, c2 = 0;
    for (std::size_t i : train) {
      if (i < half) {
        s1 += data[i];
        ++c1;
      } else {
        s2 += data[i];
        ++c2;
      }
    }
    if (c1 == 0 || c2 == 0)
      throw std::runtime_error("training set misses one group");
    return std::vector<double>{s1 / static_cast<double>(c1),
                               s2 / static_cast<double>(c2)};
  };
  pair.model1.loglik = [half, var](const std::vector<double>& params,
                                   const splitkit::Sample& data,
                                   std::size_t i) {
    return normal_logpdf(data[i], i < half ? params[0] : params[1], var);
  };
  pair.model0.min_train = 1;
  pair.model0.fit = [](const splitkit::Sample& data,
                       const std::vector<std::size_t>& train) {
    return std::vector<double>{subset_mean(data, train)};
  };
  pair.model0.loglik = [var](const std::vector<double>& params,
                             const splitkit::Sample& data, std::size_t i) {
    return normal_logpdf(data[i], params[0], var);
  };
  return pair;
}

double tm_cvbf_log_data(const splitkit::Sample& data, double sigma,
                        const splitkit::Split& split) {
  if (data.size() < 4 || data.size() % 2 != 0)
    throw std::invalid_argument("two-mean case needs even n >= 4");
  require_split(data, split);
  return splitkit::cvbf_log_split(make_tm_pair(sigma, data.size()), data,
                                  split);
}

splitkit::SplitPlan tm_balanced_splits(std::size_t n, std::size_t m,
                                       std::size_t count,
                                       mathcore::rng64& rng) {
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("two-mean case needs even n >= 4");
  if (m < 2 || m % 2 != 0 || m >= n)
    throw std::invalid_argument("balanced training size must be even, in [2, n-1]");
  if (count == 0) throw std::invalid_argument("need at least one split");
  const std::size_t half = n / 2;
  const std::size_t per_group = m / 2;
  const std::size_t cap = 100000;
  const std::size_t per_side = splitkit::combination_count_capped(
      half, per_group, cap);
  // Total distinct balanced splits, saturated at cap.
  std::size_t total = per_side;
  if (per_side >= cap || per_side > cap / per_side)
    total = cap + 1;
  else
    total = per_side * per_side;
  const std::size_t want = std::min(count, std::min(total, cap));

  splitkit::SplitPlan plan;
  plan.n = n;
  plan.m = m;
  std::set<std::vector<std::size_t>> seen;
  std::vector<std::size_t> lo(half), hi(half);
  for (std::size_t i = 0; i < half; ++i) {
    lo[i] = i;
    hi[i] = half + i;
  }
  const std::size_t max_attempts = 64 * want + 1024;
  std::size_t attempts = 0;
  while (plan.splits.size() < want && attempts < max_attempts) {
    ++attempts;
    for (std::size_t i = 0; i < per_group; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.next_double() *
                                                   static_cast<double>(half - i));
      if (j >= half) j = half - 1;
      std::swap(lo[i], lo[j]);
      j = i + static_cast<std::size_t>(rng.next_double() *
                                       static_cast<double>(half - i));
      if (j >= half) j = half - 1;
      std::swap(hi[i], hi[j]);
    }
    std::vector<std::size_t> train(lo.begin(), lo.begin() + per_group);
    train.insert(train.end(), hi.begin(), hi.begin() + per_group);
    std::sort(train.begin(), train.end());
    if (!seen.insert(train).second) continue;
    splitkit::Split split;
    split.train = train;
    split.validation.reserve(n - m);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (next < train.size() && train[next] == i)
        ++next;
      else
        split.validation.push_back(i);
    }
    plan.splits.push_back(std::move(split));
  }
  if (plan.splits.empty())
    throw std::runtime_error("failed to draw any balanced split");
  return plan;
}

TmExpectations tm_expectations(std::size_t n, std::size_t m,
                               const TwoMeanHyp& hyp) {
  require_sigma(hyp.sigma);
  require_tm_sizes(n, m);
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double v = hyp.sigma * hyp.sigma;
  const double shift = 0.5 * (nd - md) * (hyp.mu2 - hyp.mu1) *
                       (hyp.mu2 - hyp.mu1) / (4.0 * v);
  TmExpectations out;
  out.e_log_cibf = 0.5 * std::log(std::exp(1.0) * md / nd) + shift;
  out.e_log_cvbf = -(nd - md) / (2.0 * md) + shift;
  const double halfn = nd / 2.0;
  out.e_log_cvbf_bridged =
      -std::log(halfn) + 0.5 +
      0.5 * (nd - nd / std::log(halfn)) * (hyp.mu2 - hyp.mu1) *
          (hyp.mu2 - hyp.mu1) / (4.0 * v);
  return out;
}

double nu_ibf_log(const splitkit::Sample& data, std::size_t i, std::size_t j) {
  const std::size_t n = data.size();
  if (n < 3) throw std::invalid_argument("need at least three points");
  if (i >= n || j >= n) throw std::invalid_argument("pair index out of range");
  if (i == j) throw std::invalid_argument("pair indices must differ");
  const double xi = data[i];
  const double xj = data[j];
  if (xi * xi + xj * xj == 0.0)
    throw std::runtime_error("degenerate pair: both training points zero");
  const double xbar = mathcore::mean(data);
  double ss = 0.0;
  for (double x : data) {
    const double d = x - xbar;
    ss += d * d;
  }
  if (!(ss > 0.0)) throw std::runtime_error("degenerate sample: zero spread");
  if (xi == xj) return -std::numeric_limits<double>::infinity();
  const double nd = static_cast<double>(n);
  return 0.5 * std::log(2.0 * kPi / nd) +
         0.5 * nd * std::log(1.0 + nd * xbar * xbar / ss) +
         std::log((xi - xj) * (xi - xj)) -
         std::log(2.0 * std::sqrt(kPi) * (xi * xi + xj * xj));
}

std::vector<double> nu_ibf_logs(const splitkit::Sample& data,
                                const splitkit::SplitPlan& plan) {
  const std::size_t n = data.size();
  if (n < 3) throw std::invalid_argument("need at least three points");
  if (plan.m != 2)
    throw std::invalid_argument("pair-trained average needs training size 2");
  if (plan.splits.empty()) throw std::invalid_argument("empty split plan");
  const double xbar = mathcore::mean(data);
  double ss = 0.0;
  for (double x : data) {
    const double d = x - xbar;
    ss += d * d;
  }
  if (!(ss > 0.0)) throw std::runtime_error("degenerate sample: zero spread");
  const double nd = static_cast<double>(n);
  const double base = 0.5 * std::log(2.0 * kPi / nd) +
                      0.5 * nd * std::log(1.0 + nd * xbar * xbar / ss);
  std::vector<double> out;
  out.reserve(plan.splits.size());
  for (const auto& split : plan.splits) {
    if (split.train.size() != 2)
      throw std::invalid_argument("pair-trained average needs training size 2");
    const std::size_t i = split.train[0];
    const std::size_t j = split.train[1];
    if (i >= n || j >= n)
      throw std::invalid_argument("pair index out of range");
    if (i == j) throw std::invalid_argument("pair indices must differ");
    const double xi = data[i];
    const double xj = data[j];
    if (xi == xj) {
      out.push_back(-std::numeric_limits<double>::infinity());
      continue;
    }
    out.push_back(base + std::log((xi - xj) * (xi - xj)) -
                  std::log(2.0 * std::sqrt(kPi) * (xi * xi + xj * xj)));
  }
  return out;
}

PairAverage nu_gibf_log(const splitkit::Sample& data,
                        const splitkit::SplitPlan& plan) {
  const auto logs = nu_ibf_logs(data, plan);
  PairAverage out;
  double sum = 0.0;
  std::size_t used = 0;
  for (double v : logs) {
    if (std::isinf(v)) {
      ++out.excluded_pairs;
      continue;
    }
    sum += v;
    ++used;
  }
  if (used == 0)
    throw std::runtime_error("all training pairs degenerate");
  out.log_bf = sum / static_cast<double>(used);
  return out;
}

double nu_cvbf_log(const splitkit::Sample& data,
                   const splitkit::Split& split) {
  require_split(data, split);
  if (split.train.size() < 2)
    throw std::invalid_argument("training set needs at least two points");
  const double nd = static_cast<double>(data.size());
  const double md = static_cast<double>(split.train.size());
  const double xbar_t = subset_mean(data, split.train);
  const double raw_t = subset_sumsq_about(data, split.train, 0.0);
  const double cen_t = subset_sumsq_about(data, split.train, xbar_t);
  if (!(cen_t > 0.0))
    throw std::runtime_error("degenerate training set: zero spread");
  if (!(raw_t > 0.0))
    throw std::runtime_error("degenerate training set: all points zero");
  const double cen_v = subset_sumsq_about(data, split.validation, xbar_t);
  const double raw_v = subset_sumsq_about(data, split.validation, 0.0);
  return 0.5 * (nd - md) * std::log(raw_t / cen_t) -
         0.5 * md * (cen_v / cen_t - raw_v / raw_t);
}

std::pair<double, double> nu_null_expectations(std::size_t n, std::size_t m) {
  if (n < 4) throw std::invalid_argument("pair-trained expectation needs n >= 4");
  if (m < 4 || m >= n)
    throw std::invalid_argument("training expectation needs 4 <= m < n");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double e_ibf =
      0.5 * std::log(1.0 / (8.0 * nd)) +
      0.5 * nd * (std::log(1.0 + 1.0 / (nd - 3.0)) -
                  1.0 / ((nd - 2.0) * (nd - 3.0)));
  const double e_cvbf =
      0.5 * (nd - md) * (std::log(1.0 + 1.0 / (md - 3.0)) -
                         1.0 / ((md - 2.0) * (md - 3.0))) -
      (md + 1.0) * (nd - md) / (2.0 * (md - 3.0)) +
      md * (nd - md) / (2.0 * (md - 2.0));
  return {e_ibf, e_cvbf};
}

splitkit::ParametricPair make_nu_pair() {
  splitkit::ParametricPair pair;
  pair.model1.min_train = 2;
  pair.model1.fit = [](const splitkit::Sample& data,
                       const std::vector<std::size_t>& train) {
    const double mu = subset_mean(data, train);
    const double ss = subset_sumsq_about(data, train, mu);
    if (!(ss > 0.0))
      throw std::runtime_error("degenerate training set: zero spread");
    return std::vector<double>{mu, ss / static_cast<double>(train.size())};
  };
  pair.model1.loglik = [](const std::vector<double>& params,
                          const splitkit::Sample& data, std::size_t i) {
    return normal_logpdf(data[i], params[0], params[1]);
  };
  pair.model0.min_train = 1;
  pair.model0.fit = [](const splitkit::Sample& data,
                       const std::vector<std::size_t>& train) {
    const double ss = subset_sumsq_about(data, train, 0.0);
    if (!(ss > 0.0))
      throw std::runtime_error("degenerate training set: all points zero");
    return std::vector<double>{ss / static_cast<double>(train.size())};
  };
  pair.model0.loglik = [](const std::vector<double>& params,
                          const splitkit::Sample& data, std::size_t i) {
    return normal_logpdf(data[i], 0.0, params[0]);
  };
  return pair;
}

}  // namespace bridgefactor::normal_cases
