#include "bridgefactor/splitkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace bridgefactor::splitkit {

std::size_t combination_count_capped(std::size_t n, std::size_t m,
                                     std::size_t cap) {
  if (m > n) return 0;
  m = std::min(m, n - m);
  std::size_t acc = 1;
  for (std::size_t i = 1; i <= m; ++i) {
    // Exact at every step: acc holds C(n-m+i-1, i-1) times (n-m+i) first.
    acc = acc * (n - m + i) / i;
    if (acc > cap) return cap + 1;
  }
  return acc;
}

namespace {

std::vector<std::size_t> complement(std::size_t n,
                                    const std::vector<std::size_t>& train) {
  std::vector<std::size_t> out;
  out.reserve(n - train.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (next < train.size() && train[next] == i) {
      ++next;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace

SplitPlan make_splits(std::size_t n, std::size_t m, SplitMode mode,
                      std::size_t requested, mathcore::rng64& rng,
                      std::size_t exhaustive_cap) {
  if (m < 1 || m >= n)
    throw std::invalid_argument("make_splits: need 1 <= m <= n-1");
  SplitPlan plan;
  plan.n = n;
  plan.m = m;
  const std::size_t total = combination_count_capped(n, m, exhaustive_cap);
  if (mode == SplitMode::exhaustive) {
    if (total > exhaustive_cap)
      throw std::invalid_argument(
          "make_splits: C(n,m) exceeds the exhaustive cap of " +
          std::to_string(exhaustive_cap) + "; use random mode");
    plan.splits.reserve(total);
    std::vector<std::size_t> train(m);
    std::iota(train.begin(), train.end(), 0);
    for (;;) {
      plan.splits.push_back({train, complement(n, train)});
      // Next lexicographic m-combination.
      std::size_t i = m;
      while (i > 0 && train[i - 1] == n - m + i - 1) --i;
      if (i == 0) break;
      ++train[i - 1];
      for (std::size_t j = i; j < m; ++j) train[j] = train[j - 1] + 1;
    }
    return plan;
  }
  if (requested < 1)
    throw std::invalid_argument("make_splits: requested count must be >= 1");
  const std::size_t want = std::min(requested, total);
  std::set<std::vector<std::size_t>> seen;
  std::vector<std::size_t> scratch(n);
  std::iota(scratch.begin(), scratch.end(), 0);
  std::size_t attempts = 0;
  const std::size_t max_attempts = 64 * requested + 1024;
  while (seen.size() < want && attempts < max_attempts) {
    ++attempts;
    for (std::size_t i = 0; i < m; ++i) {
      const auto j =
          i + static_cast<std::size_t>(rng.next_double() * double(n - i));
      std::swap(scratch[i], scratch[std::min(j, n - 1)]);
    }
    std::vector<std::size_t> train(scratch.begin(), scratch.begin() + m);
    std::sort(train.begin(), train.end());
    if (seen.insert(train).second)
      plan.splits.push_back({std::move(train), {}});
  }
  for (auto& split : plan.splits)
    split.validation = complement(n, split.train);
  return plan;
}

double cvbf_log_split(const ParametricPair& pair, const Sample& data,
                      const Split& split) {
  const std::size_t floor_m =
      std::max(pair.model1.min_train, pair.model0.min_train);
  if (split.train.size() < floor_m)
    throw std::invalid_argument(
        "cvbf_log_split: training set smaller than the pair's minimum of " +
        std::to_string(floor_m));
  if (split.validation.empty())
    throw std::invalid_argument("cvbf_log_split: empty validation set");
  const auto theta1 = pair.model1.fit(data, split.train);
  const auto theta0 = pair.model0.fit(data, split.train);
  double acc = 0.0;
  for (std::size_t i : split.validation)
    acc += pair.model1.loglik(theta1, data, i) -
           pair.model0.loglik(theta0, data, i);
  return acc;
}

double geometric_avg_log(const std::vector<double>& log_bfs) {
  if (log_bfs.empty())
    throw std::invalid_argument("geometric_avg_log: empty input");
  for (std::size_t l = 0; l < log_bfs.size(); ++l) {
    if (!std::isfinite(log_bfs[l]))
      throw std::runtime_error(
          "geometric_avg_log: non-finite log BF at split " +
          std::to_string(l));
  }
  // Summed in sorted order so the result is exactly permutation-invariant.
  std::vector<double> sorted(log_bfs);
  std::sort(sorted.begin(), sorted.end());
  double acc = 0.0;
  for (double x : sorted) acc += x;
  return acc / static_cast<double>(sorted.size());
}

double arithmetic_avg_log(const std::vector<double>& log_bfs) {
  if (log_bfs.empty())
    throw std::invalid_argument("arithmetic_avg_log: empty input");
  return mathcore::log_sum_exp(log_bfs) -
         std::log(static_cast<double>(log_bfs.size()));
}

double trimmed_mean(std::vector<double> values, double trim_fraction) {
  if (values.empty()) throw std::invalid_argument("trimmed_mean: empty input");
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5))
    throw std::invalid_argument("trimmed_mean: fraction outside [0, 0.5)");
  const auto cut = static_cast<std::size_t>(
      trim_fraction * static_cast<double>(values.size()));
  std::sort(values.begin(), values.end());
  double acc = 0.0;
  for (std::size_t i = cut; i < values.size() - cut; ++i) acc += values[i];
  return acc / static_cast<double>(values.size() - 2 * cut);
}

}  // namespace bridgefactor::splitkit
