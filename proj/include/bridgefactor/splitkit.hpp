#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "bridgefactor/mathcore.hpp"

namespace bridgefactor::splitkit {

// One case's data vector; all values finite.
using Sample = std::vector<double>;

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// L training/validation partitions of {0..n-1} with |train| = m. Exhaustive
// plans enumerate all C(n,m) training sets; random plans hold distinct ones.
struct SplitPlan {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<Split> splits;
};

enum class SplitMode { exhaustive, random };

// C(n,m), saturating at cap+1 once the count exceeds cap.
std::size_t combination_count_capped(std::size_t n, std::size_t m,
                                     std::size_t cap);

// Exhaustive mode requires C(n,m) <= exhaustive_cap and enumerates every
// training set; random mode draws `requested` distinct training sets
// uniformly (fewer only if C(n,m) < requested).
SplitPlan make_splits(std::size_t n, std::size_t m, SplitMode mode,
                      std::size_t requested, mathcore::rng64& rng,
                      std::size_t exhaustive_cap = 100000);

// A parametric model for the generic engine: fit returns the MLE from the
// training indices, loglik evaluates one point under fitted parameters.
struct ParametricModel {
  std::size_t min_train = 1;
  std::function<std::vector<double>(const Sample&,
                                    const std::vector<std::size_t>&)>
      fit;
  std::function<double(const std::vector<double>&, const Sample&, std::size_t)>
      loglik;
};

// model1 is the Bayes-factor numerator; orientation is fixed "1 over 0".
struct ParametricPair {
  ParametricModel model1;
  ParametricModel model0;
};

// log B(X_T, X_V) = sum_V loglik1(theta_hat) - sum_V loglik0(lambda_hat),
// both MLEs fitted on the training set only.
double cvbf_log_split(const ParametricPair& pair, const Sample& data,
                      const Split& split);

// Arithmetic mean of log values = log of the geometric BF average.
// Any non-finite entry is an error carrying the offending index.
double geometric_avg_log(const std::vector<double>& log_bfs);

// log((1/L) sum exp(v)) via log-sum-exp.
double arithmetic_avg_log(const std::vector<double>& log_bfs);

// Mean after deleting floor(trim_fraction * L) order statistics per end.
double trimmed_mean(std::vector<double> values, double trim_fraction);

}  // namespace bridgefactor::splitkit
