#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "bridgefactor/mathcore.hpp"
#include "bridgefactor/splitkit.hpp"

namespace bridgefactor::normal_cases {

// Null mean theta0 against a free mean, common known sigma.
struct NormalKnownHyp {
  double theta0 = 0.0;
  double sigma = 1.0;
};

// Common-mean null against separate group means; the first half of a data
// vector carries mu1, the second half mu2, n even.
struct TwoMeanHyp {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double sigma = 1.0;
};

// Null N(0, sigma^2) with sigma unknown to the procedures; theta and sigma
// parameterize the simulator only.
struct NormalUnknownHyp {
  double theta = 0.0;
  double sigma = 1.0;
};

// ---- known sigma ----

// -(n-m)/(2 sigma^2) [ (xbar_T - xbar_V)^2 - (xbar_V - theta0)^2 ].
double nk_cvbf_log(const splitkit::Sample& data, const NormalKnownHyp& hyp,
                   const splitkit::Split& split);

// Corrected single-training-point intrinsic BF:
// (1 - ln n)/2 - (1/(2 sigma^2)) [ (x_i - theta0)^2 - n (xbar - theta0)^2 ].
double nk_cibf_log(const splitkit::Sample& data, const NormalKnownHyp& hyp,
                   std::size_t training_index);

// Corrected geometric average of the n single-point intrinsic BFs;
// closed form replaces (x_i - theta0)^2 by its average.
double nk_cgibf_log(const splitkit::Sample& data, const NormalKnownHyp& hyp);

// Corrected geometric average of intrinsic BFs over all C(n,m) training
// sets of size m, O(n) closed form (subset-mean variance identity).
// Reduces to nk_cgibf_log at m = 1.
double nk_cgibf_exhaustive_log(const splitkit::Sample& data,
                               const NormalKnownHyp& hyp, std::size_t m);

struct NkMoments {
  double e_log_cvbf = 0.0;
  double var_log_cvbf = 0.0;
  double e_log_cgibf = 0.0;
  double var_log_cibf = 0.0;
};

// Analytic moments under data drawn with mean theta.
NkMoments nk_expectations(std::size_t n, std::size_t m, double theta,
                          const NormalKnownHyp& hyp);

// Draws -( (n/m) chisq(1,0) - chisq(1, (n-m)(theta-theta0)^2/sigma^2) ) / 2,
// the two chi-square representation with independent components.
double nk_cvbf_distributional_sample(mathcore::rng64& rng, std::size_t n,
                                     std::size_t m, double theta,
                                     const NormalKnownHyp& hyp);

// Generic-engine pair: model1 fits the training mean, model0 pins theta0.
splitkit::ParametricPair make_nk_pair(const NormalKnownHyp& hyp);

// ---- two group means ----

// Chi-square representation draws (six noncentral chi-squares for the
// corrected IBF, five terms for CVBF), components independent.
double tm_cibf_sample(mathcore::rng64& rng, std::size_t n, std::size_t m,
                      const TwoMeanHyp& hyp);
double tm_cvbf_sample(mathcore::rng64& rng, std::size_t n, std::size_t m,
                      const TwoMeanHyp& hyp);

// Data-level CVBF via the generic engine; model0 = pooled mean,
// model1 = per-group means, sigma known. Data layout per TwoMeanHyp.
double tm_cvbf_log_data(const splitkit::Sample& data, double sigma,
                        const splitkit::Split& split);

splitkit::ParametricPair make_tm_pair(double sigma, std::size_t n);

// Splits with m/2 training indices drawn from each group so both group
// means stay estimable and the data-level mean matches the display exactly.
splitkit::SplitPlan tm_balanced_splits(std::size_t n, std::size_t m,
                                       std::size_t count,
                                       mathcore::rng64& rng);

struct TmExpectations {
  double e_log_cibf = 0.0;
  double e_log_cvbf = 0.0;
  // The printed bridged form -ln(n/2) + 1/2 + (n - n/ln(n/2)) delta^2 /
  // (8 sigma^2), kept exactly as published.
  double e_log_cvbf_bridged = 0.0;
};

TmExpectations tm_expectations(std::size_t n, std::size_t m,
                               const TwoMeanHyp& hyp);

// ---- unknown sigma ----

// Pair-trained intrinsic BF; s^2 is the full-sample centered sum of
// squares. Returns -inf (flagged by value) when x_i == x_j.
double nu_ibf_log(const splitkit::Sample& data, std::size_t i, std::size_t j);

struct PairAverage {
  double log_bf = 0.0;
  std::size_t excluded_pairs = 0;  // degenerate x_i == x_j pairs skipped
};

// nu_ibf_log over a size-2 plan in plan order with the data-level terms
// hoisted, O(n + pairs); tied pairs yield -inf entries.
std::vector<double> nu_ibf_logs(const splitkit::Sample& data,
                                const splitkit::SplitPlan& plan);

// Mean of nu_ibf_log over the plan's size-2 training sets.
PairAverage nu_gibf_log(const splitkit::Sample& data,
                        const splitkit::SplitPlan& plan);

// ((n-m)/2) ln(sum_T x^2 / sum_T (x - xbar_T)^2)
//   - (m/2) [ sum_V (x - xbar_T)^2 / sum_T (x - xbar_T)^2
//             - sum_V x^2 / sum_T x^2 ].
double nu_cvbf_log(const splitkit::Sample& data, const splitkit::Split& split);

// Null expectations; IBF needs n >= 4, CVBF needs m >= 4.
std::pair<double, double> nu_null_expectations(std::size_t n, std::size_t m);

// model1 fits (mean, variance) MLEs on training, model0 fits the
// zero-mean variance MLE.
splitkit::ParametricPair make_nu_pair();

}  // namespace bridgefactor::normal_cases
