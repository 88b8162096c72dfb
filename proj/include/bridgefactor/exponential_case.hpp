#pragma once

#include <cstddef>
#include <vector>

#include "bridgefactor/curve_table.hpp"
#include "bridgefactor/mathcore.hpp"
#include "bridgefactor/splitkit.hpp"

namespace bridgefactor::exponential_case {

// Null rate beta0 against a free rate; beta parameterizes the sampling
// model for expectations and sweeps.
struct ExpHyp {
  double beta0 = 1.0;
  double beta = 1.0;
};

// Single-training-point intrinsic BF under the 1/beta prior:
// log_gamma(n) + ln x_l - n ln(n xbar) - (n-1) ln beta0
//   + beta0 (n-1) xbar_without_l.
double exp_ibf_log(const splitkit::Sample& data, const ExpHyp& hyp,
                   std::size_t training_index);

// Mean of exp_ibf_log over the plan's single-point training sets minus
// psi(1), the log of the geometric-average correction.
double exp_cgibf_log(const splitkit::Sample& data, const ExpHyp& hyp,
                     const splitkit::SplitPlan& plan);

// -(n-m) ln(beta0 xbar_T) - (n-m) xbar_V / xbar_T + beta0 (n-m) xbar_V.
double exp_cvbf_log(const splitkit::Sample& data, const ExpHyp& hyp,
                    const splitkit::Split& split);

// model1 fits the training-mean rate, model0 pins beta0.
splitkit::ParametricPair make_exp_pair(double beta0);

struct ExpExpectations {
  // Exact sampling-model expectations (digamma and log-gamma evaluated
  // exactly); the CVBF display carries the user-supplied m.
  double e_log_cgibf_m1 = 0.0;
  double e_log_cvbf_m1 = 0.0;
  // Null approximations with psi(n) ~ ln(n - 1/2), Stirling log-gamma, and
  // m = n/ln n substituted.
  double e_log_cibf_m0_approx = 0.0;
  double e_log_cvbf_m0_approx = 0.0;
};

ExpExpectations exp_expectations(std::size_t n, std::size_t m,
                                 const ExpHyp& hyp);

// Per grid rate: mean log CVBF at the bridge-rule training size (geometric
// average over `splits` random splits per dataset) and the mean
// training-point-averaged intrinsic BF plus psi(1), matching the published
// curve, over `reps` fresh datasets. Columns: beta, cvbf_mean, gibf_mean,
// cvbf_expect, gibf_expect. Summary holds the interpolated null-favoring
// interval endpoints (cvbf_null_lo/hi, gibf_null_lo/hi, NaN when a curve
// never changes sign).
CurveTable exp_sweep(const std::vector<double>& beta_grid, std::size_t n,
                     std::size_t reps, double beta0, mathcore::rng64& rng,
                     std::size_t splits = 1, std::size_t threads = 1);

}  // namespace bridgefactor::exponential_case
