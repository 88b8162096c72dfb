#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bridgefactor/curve_table.hpp"
#include "bridgefactor/normal_cases.hpp"
#include "bridgefactor/splitkit.hpp"

namespace bridgefactor::criteria {

enum class CriterionCase { normal_known, normal_unknown };

struct CriterionScore {
  std::string method;
  CriterionCase which = CriterionCase::normal_known;
  double log_value = 0.0;  // always finite
};

// All scores substitute the full-data MLE theta_hat = xbar. The unknown-
// sigma forms fix theta0 = 0, so hyp.theta0 must be 0 there and hyp.sigma
// is ignored.

// Known sigma: -ln(n)/2 + (n/(2 sigma^2))(theta0^2 - th^2 + 2 xbar(th - theta0)).
// Unknown sigma: -ln(n)/2 + n^2 xbar^2 / (2 sum (x - xbar)^2).
CriterionScore bic_log(const splitkit::Sample& data, CriterionCase which,
                       const normal_cases::NormalKnownHyp& hyp);

// BIC quadratic with ln(1+n) and the prior term ln((1 - e^-v)/(sqrt(2) v)),
// v = xbar^2/(1+n).
CriterionScore pbic_log(const splitkit::Sample& data, CriterionCase which,
                        const normal_cases::NormalKnownHyp& hyp);

// Prior term ln((1 - e^-c)/sqrt(2 v c)) with c = min(v, 1.3); equals
// pbic_log whenever v <= 1.3.
CriterionScore pbic_star_log(const splitkit::Sample& data,
                             CriterionCase which,
                             const normal_cases::NormalKnownHyp& hyp);

// Fractional approximation with b = k1/n: the likelihood-ratio quadratic
// scaled by (1 - b) plus (1/2) ln b.
CriterionScore fbf_log(const splitkit::Sample& data, CriterionCase which,
                       const normal_cases::NormalKnownHyp& hyp);

// Arithmetic average of uncorrected intrinsic BFs over the plan's training
// sets (size 1 known sigma, size 2 unknown sigma); zero-BF pairs contribute
// zero weight.
CriterionScore aibf_log(const splitkit::Sample& data, CriterionCase which,
                        const normal_cases::NormalKnownHyp& hyp,
                        const splitkit::SplitPlan& plan);

// Analytic expectation curves of the known-sigma displays with theta
// plugged in for the MLE. Columns: n, e_log_bic, e_log_pbic,
// e_log_pbic_star, e_log_fbf. The unknown-sigma case has no printed
// expectations and is rejected.
CurveTable criteria_expectation_curves(CriterionCase which, double theta,
                                       double theta0, double sigma,
                                       const std::vector<std::size_t>& n_grid);

}  // namespace bridgefactor::criteria
