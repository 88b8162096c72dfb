#include "bridgefactor/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bridgefactor/mathcore.hpp"

namespace bridgefactor::criteria {

namespace {

void require_case_inputs(const splitkit::Sample& data, CriterionCase which,
                         const normal_cases::NormalKnownHyp& hyp) {
  if (data.size() < 2) throw std::invalid_argument("need at least two points");
  if (which == CriterionCase::normal_known) {
    if (!(hyp.sigma > 0.0))
      throw std::invalid_argument("sigma must be positive");
  } else if (hyp.theta0 != 0.0) {
    throw std::invalid_argument(
        "unknown-sigma criteria are defined for theta0 = 0");
  }
}

CriterionScore make_score(const char* method, CriterionCase which,
                          double value) {
  if (!std::isfinite(value))
    throw std::runtime_error(std::string(method) +
                             ": non-finite criterion value");
  return CriterionScore{method, which, value};
}

// (n/(2 sigma^2))(theta0^2 - th^2 + 2 xbar (th - theta0)) with th = xbar.
double known_quadratic(const splitkit::Sample& data,
                       const normal_cases::NormalKnownHyp& hyp) {
  const double nd = static_cast<double>(data.size());
  const double xbar = mathcore::mean(data);
  const double th = xbar;
  return nd *
         (hyp.theta0 * hyp.theta0 - th * th + 2.0 * xbar * (th - hyp.theta0)) /
         (2.0 * hyp.sigma * hyp.sigma);
}

// n^2 xbar^2 / (2 sum (x - xbar)^2).
double unknown_quadratic(const splitkit::Sample& data) {
  const double nd = static_cast<double>(data.size());
  const double xbar = mathcore::mean(data);
  double ss = 0.0;
  for (double x : data) {
    const double d = x - xbar;
    ss += d * d;
  }
  if (!(ss > 0.0)) throw std::runtime_error("constant sample: zero spread");
  return nd * nd * xbar * xbar / (2.0 * ss);
}

double case_quadratic(const splitkit::Sample& data, CriterionCase which,
                      const normal_cases::NormalKnownHyp& hyp) {
  return which == CriterionCase::normal_known ? known_quadratic(data, hyp)
                                              : unknown_quadratic(data);
}

// ln((1 - e^-v)/(sqrt(2) v)), continuous at v = 0 where it is ln(1/sqrt 2).
double pbic_prior_term(double v) {
  if (v == 0.0) return -0.5 * std::log(2.0);
  return std::log(-std::expm1(-v) / v) - 0.5 * std::log(2.0);
}

// ln((1 - e^-c)/sqrt(2 v c)), c = min(v, 1.3); same v -> 0 limit.
double pbic_star_prior_term(double v) {
  if (v == 0.0) return -0.5 * std::log(2.0);
  const double c = std::min(v, 1.3);
  return std::log(-std::expm1(-c)) - 0.5 * std::log(2.0 * v * c);
}

}  // namespace

CriterionScore bic_log(const splitkit::Sample& data, CriterionCase which,
                       const normal_cases::NormalKnownHyp& hyp) {
  require_case_inputs(data, which, hyp);
  const double nd = static_cast<double>(data.size());
  return make_score("bic", which,
                    -0.5 * std::log(nd) + case_quadratic(data, which, hyp));
}

CriterionScore pbic_log(const splitkit::Sample& data, CriterionCase which,
                        const normal_cases::NormalKnownHyp& hyp) {
  require_case_inputs(data, which, hyp);
  const double nd = static_cast<double>(data.size());
  const double xbar = mathcore::mean(data);
  const double v = xbar * xbar / (1.0 + nd);
  return make_score("pbic", which,
                    -0.5 * std::log(1.0 + nd) +
                        case_quadratic(data, which, hyp) + pbic_prior_term(v));
}

CriterionScore pbic_star_log(const splitkit::Sample& data,
                             CriterionCase which,
                             const normal_cases::NormalKnownHyp& hyp) {
  require_case_inputs(data, which, hyp);
  const double nd = static_cast<double>(data.size());
  const double xbar = mathcore::mean(data);
  const double v = xbar * xbar / (1.0 + nd);
  return make_score("pbic_star", which,
                    -0.5 * std::log(1.0 + nd) +
                        case_quadratic(data, which, hyp) +
                        pbic_star_prior_term(v));
}

CriterionScore fbf_log(const splitkit::Sample& data, CriterionCase which,
                       const normal_cases::NormalKnownHyp& hyp) {
  require_case_inputs(data, which, hyp);
  const double nd = static_cast<double>(data.size());
  if (which == CriterionCase::normal_known)
    return make_score("fbf", which,
                      -0.5 * std::log(nd) +
                          (1.0 - 1.0 / nd) * known_quadratic(data, hyp));
  return make_score("fbf", which,
                    -0.5 * std::log(nd / 2.0) +
                        (1.0 - 2.0 / nd) * unknown_quadratic(data));
}

CriterionScore aibf_log(const splitkit::Sample& data, CriterionCase which,
                        const normal_cases::NormalKnownHyp& hyp,
                        const splitkit::SplitPlan& plan) {
  require_case_inputs(data, which, hyp);
  if (plan.splits.empty()) throw std::invalid_argument("empty split plan");
  std::vector<double> logs;
  logs.reserve(plan.splits.size());
  if (which == CriterionCase::normal_known) {
    if (plan.m != 1)
      throw std::invalid_argument("known-sigma intrinsic BF trains on 1 point");
    for (const auto& split : plan.splits) {
      if (split.train.size() != 1)
        throw std::invalid_argument(
            "known-sigma intrinsic BF trains on 1 point");
      logs.push_back(normal_cases::nk_cibf_log(data, hyp, split.train[0]) -
                     0.5);
    }
  } else {
    if (plan.m != 2)
      throw std::invalid_argument(
          "unknown-sigma intrinsic BF trains on 2 points");
    logs = normal_cases::nu_ibf_logs(data, plan);
  }
  return make_score("aibf", which, splitkit::arithmetic_avg_log(logs));
}

CurveTable criteria_expectation_curves(
    CriterionCase which, double theta, double theta0, double sigma,
    const std::vector<std::size_t>& n_grid) {
  if (which != CriterionCase::normal_known)
    throw std::invalid_argument(
        "expectation curves are printed for the known-sigma case only");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (n_grid.empty()) throw std::invalid_argument("empty n grid");
  CurveTable table;
  table.columns = {"n", "e_log_bic", "e_log_pbic", "e_log_pbic_star",
                   "e_log_fbf"};
  const double shift2 = (theta - theta0) * (theta - theta0) / (sigma * sigma);
  for (std::size_t n : n_grid) {
    if (n < 2) throw std::invalid_argument("grid entries must be >= 2");
    const double nd = static_cast<double>(n);
    const double quad = 0.5 * nd * shift2;
    const double v = theta * theta / (1.0 + nd);
    table.rows.push_back(
        {nd, -0.5 * std::log(nd) + quad,
         -0.5 * std::log(1.0 + nd) + quad + pbic_prior_term(v),
         -0.5 * std::log(1.0 + nd) + quad + pbic_star_prior_term(v),
         -0.5 * std::log(nd) + (1.0 - 1.0 / nd) * quad});
  }
  return table;
}

}  // namespace bridgefactor::criteria
