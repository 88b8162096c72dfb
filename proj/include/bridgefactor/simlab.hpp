#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "bridgefactor/curve_table.hpp"

namespace bridgefactor::simlab {

enum class ExperimentCase {
  normal_known,
  normal_two,
  normal_unknown,
  exponential
};

// One simulation recipe: the sampling model, the grid of sample sizes,
// and the Monte-Carlo depth. theta is the sampling mean (group 1 in the
// two-mean case), theta0 the point null; beta/beta0 are the exponential
// sampling and null rates. splits_per_bf caps the random splits behind
// each CVBF value (all distinct splits when fewer exist).
struct ExperimentConfig {
  ExperimentCase which = ExperimentCase::normal_known;
  double theta = 0.0;
  double theta0 = 0.0;
  double mu2 = 0.0;
  double sigma = 1.0;
  double beta = 1.0;
  double beta0 = 1.0;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 1000;
  std::size_t splits_per_bf = 50;
  double trim_fraction = 0.25;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

// Replicate curves of log CVBF (bridge-rule training size) and log cGIBF
// over the n grid. Columns: n, m_cvbf, then mean/trimmed_mean/q1/q3/expect
// for cvbf and gibf. Expect overlays are NaN where no closed form exists
// (unknown sigma away from the null). Grid entries where the bridge rule
// is undefined (or odd n in the two-mean case) are skipped; a grid with no
// feasible entry is an error. Replicates are keyed by (seed, n, replicate)
// so results are identical for any thread count.
CurveTable run_consistency(const ExperimentConfig& config);

struct RocPoint {
  std::size_t m = 0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Known-sigma one-mean ROC study: data N(theta0, sigma) under the null
// and N(theta1, sigma) under the alternative, n fixed, the training size
// swept over m_grid.
struct RocConfig {
  std::size_t n = 100;
  std::vector<std::size_t> m_grid;
  std::size_t reps = 1000;        // datasets per hypothesis per m
  std::size_t splits_per_bf = 2;  // random splits behind each CVBF score
  std::size_t gibf_batch = 5;     // datasets pooled into one GIBF score
  double theta0 = 0.0;
  double theta1 = 0.25;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

// Trapezoid area under the (fpr, tpr) polyline: points sorted by fpr with
// ties broken by tpr, anchors (0,0) and (1,1) appended.
double roc_auc(std::vector<RocPoint> points);

// Per m: `reps` fresh datasets per hypothesis. A CVBF score is one
// dataset's geometric split average; a GIBF score is the mean corrected
// exhaustive-average log IBF over each batch of gibf_batch datasets.
// Decision rule log BF > 0; fpr/tpr are the null/alternative exceedance
// fractions. Returns (CVBF curve, GIBF curve).
std::pair<RocCurve, RocCurve> run_roc(const RocConfig& config);

// Flat emission of both curves: columns m, cvbf_fpr, cvbf_tpr, gibf_fpr,
// gibf_tpr; summary auc_cvbf and auc_gibf.
CurveTable roc_table(const RocCurve& cvbf, const RocCurve& gibf);

// Penalized-criteria comparison for the one-mean normal cases
// (normal_known, normal_unknown only). Columns: n, m_cvbf, then
// mean/q1/q3 for cvbf and gibf, then replicate means of log BIC, PBIC,
// PBIC*, FBF, AIBF.
CurveTable run_criteria_compare(const ExperimentConfig& config);

}  // namespace bridgefactor::simlab
