#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "bridgefactor/curve_table.hpp"
#include "bridgefactor/mathcore.hpp"

namespace bridgefactor::concrete {

// One strength determination: mixture components x1..x7 (kg per cubic
// meter), age x8 in days (positive), compressive strength y (MPa).
struct ConcreteRecord {
  std::array<double, 8> x{};
  double y = 0.0;
};

// Least-squares fit of y on the 10-column design
// (1, x1, ..., x8, sqrt(x8)).
struct RegressionFit {
  std::vector<double> beta;       // design order
  std::vector<double> fitted;     // Z_i = row_i . beta
  std::vector<double> residuals;  // y_i - Z_i
};

// Error variance exp(a0 + a1 Z); a1 = 0 for the homoscedastic fit.
struct VarianceModelFit {
  double a0 = 0.0;
  double a1 = 0.0;
  double loglik = 0.0;
  bool converged = false;
};

// CSV rows of 9 numeric fields x1..x8,y. Blank lines are skipped and the
// first data line is dropped when has_header. Malformed rows and
// nonpositive ages raise errors naming the line.
std::vector<ConcreteRecord> load_concrete(const std::string& path,
                                          bool has_header);

// Householder QR least squares over >= 11 records; a collinear design
// column is named in the error.
RegressionFit fit_ols(const std::vector<ConcreteRecord>& records);

// Closed-form MLE a0 = ln(mean squared residual). An all-zero residual
// vector yields an unconverged fit with -inf loglik instead of an error.
VarianceModelFit fit_homoscedastic(const std::vector<double>& residuals);

// Maximizes sum_i [-(a0 + a1 Z_i)/2 - r_i^2 e^{-(a0 + a1 Z_i)}/2]
// - (k/2) ln 2pi: damped Newton from (ln mean r^2, 0) on the centered
// Z scale, gradient tolerance 1e-8 per observation, at most 200
// iterations, derivative-free simplex fallback. Non-convergence is
// flagged, not thrown.
VarianceModelFit fit_heteroscedastic(const std::vector<double>& residuals,
                                     const std::vector<double>& fitted);

enum class BetaMode {
  per_split,  // refit the regression on every training set
  global      // fix beta once on the full data, refit variances only
};

// Per m, `splits` random training sets: regression plus both variance
// fits on the training rows; log CVBF = validation loglik(heteroscedastic)
// - loglik(homoscedastic). Columns m, median, q1, q3, n_splits_used,
// skipped. Splits with a singular training design or an unconverged
// variance fit are skipped and counted. m_grid must lie in [12, n-12].
CurveTable concrete_cvbf(const std::vector<ConcreteRecord>& records,
                         const std::vector<std::size_t>& m_grid,
                         std::size_t splits, mathcore::rng64& rng,
                         BetaMode mode = BetaMode::per_split,
                         std::size_t threads = 1);

}  // namespace bridgefactor::concrete
