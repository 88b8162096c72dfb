#include "bridgefactor/concrete.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bridgefactor/parallel.hpp"
#include "bridgefactor/splitkit.hpp"

namespace bridgefactor::concrete {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;

constexpr std::size_t kDesignCols = 10;
constexpr const char* kColumnNames[kDesignCols] = {
    "intercept", "x1", "x2", "x3", "x4",
    "x5",        "x6", "x7", "x8", "sqrt_x8"};

std::array<double, kDesignCols> design_row(const ConcreteRecord& rec) {
  return {1.0,      rec.x[0], rec.x[1], rec.x[2], rec.x[3],
          rec.x[4], rec.x[5], rec.x[6], rec.x[7], std::sqrt(rec.x[7])};
}

double parse_field(const std::string& cell) {
  const auto begin = cell.find_first_not_of(" \t");
  if (begin == std::string::npos) throw std::invalid_argument("empty field");
  const auto end = cell.find_last_not_of(" \t");
  const std::string trimmed = cell.substr(begin, end - begin + 1);
  std::size_t used = 0;
  const double value = std::stod(trimmed, &used);
  if (used != trimmed.size()) throw std::invalid_argument("trailing junk");
  return value;
}

// Sum of the heteroscedastic per-point terms without the 2pi constant.
double het_loglik_core(const std::vector<double>& residuals,
                       const std::vector<double>& z, double a0, double a1) {
  double sum = 0.0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    const double eta = a0 + a1 * z[i];
    sum += -0.5 * eta - 0.5 * residuals[i] * residuals[i] * std::exp(-eta);
  }
  return sum;
}

struct SimplexPoint {
  double a0 = 0.0;
  double a1 = 0.0;
  double neg = 0.0;
};

// Nelder-Mead on the negated core loglik; returns the best vertex.
SimplexPoint simplex_minimize(const std::vector<double>& residuals,
                              const std::vector<double>& z, double a0,
                              double a1, double scale1) {
  const auto eval = [&](double b0, double b1) {
    return -het_loglik_core(residuals, z, b0, b1);
  };
  std::array<SimplexPoint, 3> s{{{a0, a1, eval(a0, a1)},
                                 {a0 + 0.5, a1, eval(a0 + 0.5, a1)},
                                 {a0, a1 + scale1, eval(a0, a1 + scale1)}}};
  const auto by_value = [](const SimplexPoint& p, const SimplexPoint& q) {
    return p.neg < q.neg;
  };
  for (int iter = 0; iter < 500; ++iter) {
    std::sort(s.begin(), s.end(), by_value);
    const double spread = std::max(std::fabs(s[2].a0 - s[0].a0),
                                   std::fabs(s[2].a1 - s[0].a1));
    if (spread < 1e-11 && s[2].neg - s[0].neg < 1e-12) break;
    const double c0 = 0.5 * (s[0].a0 + s[1].a0);
    const double c1 = 0.5 * (s[0].a1 + s[1].a1);
    SimplexPoint refl{c0 + (c0 - s[2].a0), c1 + (c1 - s[2].a1), 0.0};
    refl.neg = eval(refl.a0, refl.a1);
    if (refl.neg < s[0].neg) {
      SimplexPoint exp_pt{c0 + 2.0 * (c0 - s[2].a0), c1 + 2.0 * (c1 - s[2].a1),
                          0.0};
      exp_pt.neg = eval(exp_pt.a0, exp_pt.a1);
      s[2] = exp_pt.neg < refl.neg ? exp_pt : refl;
    } else if (refl.neg < s[1].neg) {
      s[2] = refl;
    } else {
      SimplexPoint contr{c0 + 0.5 * (s[2].a0 - c0), c1 + 0.5 * (s[2].a1 - c1),
                         0.0};
      contr.neg = eval(contr.a0, contr.a1);
      if (contr.neg < s[2].neg) {
        s[2] = contr;
      } else {
        for (int j = 1; j < 3; ++j) {
          s[j].a0 = s[0].a0 + 0.5 * (s[j].a0 - s[0].a0);
          s[j].a1 = s[0].a1 + 0.5 * (s[j].a1 - s[0].a1);
          s[j].neg = eval(s[j].a0, s[j].a1);
        }
      }
    }
  }
  std::sort(s.begin(), s.end(), by_value);
  return s[0];
}

}  // namespace

std::vector<ConcreteRecord> load_concrete(const std::string& path,
                                          bool has_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<ConcreteRecord> records;
  std::string line;
  std::size_t line_no = 0;
  bool pending_header = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 &&
        line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (pending_header) {
      pending_header = false;
      continue;
    }
    std::stringstream cells(line);
    std::string cell;
    std::vector<double> values;
    bool parsed = true;
    while (std::getline(cells, cell, ',')) {
      try {
        values.push_back(parse_field(cell));
      } catch (const std::exception&) {
        parsed = false;
        break;
      }
    }
    if (!parsed || values.size() != 9 ||
        std::any_of(values.begin(), values.end(),
                    [](double v) { return !std::isfinite(v); })) {
      throw std::runtime_error("malformed row " + std::to_string(line_no) +
                               ": " + line);
    }
    if (!(values[7] > 0.0)) {
      throw std::runtime_error("nonpositive age at row " +
                               std::to_string(line_no) + ": " + line);
    }
    ConcreteRecord rec;
    for (std::size_t j = 0; j < 8; ++j) rec.x[j] = values[j];
    rec.y = values[8];
    records.push_back(rec);
  }
  if (records.empty()) throw std::runtime_error("no records in " + path);
  return records;
}

RegressionFit fit_ols(const std::vector<ConcreteRecord>& records) {
  const std::size_t k = records.size();
  if (k < 11) throw std::invalid_argument("need at least 11 records");
  for (const auto& rec : records) {
    if (!(rec.x[7] > 0.0)) throw std::domain_error("nonpositive age");
  }

  // Column-major working copy; column j occupies qr[j*k .. j*k+k).
  std::vector<double> qr(kDesignCols * k);
  std::vector<double> rhs(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto row = design_row(records[i]);
    for (std::size_t j = 0; j < kDesignCols; ++j) qr[j * k + i] = row[j];
    rhs[i] = records[i].y;
  }
  std::array<double, kDesignCols> col_norm{};
  for (std::size_t j = 0; j < kDesignCols; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += qr[j * k + i] * qr[j * k + i];
    col_norm[j] = std::sqrt(sum);
  }

  // Householder QR; a pivot collapsing relative to the original column norm
  // means the column is a combination of earlier ones.
  for (std::size_t j = 0; j < kDesignCols; ++j) {
    double* cj = &qr[j * k];
    double norm_sq = 0.0;
    for (std::size_t i = j; i < k; ++i) norm_sq += cj[i] * cj[i];
    const double norm = std::sqrt(norm_sq);
    if (norm <= 1e-10 * col_norm[j]) {
      throw std::runtime_error(std::string("collinear design column ") +
                               kColumnNames[j]);
    }
    const double alpha = cj[j] >= 0.0 ? -norm : norm;
    const double vj = cj[j] - alpha;
    double vtv = vj * vj;
    for (std::size_t i = j + 1; i < k; ++i) vtv += cj[i] * cj[i];
    if (vtv > 0.0) {
      for (std::size_t l = j + 1; l < kDesignCols; ++l) {
        double* cl = &qr[l * k];
        double dot = vj * cl[j];
        for (std::size_t i = j + 1; i < k; ++i) dot += cj[i] * cl[i];
        const double scale = 2.0 * dot / vtv;
        cl[j] -= scale * vj;
        for (std::size_t i = j + 1; i < k; ++i) cl[i] -= scale * cj[i];
      }
      double dot = vj * rhs[j];
      for (std::size_t i = j + 1; i < k; ++i) dot += cj[i] * rhs[i];
      const double scale = 2.0 * dot / vtv;
      rhs[j] -= scale * vj;
      for (std::size_t i = j + 1; i < k; ++i) rhs[i] -= scale * cj[i];
    }
    cj[j] = alpha;
  }

  RegressionFit fit;
  fit.beta.assign(kDesignCols, 0.0);
  for (std::size_t jj = kDesignCols; jj-- > 0;) {
    double sum = rhs[jj];
    for (std::size_t l = jj + 1; l < kDesignCols; ++l) {
      sum -= qr[l * k + jj] * fit.beta[l];
    }
    fit.beta[jj] = sum / qr[jj * k + jj];
  }
  fit.fitted.resize(k);
  fit.residuals.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto row = design_row(records[i]);
    double z = 0.0;
    for (std::size_t j = 0; j < kDesignCols; ++j) z += row[j] * fit.beta[j];
    fit.fitted[i] = z;
    fit.residuals[i] = records[i].y - z;
  }
  return fit;
}

VarianceModelFit fit_homoscedastic(const std::vector<double>& residuals) {
  if (residuals.empty()) {
    throw std::invalid_argument("need at least one residual");
  }
  double msq = 0.0;
  for (const double r : residuals) msq += r * r;
  msq /= static_cast<double>(residuals.size());
  VarianceModelFit fit;
  if (!(msq > 0.0)) {
    fit.a0 = -kInf;
    fit.loglik = -kInf;
    return fit;
  }
  const double kd = static_cast<double>(residuals.size());
  fit.a0 = std::log(msq);
  fit.loglik = -0.5 * kd * kLog2Pi - 0.5 * kd * fit.a0 - 0.5 * kd;
  fit.converged = true;
  return fit;
}

VarianceModelFit fit_heteroscedastic(const std::vector<double>& residuals,
                                     const std::vector<double>& fitted) {
  const std::size_t k = residuals.size();
  if (k < 2) throw std::invalid_argument("need at least two residuals");
  if (fitted.size() != k) {
    throw std::invalid_argument("residual/fitted size mismatch");
  }
  const auto [zmin, zmax] = std::minmax_element(fitted.begin(), fitted.end());
  if (!(*zmax > *zmin)) {
    throw std::invalid_argument("fitted means all equal");
  }
  double msq = 0.0;
  for (const double r : residuals) msq += r * r;
  msq /= static_cast<double>(k);
  VarianceModelFit fit;
  if (!(msq > 0.0)) {
    fit.a0 = -kInf;
    fit.loglik = -kInf;
    return fit;
  }

  // Center Z so the Hessian stays well scaled; a0 is translated back below.
  const double zbar = mathcore::mean(fitted);
  std::vector<double> zc(k);
  double zc_max = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    zc[i] = fitted[i] - zbar;
    zc_max = std::max(zc_max, std::fabs(zc[i]));
  }
  const double kd = static_cast<double>(k);
  const double tol = 1e-8 * kd;

  double b0 = std::log(msq);
  double b1 = 0.0;
  double core = het_loglik_core(residuals, zc, b0, b1);
  bool at_optimum = false;
  for (int iter = 0; iter < 200; ++iter) {
    double g0 = 0.0;
    double g1 = 0.0;
    double h00 = 0.0;
    double h01 = 0.0;
    double h11 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double w =
          residuals[i] * residuals[i] * std::exp(-(b0 + b1 * zc[i]));
      g0 += 0.5 * (w - 1.0);
      g1 += 0.5 * zc[i] * (w - 1.0);
      h00 -= 0.5 * w;
      h01 -= 0.5 * zc[i] * w;
      h11 -= 0.5 * zc[i] * zc[i] * w;
    }
    if (std::max(std::fabs(g0), std::fabs(g1)) < tol) {
      at_optimum = true;
      break;
    }
    const double det = h00 * h11 - h01 * h01;
    if (!(det > 0.0) || !(h00 < 0.0)) break;
    const double d0 = -(h11 * g0 - h01 * g1) / det;
    const double d1 = -(h00 * g1 - h01 * g0) / det;
    // Inside the quadratic regime the remaining improvement drops below
    // the resolution of the summed loglik, so the step is taken unguarded.
    if (g0 * d0 + g1 * d1 < 1e-9) {
      b0 += d0;
      b1 += d1;
      core = het_loglik_core(residuals, zc, b0, b1);
      continue;
    }
    double step = 1.0;
    bool improved = false;
    for (int half = 0; half < 40; ++half) {
      const double trial =
          het_loglik_core(residuals, zc, b0 + step * d0, b1 + step * d1);
      if (trial > core) {
        b0 += step * d0;
        b1 += step * d1;
        core = trial;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }

  if (!at_optimum) {
    const double scale1 = 0.5 / std::max(1.0, zc_max);
    const auto best =
        simplex_minimize(residuals, zc, std::log(msq), 0.0, scale1);
    if (-best.neg > core) {
      b0 = best.a0;
      b1 = best.a1;
      core = -best.neg;
    }
    double g0 = 0.0;
    double g1 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double w =
          residuals[i] * residuals[i] * std::exp(-(b0 + b1 * zc[i]));
      g0 += 0.5 * (w - 1.0);
      g1 += 0.5 * zc[i] * (w - 1.0);
    }
    at_optimum = std::max(std::fabs(g0), std::fabs(g1)) < tol;
  }

  fit.a1 = b1;
  fit.a0 = b0 - b1 * zbar;
  fit.loglik = core - 0.5 * kd * kLog2Pi;
  fit.converged = at_optimum;
  return fit;
}

CurveTable concrete_cvbf(const std::vector<ConcreteRecord>& records,
                         const std::vector<std::size_t>& m_grid,
                         std::size_t splits, mathcore::rng64& rng,
                         BetaMode mode, std::size_t threads) {
  const std::size_t n = records.size();
  if (m_grid.empty()) throw std::invalid_argument("empty m grid");
  if (splits == 0) throw std::invalid_argument("splits must be positive");
  if (n < 24) throw std::invalid_argument("need at least 24 records");
  for (const std::size_t m : m_grid) {
    if (m < 12 || m + 12 > n) {
      throw std::invalid_argument("training size " + std::to_string(m) +
                                  " outside [12, n-12]");
    }
  }

  RegressionFit global_fit;
  if (mode == BetaMode::global) global_fit = fit_ols(records);

  const std::uint64_t base_seed = rng.next_u64();
  std::vector<double> values(m_grid.size() * splits, kNan);
  parallel::parallel_for(values.size(), threads, [&](std::size_t idx) {
    const std::size_t g = idx / splits;
    const std::size_t s = idx % splits;
    mathcore::rng64 job_rng(
        mathcore::substream_seed(mathcore::substream_seed(base_seed, g), s));
    const auto plan = splitkit::make_splits(n, m_grid[g],
                                            splitkit::SplitMode::random, 1,
                                            job_rng);
    const auto& split = plan.splits[0];
    try {
      std::vector<double> beta;
      std::vector<double> train_fitted;
      std::vector<double> train_resid;
      train_fitted.reserve(split.train.size());
      train_resid.reserve(split.train.size());
      if (mode == BetaMode::per_split) {
        std::vector<ConcreteRecord> train_records;
        train_records.reserve(split.train.size());
        for (const std::size_t i : split.train) {
          train_records.push_back(records[i]);
        }
        auto fit = fit_ols(train_records);
        beta = std::move(fit.beta);
        train_fitted = std::move(fit.fitted);
        train_resid = std::move(fit.residuals);
      } else {
        beta = global_fit.beta;
        for (const std::size_t i : split.train) {
          train_fitted.push_back(global_fit.fitted[i]);
          train_resid.push_back(global_fit.residuals[i]);
        }
      }
      const auto homo = fit_homoscedastic(train_resid);
      const auto het = fit_heteroscedastic(train_resid, train_fitted);
      if (!homo.converged || !het.converged) return;
      double log_bf = 0.0;
      for (const std::size_t i : split.validation) {
        const auto row = design_row(records[i]);
        double z = 0.0;
        for (std::size_t j = 0; j < kDesignCols; ++j) z += row[j] * beta[j];
        const double r = records[i].y - z;
        const double eta = het.a0 + het.a1 * z;
        log_bf += -0.5 * eta - 0.5 * r * r * std::exp(-eta);
        log_bf -= -0.5 * homo.a0 - 0.5 * r * r * std::exp(-homo.a0);
      }
      values[idx] = log_bf;
    } catch (const std::runtime_error&) {
      // Singular training design: the slot stays NaN and counts as skipped.
    }
  });

  CurveTable table;
  table.columns = {"m", "median", "q1", "q3", "n_splits_used", "skipped"};
  for (std::size_t g = 0; g < m_grid.size(); ++g) {
    std::vector<double> used;
    used.reserve(splits);
    for (std::size_t s = 0; s < splits; ++s) {
      const double v = values[g * splits + s];
      if (std::isfinite(v)) used.push_back(v);
    }
    std::vector<double> row(6, kNan);
    row[0] = static_cast<double>(m_grid[g]);
    if (!used.empty()) {
      row[1] = mathcore::quantile(used, 0.5);
      row[2] = mathcore::quantile(used, 0.25);
      row[3] = mathcore::quantile(used, 0.75);
    }
    row[4] = static_cast<double>(used.size());
    row[5] = static_cast<double>(splits - used.size());
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace bridgefactor::concrete
