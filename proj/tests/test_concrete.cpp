#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bridgefactor/bridge_rule.hpp"
#include "bridgefactor/concrete.hpp"
#include "bridgefactor/curve_table.hpp"
#include "bridgefactor/mathcore.hpp"
#include "doctest.h"

using namespace bridgefactor;
using concrete::ConcreteRecord;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

std::string write_file(const std::string& name, const std::string& content) {
  std::ofstream out(name, std::ios::binary);
  REQUIRE(out.good());
  out << content;
  out.close();
  return name;
}

// Same mixture design as the bundled generator, kept un-rounded.
std::vector<ConcreteRecord> make_synthetic(std::size_t n, std::uint64_t seed,
                                           double var_icept = 0.8,
                                           double var_slope = 0.042) {
  static constexpr std::array<double, 9> ages = {1.0,  3.0,  7.0,   14.0, 28.0,
                                                 56.0, 90.0, 180.0, 365.0};
  static constexpr std::array<double, 10> beta = {
      8.0, 0.055, 0.035, 0.030, -0.09, 0.15, 0.006, 0.008, -0.006, 1.5};
  mathcore::rng64 rng(seed);
  std::vector<ConcreteRecord> records(n);
  for (auto& rec : records) {
    rec.x[0] = 100.0 + 450.0 * rng.next_double();
    rec.x[1] = rng.next_double() < 0.4 ? 0.0 : 360.0 * rng.next_double();
    rec.x[2] = rng.next_double() < 0.5 ? 0.0 : 200.0 * rng.next_double();
    rec.x[3] = 120.0 + 130.0 * rng.next_double();
    rec.x[4] = rng.next_double() < 0.3 ? 0.0 : 32.0 * rng.next_double();
    rec.x[5] = 800.0 + 350.0 * rng.next_double();
    rec.x[6] = 590.0 + 405.0 * rng.next_double();
    const auto idx = static_cast<std::size_t>(9.0 * rng.next_double());
    rec.x[7] = ages[idx < 9 ? idx : 8];
    double mu = beta[0] + beta[9] * std::sqrt(rec.x[7]);
    for (std::size_t j = 0; j < 8; ++j) mu += beta[j + 1] * rec.x[j];
    const double sd = std::exp(0.5 * (var_icept + var_slope * mu));
    rec.y = mu + mathcore::sample_normal(rng, 0.0, sd);
  }
  return records;
}

// Residual variance of the quarter with the largest fitted means over the
// quarter with the smallest.
double fan_ratio(const concrete::RegressionFit& fit) {
  std::vector<std::size_t> order(fit.fitted.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fit.fitted[a] < fit.fitted[b];
  });
  const std::size_t quarter = order.size() / 4;
  REQUIRE(quarter >= 2);
  double bottom = 0.0;
  double top = 0.0;
  for (std::size_t i = 0; i < quarter; ++i) {
    const double rb = fit.residuals[order[i]];
    const double rt = fit.residuals[order[order.size() - 1 - i]];
    bottom += rb * rb;
    top += rt * rt;
  }
  return top / bottom;
}

double iqr_of_row(const std::vector<double>& row) { return row[3] - row[2]; }

}  // namespace

TEST_CASE("loader parses fields, header flag, and line ending variants") {
  const std::string body =
      "540.0,0.0,0.0,162.0,2.5,1040.0,676.0,28,79.99\r\n"
      "332.5, 142.5,0.0,228.0,0.0,932.0,594.0,270,40.27\n"
      "\n"
      "198.6,132.4,0.0,192.0,0.0,978.4,825.5,360,44.30\n";
  const auto plain = write_file("concrete_loader_plain.csv", body);
  const auto records = concrete::load_concrete(plain, false);
  REQUIRE(records.size() == 3);
  CHECK(records[0].x[0] == doctest::Approx(540.0));
  CHECK(records[0].x[7] == doctest::Approx(28.0));
  CHECK(records[0].y == doctest::Approx(79.99));
  CHECK(records[1].x[1] == doctest::Approx(142.5));
  CHECK(records[2].y == doctest::Approx(44.30));

  const auto with_header = write_file(
      "concrete_loader_header.csv",
      "cement,slag,ash,water,plast,coarse,fine,age,strength\n" + body);
  const auto records2 = concrete::load_concrete(with_header, true);
  REQUIRE(records2.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(records2[i].y == records[i].y);
    for (std::size_t j = 0; j < 8; ++j) CHECK(records2[i].x[j] == records[i].x[j]);
  }
}

TEST_CASE("loader rejects malformed rows, bad ages, and empty files") {
  const auto short_row = write_file(
      "concrete_loader_short.csv",
      "1,2,3,4,5,6,7,28,30.0\n1,2,3,4,5,6,7,28\n");
  try {
    concrete::load_concrete(short_row, false);
    FAIL("expected malformed-row error");
  } catch (const std::runtime_error& err) {
    const std::string msg = err.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("1,2,3,4,5,6,7,28") != std::string::npos);
  }

  const auto bad_field = write_file(
      "concrete_loader_junk.csv", "1,2,3,4,abc,6,7,28,30.0\n");
  CHECK_THROWS_AS(concrete::load_concrete(bad_field, false),
                  std::runtime_error);

  const auto bad_age = write_file(
      "concrete_loader_age.csv",
      "1,2,3,4,5,6,7,28,30.0\n1,2,3,4,5,6,7,0,30.0\n");
  try {
    concrete::load_concrete(bad_age, false);
    FAIL("expected nonpositive-age error");
  } catch (const std::runtime_error& err) {
    CHECK(std::string(err.what()).find("row 2") != std::string::npos);
  }

  const auto empty = write_file("concrete_loader_empty.csv", "\n\n");
  CHECK_THROWS_AS(concrete::load_concrete(empty, false), std::runtime_error);
  const auto header_only =
      write_file("concrete_loader_header_only.csv", "a,b,c,d,e,f,g,h,i\n");
  CHECK_THROWS_AS(concrete::load_concrete(header_only, true),
                  std::runtime_error);
}

TEST_CASE("least squares recovers an exact linear law and stays orthogonal") {
  static constexpr std::array<double, 10> beta = {
      8.0, 0.055, 0.035, 0.030, -0.09, 0.15, 0.006, 0.008, -0.006, 1.5};
  auto records = make_synthetic(40, 9001);
  for (auto& rec : records) {
    double mu = beta[0] + beta[9] * std::sqrt(rec.x[7]);
    for (std::size_t j = 0; j < 8; ++j) mu += beta[j + 1] * rec.x[j];
    rec.y = mu;
  }
  const auto fit = concrete::fit_ols(records);
  REQUIRE(fit.beta.size() == 10);
  for (std::size_t j = 0; j < 10; ++j) {
    CHECK(fit.beta[j] == doctest::Approx(beta[j]).epsilon(1e-8));
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(std::fabs(fit.residuals[i]) < 1e-7);
    CHECK(fit.fitted[i] + fit.residuals[i] ==
          doctest::Approx(records[i].y).epsilon(1e-12));
  }

  const auto noisy = make_synthetic(300, 9002);
  const auto noisy_fit = concrete::fit_ols(noisy);
  double res_norm = 0.0;
  for (const double r : noisy_fit.residuals) res_norm += r * r;
  res_norm = std::sqrt(res_norm);
  for (std::size_t j = 0; j < 10; ++j) {
    double dot = 0.0;
    double col_norm = 0.0;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      const double xj =
          j == 0 ? 1.0
                 : (j == 9 ? std::sqrt(noisy[i].x[7]) : noisy[i].x[j - 1]);
      dot += xj * noisy_fit.residuals[i];
      col_norm += xj * xj;
    }
    CHECK(std::fabs(dot) / (std::sqrt(col_norm) * res_norm) < 1e-6);
  }
}

TEST_CASE("least squares is invariant to row order") {
  const auto records = make_synthetic(120, 9003);
  auto shuffled = records;
  mathcore::rng64 rng(77);
  for (std::size_t i = shuffled.size(); i-- > 1;) {
    const auto j = static_cast<std::size_t>(rng.next_double() *
                                            static_cast<double>(i + 1));
    std::swap(shuffled[i], shuffled[j <= i ? j : i]);
  }
  const auto a = concrete::fit_ols(records);
  const auto b = concrete::fit_ols(shuffled);
  for (std::size_t j = 0; j < 10; ++j) {
    CHECK(a.beta[j] == doctest::Approx(b.beta[j]).epsilon(1e-8));
  }
}

TEST_CASE("least squares names the collinear column and checks inputs") {
  auto records = make_synthetic(60, 9004);
  CHECK_THROWS_AS(
      concrete::fit_ols({records.begin(), records.begin() + 10}),
      std::invalid_argument);

  auto tied = records;
  for (auto& rec : tied) rec.x[2] = rec.x[0];
  try {
    concrete::fit_ols(tied);
    FAIL("expected collinear-column error");
  } catch (const std::runtime_error& err) {
    CHECK(std::string(err.what()).find("x3") != std::string::npos);
  }

  auto flat_age = records;
  for (auto& rec : flat_age) rec.x[7] = 28.0;
  try {
    concrete::fit_ols(flat_age);
    FAIL("expected collinear-column error");
  } catch (const std::runtime_error& err) {
    CHECK(std::string(err.what()).find("x8") != std::string::npos);
  }

  auto bad_age = records;
  bad_age[3].x[7] = 0.0;
  CHECK_THROWS_AS(concrete::fit_ols(bad_age), std::domain_error);
}

TEST_CASE("heteroscedastic noise fans out across the fitted range") {
  const auto fit = concrete::fit_ols(make_synthetic(800, 9005));
  CHECK(fan_ratio(fit) > 1.5);
}

TEST_CASE("homoscedastic fit matches the closed form") {
  const auto unit = concrete::fit_homoscedastic({1.0, -1.0});
  CHECK(unit.a0 == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(unit.a1 == 0.0);
  CHECK(unit.converged);
  CHECK(unit.loglik == doctest::Approx(-kLog2Pi - 1.0).epsilon(1e-12));

  const auto wide = concrete::fit_homoscedastic({2.0, -2.0, 2.0, -2.0});
  CHECK(wide.a0 == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(wide.loglik ==
        doctest::Approx(-2.0 * kLog2Pi - 2.0 * std::log(4.0) - 2.0)
            .epsilon(1e-12));

  const auto flat = concrete::fit_homoscedastic({0.0, 0.0, 0.0});
  CHECK_FALSE(flat.converged);
  CHECK(flat.loglik == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(concrete::fit_homoscedastic({}), std::invalid_argument);
}

TEST_CASE("two-point heteroscedastic fit hits the interpolating solution") {
  const auto fit = concrete::fit_heteroscedastic({1.0, 2.0}, {0.0, 1.0});
  CHECK(fit.converged);
  CHECK(fit.a0 == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(fit.a1 == doctest::Approx(std::log(4.0)).epsilon(1e-6));
  CHECK(fit.loglik ==
        doctest::Approx(-kLog2Pi - 1.0 - std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("heteroscedastic fit recovers simulated variance laws") {
  constexpr std::size_t k = 1000;
  std::vector<double> z(k);
  for (std::size_t i = 0; i < k; ++i) {
    z[i] = 80.0 * static_cast<double>(i) / static_cast<double>(k - 1);
  }

  mathcore::rng64 flat_rng(20240814);
  std::vector<double> flat_resid(k);
  for (auto& r : flat_resid) {
    r = mathcore::sample_normal(flat_rng, 0.0, std::exp(0.25));
  }
  const auto flat = concrete::fit_heteroscedastic(flat_resid, z);
  CHECK(flat.converged);
  CHECK(std::fabs(flat.a1) <= 0.05);
  CHECK(flat.a0 == doctest::Approx(0.5).epsilon(0.6));

  mathcore::rng64 slope_rng(20240815);
  std::vector<double> slope_resid(k);
  for (std::size_t i = 0; i < k; ++i) {
    slope_resid[i] =
        mathcore::sample_normal(slope_rng, 0.0, std::exp(0.05 * z[i]));
  }
  const auto sloped = concrete::fit_heteroscedastic(slope_resid, z);
  CHECK(sloped.converged);
  CHECK(std::fabs(sloped.a1 - 0.1) <= 0.01);
  CHECK(std::fabs(sloped.a0) <= 0.3);

  const auto homo = concrete::fit_homoscedastic(slope_resid);
  CHECK(sloped.loglik > homo.loglik + 1.0);
}

TEST_CASE("heteroscedastic fit nests the homoscedastic one") {
  mathcore::rng64 rng(555);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t k = 20 + static_cast<std::size_t>(100 * rng.next_double());
    std::vector<double> z(k);
    std::vector<double> resid(k);
    const double scale = 0.2 + 2.0 * rng.next_double();
    for (std::size_t i = 0; i < k; ++i) {
      z[i] = 10.0 * rng.next_double();
      resid[i] = mathcore::sample_normal(rng, 0.0, scale);
    }
    const auto het = concrete::fit_heteroscedastic(resid, z);
    const auto homo = concrete::fit_homoscedastic(resid);
    CHECK(het.converged);
    CHECK(het.loglik >= homo.loglik - 1e-9);
    if (std::fabs(het.a1) > 1e-6) CHECK(het.loglik > homo.loglik);

    // The reported optimum must zero the uncentered score as well.
    double g0 = 0.0;
    double g1 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double w =
          resid[i] * resid[i] * std::exp(-(het.a0 + het.a1 * z[i]));
      g0 += 0.5 * (w - 1.0);
      g1 += 0.5 * z[i] * (w - 1.0);
    }
    CHECK(std::fabs(g0) / static_cast<double>(k) < 1e-6);
    CHECK(std::fabs(g1) / static_cast<double>(k) < 1e-6);
  }
}

TEST_CASE("heteroscedastic fit validates its inputs") {
  CHECK_THROWS_AS(concrete::fit_heteroscedastic({1.0}, {0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(concrete::fit_heteroscedastic({1.0, 2.0}, {3.0, 3.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(concrete::fit_heteroscedastic({1.0, 2.0}, {3.0}),
                  std::invalid_argument);
  const auto degenerate =
      concrete::fit_heteroscedastic({0.0, 0.0}, {0.0, 1.0});
  CHECK_FALSE(degenerate.converged);
  CHECK(degenerate.loglik == -std::numeric_limits<double>::infinity());
}

TEST_CASE("strength-curve pipeline favors the heteroscedastic model") {
  const auto records = make_synthetic(400, 9100);
  const std::vector<std::size_t> grid{50, 100, 200};

  mathcore::rng64 rng(31337);
  const auto table = concrete::concrete_cvbf(records, grid, 60, rng);
  REQUIRE(table.rows.size() == 3);
  REQUIRE(table.columns ==
          std::vector<std::string>{"m", "median", "q1", "q3", "n_splits_used",
                                   "skipped"});
  for (const auto& row : table.rows) {
    CHECK(row[1] > 0.0);
    CHECK(row[2] <= row[1]);
    CHECK(row[1] <= row[3]);
    CHECK(row[4] + row[5] == doctest::Approx(60.0));
    CHECK(row[4] == doctest::Approx(60.0));
  }
  CHECK(iqr_of_row(table.rows[2]) < iqr_of_row(table.rows[0]));

  mathcore::rng64 rng_b(31337);
  const auto again = concrete::concrete_cvbf(records, grid, 60, rng_b);
  CHECK(table_io::to_csv(again, {}) == table_io::to_csv(table, {}));

  mathcore::rng64 rng_c(31337);
  const auto threaded = concrete::concrete_cvbf(
      records, grid, 60, rng_c, concrete::BetaMode::per_split, 3);
  CHECK(table_io::to_csv(threaded, {}) == table_io::to_csv(table, {}));

  mathcore::rng64 rng_d(31337);
  const auto global = concrete::concrete_cvbf(records, grid, 60, rng_d,
                                              concrete::BetaMode::global);
  for (const auto& row : global.rows) CHECK(row[1] > 0.0);
  CHECK(table_io::to_csv(global, {}) != table_io::to_csv(table, {}));
}

TEST_CASE("strength-curve pipeline validates the grid and reports skips") {
  const auto records = make_synthetic(100, 9200);
  mathcore::rng64 rng(1);
  CHECK_THROWS_AS(concrete::concrete_cvbf(records, {}, 10, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(concrete::concrete_cvbf(records, {11}, 10, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(concrete::concrete_cvbf(records, {89}, 10, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(concrete::concrete_cvbf(records, {50}, 0, rng),
                  std::invalid_argument);

  auto degenerate = records;
  for (auto& rec : degenerate) rec.x[1] = 0.0;
  const auto table = concrete::concrete_cvbf(degenerate, {40}, 8, rng);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0][4] == 0.0);
  CHECK(table.rows[0][5] == 8.0);
  CHECK(std::isnan(table.rows[0][1]));
  CHECK_THROWS_AS(concrete::concrete_cvbf(degenerate, {40}, 8, rng,
                                          concrete::BetaMode::global),
                  std::runtime_error);
}

TEST_CASE("bundled synthetic table drives the full case study") {
  const std::string path =
      std::string(BRIDGEFACTOR_TEST_DATA_DIR) + "/concrete_synthetic.csv";
  const auto records = concrete::load_concrete(path, true);
  REQUIRE(records.size() == 1030);
  double min_y = records[0].y;
  for (const auto& rec : records) {
    CHECK(rec.x[7] > 0.0);
    min_y = std::min(min_y, rec.y);
  }
  CHECK(min_y > 0.0);

  const auto fit = concrete::fit_ols(records);
  CHECK(fan_ratio(fit) > 1.5);

  const std::size_t m_star = bridge::bridge_m(records.size(), 2);
  CHECK(m_star == 165);
  CHECK(m_star >= 100);
  CHECK(m_star <= 200);

  mathcore::rng64 rng(424242);
  const auto table =
      concrete::concrete_cvbf(records, {50, 165, 400}, 40, rng);
  for (const auto& row : table.rows) {
    CHECK(row[1] > 0.0);
    CHECK(row[4] == doctest::Approx(40.0));
  }
}
