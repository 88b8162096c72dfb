// Generates a synthetic concrete-strength table: 1030 rows of mixture
// components, age, and a strength whose noise variance grows with the
// regression mean (log-variance 0.8 + 0.042 * mean).
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "bridgefactor/mathcore.hpp"

namespace {

constexpr std::size_t kRows = 1030;
constexpr std::array<double, 9> kAges = {1.0,  3.0,  7.0,   14.0, 28.0,
                                         56.0, 90.0, 180.0, 365.0};
constexpr std::array<double, 10> kBeta = {8.0,  0.055, 0.035, 0.030, -0.09,
                                          0.15, 0.006, 0.008, -0.006, 1.5};
constexpr double kVarIntercept = 0.8;
constexpr double kVarSlope = 0.042;

}  // namespace

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : "concrete_synthetic.csv";
  const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 20240817ULL;
  std::FILE* out = std::fopen(path.c_str(), "wb");
  if (out == nullptr) {
    std::fprintf(stderr, "cannot open %s for writing\n", path.c_str());
    return 1;
  }
  std::fputs(
      "cement,slag,fly_ash,water,superplasticizer,coarse_aggregate,"
      "fine_aggregate,age,strength\n",
      out);

  bridgefactor::mathcore::rng64 rng(seed);
  double min_y = 1e300;
  for (std::size_t row = 0; row < kRows; ++row) {
    std::array<double, 8> x{};
    x[0] = 100.0 + 450.0 * rng.next_double();
    x[1] = rng.next_double() < 0.4 ? 0.0 : 360.0 * rng.next_double();
    x[2] = rng.next_double() < 0.5 ? 0.0 : 200.0 * rng.next_double();
    x[3] = 120.0 + 130.0 * rng.next_double();
    x[4] = rng.next_double() < 0.3 ? 0.0 : 32.0 * rng.next_double();
    x[5] = 800.0 + 350.0 * rng.next_double();
    x[6] = 590.0 + 405.0 * rng.next_double();
    const auto age_index = static_cast<std::size_t>(9.0 * rng.next_double());
    x[7] = kAges[age_index < 9 ? age_index : 8];

    double mu = kBeta[0] + kBeta[9] * std::sqrt(x[7]);
    for (std::size_t j = 0; j < 8; ++j) mu += kBeta[j + 1] * x[j];
    const double sd = std::exp(0.5 * (kVarIntercept + kVarSlope * mu));
    const double y = mu + bridgefactor::mathcore::sample_normal(rng, 0.0, sd);
    if (y < min_y) min_y = y;

    std::fprintf(out, "%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%d,%.4f\n", x[0],
                 x[1], x[2], x[3], x[4], x[5], x[6], static_cast<int>(x[7]),
                 y);
  }
  std::fclose(out);
  std::printf("wrote %zu rows to %s (min strength %.4f)\n", kRows,
              path.c_str(), min_y);
  if (!(min_y > 0.0)) {
    std::fprintf(stderr, "nonpositive strength generated; pick another seed\n");
    return 2;
  }
  return 0;
}
