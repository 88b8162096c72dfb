#include "bridgefactor/mathcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bridgefactor::mathcore {

namespace {

// Lanczos g = 7, 9 terms.
constexpr double lanczos_g = 7.0;
constexpr double lanczos_coef[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

double log_gamma_ge_half(double x) {
  // Valid for x >= 0.5.
  const double z = x - 1.0;
  double acc = lanczos_coef[0];
  for (int k = 1; k < 9; ++k) acc += lanczos_coef[k] / (z + k);
  const double t = z + lanczos_g + 0.5;
  return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t +
         std::log(acc);
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: x must be positive");
  if (x < 0.5) return log_gamma_ge_half(x + 1.0) - std::log(x);
  return log_gamma_ge_half(x);
}

double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: x must be positive");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Asymptotic series through the x^-12 term.
  double series = std::log(x) - 0.5 * inv;
  double p = inv2;
  series -= p / 12.0;
  p *= inv2;
  series += p / 120.0;
  p *= inv2;
  series -= p / 252.0;
  p *= inv2;
  series += p / 240.0;
  p *= inv2;
  series -= p / 132.0;
  p *= inv2;
  series += p * 691.0 / 32760.0;
  return acc + series;
}

double log_sum_exp(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("log_sum_exp: empty input");
  const double hi = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean: empty input");
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("variance: need >= 2 values");
  const double mu = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  return acc / static_cast<double>(v.size() - 1);
}

double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("quantile: empty input");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("quantile: p outside [0,1]");
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  const double w = h - static_cast<double>(lo);
  return v[lo] + w * (v[lo + 1] - v[lo]);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels) {
  if (panels < 2) panels = 2;
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i)
    acc += f(a + h * i) * (i % 2 == 0 ? 2.0 : 4.0);
  return acc * h / 3.0;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

rng64::rng64(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t rng64::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double rng64::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t sm = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  std::uint64_t lo = splitmix64(sm);
  return lo ^ splitmix64(sm);
}

double sample_normal(rng64& rng, double mean, double sd) {
  if (!(sd > 0.0)) throw std::domain_error("sample_normal: sd must be > 0");
  // Polar method; the spare deviate is not cached so generator state is
  // exactly the four-word xoshiro state.
  double u, v, s;
  do {
    u = 2.0 * rng.next_double() - 1.0;
    v = 2.0 * rng.next_double() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return mean + sd * u * std::sqrt(-2.0 * std::log(s) / s);
}

double sample_exponential(rng64& rng, double rate) {
  if (!(rate > 0.0))
    throw std::domain_error("sample_exponential: rate must be > 0");
  return -std::log1p(-rng.next_double()) / rate;
}

double sample_gamma(rng64& rng, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::domain_error("sample_gamma: shape and scale must be > 0");
  if (shape < 1.0) {
    const double boost =
        std::pow(rng.next_double(), 1.0 / shape);  // u=0 gives a zero draw
    return sample_gamma(rng, shape + 1.0, scale) * boost;
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_normal(rng, 0.0, 1.0);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_double();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (u > 0.0 &&
        std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return scale * d * v;
  }
}

double sample_chisq(rng64& rng, double df, double noncentrality) {
  if (!(df > 0.0)) throw std::domain_error("sample_chisq: df must be > 0");
  if (noncentrality < 0.0)
    throw std::domain_error("sample_chisq: noncentrality must be >= 0");
  if (noncentrality == 0.0) return sample_gamma(rng, df / 2.0, 2.0);
  if (df >= 1.0) {
    const double z = sample_normal(rng, 0.0, 1.0) + std::sqrt(noncentrality);
    double rest = 0.0;
    if (df > 1.0) rest = sample_gamma(rng, (df - 1.0) / 2.0, 2.0);
    return z * z + rest;
  }
  // Fractional df: chi-square(df + 2J) with J ~ Poisson(noncentrality / 2),
  // J counted from exponential interarrivals.
  const double lam = noncentrality / 2.0;
  double t = sample_exponential(rng, 1.0);
  std::uint64_t j = 0;
  while (t < lam) {
    ++j;
    t += sample_exponential(rng, 1.0);
  }
  return sample_gamma(rng, df / 2.0 + static_cast<double>(j), 2.0);
}

}  // namespace bridgefactor::mathcore
