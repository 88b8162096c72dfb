#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace bridgefactor::mathcore {

inline constexpr double euler_gamma = 0.5772156649015328606;

// Exact log Gamma(x) for x > 0 (Lanczos, relative error < 1e-12).
// Throws std::domain_error on x <= 0.
double log_gamma(double x);

// psi(x) for x > 0 via the ascending recurrence plus the asymptotic series.
// Throws std::domain_error on x <= 0.
double digamma(double x);

// log(sum exp(v_i)) without overflow; v must be nonempty.
double log_sum_exp(const std::vector<double>& v);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);

// Type-7 (linear interpolation) quantile of an unsorted copy; p in [0,1].
double quantile(std::vector<double> v, double p);

// Composite Simpson rule over [a,b]; panels is rounded up to an even count.
double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels);

// xoshiro256++ seeded through SplitMix64. Identical seeds give identical
// sequences on every platform; a generator is single-owner (never shared
// across threads without external ownership transfer).
class rng64 {
 public:
  explicit rng64(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform on [0,1) with 53 random bits.
  double next_double();

 private:
  std::uint64_t s_[4];
};

// Deterministic sub-stream seed for (seed, index); independent of the order
// in which sub-streams are created, so parallel replicates reproduce.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

double sample_normal(rng64& rng, double mean, double sd);
double sample_exponential(rng64& rng, double rate);
double sample_gamma(rng64& rng, double shape, double scale);
// Chi-square with df > 0 and noncentrality >= 0; noncentral draws use the
// (Z + sqrt(lambda))^2 construction for df >= 1, a Poisson mixture below.
double sample_chisq(rng64& rng, double df, double noncentrality = 0.0);

}  // namespace bridgefactor::mathcore
