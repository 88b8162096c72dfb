#include "bridgefactor/bridge_rule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bridgefactor::bridge {

double bridge_value(std::size_t n, std::size_t k) {
  if (n < 3) throw std::invalid_argument("bridge_value: need N >= 3");
  if (k < 1) throw std::invalid_argument("bridge_value: need K >= 1");
  const double ratio = static_cast<double>(n) / static_cast<double>(k);
  if (!(std::log(ratio) > 1.0))
    throw std::invalid_argument(
        "bridge_value: rule undefined, N/K must exceed e");
  return static_cast<double>(n) / std::log(ratio);
}

std::size_t bridge_m(std::size_t n, std::size_t k, std::size_t k_min) {
  const double value = bridge_value(n, k);
  auto m = static_cast<std::size_t>(std::floor(value + 0.5));
  m = std::max(m, k_min);
  m = std::min(m, n - 1);
  return m;
}

std::pair<double, double> bridge_linear_fit(
    const std::vector<std::size_t>& n_grid) {
  if (n_grid.size() < 2)
    throw std::invalid_argument("bridge_linear_fit: need >= 2 grid points");
  double sx = 0.0, sy = 0.0;
  for (std::size_t n : n_grid) {
    if (static_cast<double>(n) <= std::exp(1.0))
      throw std::invalid_argument("bridge_linear_fit: grid N must exceed e");
    sx += static_cast<double>(n);
    sy += static_cast<double>(n) / std::log(static_cast<double>(n));
  }
  const double count = static_cast<double>(n_grid.size());
  const double mx = sx / count, my = sy / count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t n : n_grid) {
    const double x = static_cast<double>(n) - mx;
    sxx += x * x;
    sxy += x * (static_cast<double>(n) / std::log(static_cast<double>(n)) - my);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("bridge_linear_fit: degenerate grid");
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

}  // namespace bridgefactor::bridge
