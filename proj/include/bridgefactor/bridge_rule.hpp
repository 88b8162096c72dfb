#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace bridgefactor::bridge {

// N / ln(N/K) before rounding. Requires N >= 3, K >= 1 and N/K > e
// (otherwise the rule is undefined and an error is raised).
double bridge_value(std::size_t n, std::size_t k);

// round(N / ln(N/K)) to the nearest integer (ties up), clamped into
// [k_min, N-1]. k_min is the case's minimum training size.
std::size_t bridge_m(std::size_t n, std::size_t k, std::size_t k_min = 1);

// OLS fit of N/ln N against N over the grid; returns (intercept, slope).
// Every N must satisfy N > e; the grid must contain >= 2 distinct values.
std::pair<double, double> bridge_linear_fit(
    const std::vector<std::size_t>& n_grid);

}  // namespace bridgefactor::bridge
