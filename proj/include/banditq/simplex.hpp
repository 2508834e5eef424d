#pragma once

#include <span>

#include "banditq/core.hpp"

namespace banditq {

inline constexpr double kSimplexTol = 1e-9;

/// Euclidean projection onto the probability simplex.
///
/// Sort-then-threshold: with u = v sorted descending, k is the largest index
/// such that u_k - (sum_{j<=k} u_j - 1) / k > 0, theta is that average excess
/// and the result is max(0, v_i - theta). Sorting ties break by index so the
/// output is a deterministic function of v. Throws NonFiniteInput.
Vec project_to_simplex(std::span<const double> v);

/// Threshold theta used by project_to_simplex for the same input.
double simplex_threshold(std::span<const double> v);

double distance_to_simplex(std::span<const double> v);

bool on_simplex(std::span<const double> x, double tol = kSimplexTol);

Vec uniform_point(std::size_t n);

}  // namespace banditq
