#include "banditq/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace banditq {

namespace {

void require_finite(std::span<const double> v) {
  if (v.empty()) throw Error(ErrorCode::OutOfRangeInput, "projection needs at least one coordinate");
  for (double e : v) {
    if (!std::isfinite(e)) throw Error(ErrorCode::NonFiniteInput, "projection input has a non-finite entry");
  }
}

}  // namespace

double simplex_threshold(std::span<const double> v) {
  require_finite(v);
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&v](std::size_t a, std::size_t b) { return v[a] > v[b]; });

  double prefix = 0.0;
  double theta = v[order[0]] - 1.0;  // k = 1 always qualifies
  for (std::size_t k = 1; k <= n; ++k) {
    prefix += v[order[k - 1]];
    const double candidate = (prefix - 1.0) / static_cast<double>(k);
    if (v[order[k - 1]] - candidate > 0.0) theta = candidate;
  }
  return theta;
}

Vec project_to_simplex(std::span<const double> v) {
  if (v.size() == 1) {
    require_finite(v);
    return {1.0};
  }
  const double theta = simplex_threshold(v);
  Vec x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) x[i] = std::max(0.0, v[i] - theta);
  return x;
}

double distance_to_simplex(std::span<const double> v) {
  const Vec p = project_to_simplex(v);
  double sq = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sq += (v[i] - p[i]) * (v[i] - p[i]);
  return std::sqrt(sq);
}

bool on_simplex(std::span<const double> x, double tol) {
  if (x.empty()) return false;
  double sum = 0.0;
  for (double e : x) {
    if (!std::isfinite(e) || e < -tol) return false;
    sum += e;
  }
  return std::abs(sum - 1.0) <= tol;
}

Vec uniform_point(std::size_t n) { return Vec(n, 1.0 / static_cast<double>(n)); }

}  // namespace banditq
