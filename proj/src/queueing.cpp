#include "banditq/queueing.hpp"

#include <algorithm>
#include <cmath>

namespace banditq {

namespace {

constexpr double kRangeTol = 1e-12;

bool in_unit(double v) { return std::isfinite(v) && v >= -kRangeTol && v <= 1.0 + kRangeTol; }

}  // namespace

QueueState lindley_step(const QueueState& state, std::span<const double> lambda,
                        std::span<const double> served) {
  if (lambda.size() != state.q.size() || served.size() != state.q.size()) {
    throw Error(ErrorCode::LengthMismatch, "lindley_step: vector sizes differ");
  }
  QueueState next{Vec(state.q.size()), state.t + 1};
  for (std::size_t i = 0; i < state.q.size(); ++i) {
    if (!in_unit(lambda[i]) || !in_unit(served[i])) {
      throw Error(ErrorCode::OutOfRangeInput, "lindley_step: arrival and service must lie in [0, 1]");
    }
    next.q[i] = std::max(0.0, state.q[i] + lambda[i] - served[i]);
  }
  return next;
}

double lindley_expanded(double lambda, std::span<const double> served) {
  if (served.empty()) throw Error(ErrorCode::EmptyHistory, "lindley_expanded needs at least one round");
  double best = 0.0;
  double suffix = 0.0;
  const std::size_t t = served.size();
  for (std::size_t tau = 1; tau <= t; ++tau) {
    suffix += served[t - tau];
    best = std::max(best, lambda * static_cast<double>(tau) - suffix);
  }
  return best;
}

double potential(const QueueState& state, std::span<const std::size_t> protected_arms) {
  double phi = 0.0;
  for (auto arm : protected_arms) {
    if (arm < state.q.size()) phi += state.q[arm] * state.q[arm];
  }
  return phi;
}

DriftCheck drift_check(const QueueState& prev, std::span<const double> lambda,
                       std::span<const double> r, std::span<const double> x) {
  const std::size_t n = prev.q.size();
  if (lambda.size() != n || r.size() != n || x.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "drift_check: vector sizes differ");
  }
  double lambda_sum = 0.0;
  double x_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lambda_sum += lambda[i];
    x_sum += x[i];
  }
  if (lambda_sum > 1.0 + 1e-12 || x_sum > 1.0 + 1e-9) {
    throw Error(ErrorCode::PreconditionViolated, "drift_check requires sum(lambda) <= 1 and sum(x) <= 1");
  }

  Vec served(n);
  for (std::size_t i = 0; i < n; ++i) served[i] = r[i] * x[i];
  const QueueState next = lindley_step(prev, lambda, served);

  DriftCheck out;
  double before = 0.0;
  double after = 0.0;
  double cross = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    before += prev.q[i] * prev.q[i];
    after += next.q[i] * next.q[i];
    cross += prev.q[i] * (lambda[i] - served[i]);
  }
  out.lhs = after - before;
  out.rhs = 2.0 + 2.0 * cross;
  out.ok = out.lhs <= out.rhs + 1e-9;
  return out;
}

}  // namespace banditq
