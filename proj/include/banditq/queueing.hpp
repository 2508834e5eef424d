#pragma once

#include <span>

#include "banditq/core.hpp"

namespace banditq {

/// Per-arm deficit queues Q_i(t). Unprotected arms keep a structural zero.
struct QueueState {
  Vec q;
  std::size_t t = 0;

  static QueueState zeros(std::size_t n) { return {Vec(n, 0.0), 0}; }
  bool operator==(const QueueState&) const = default;
};

/// q_i <- max(0, q_i + lambda_i - served_i). Inputs must lie in [0, 1].
QueueState lindley_step(const QueueState& state, std::span<const double> lambda,
                        std::span<const double> served);

/// Closed form of the recursion after t = served.size() rounds from Q(0) = 0:
/// max(0, max_{1<=tau<=t} (lambda * tau - sum of the last tau served values)).
double lindley_expanded(double lambda, std::span<const double> served);

/// Sum of squared queues over the protected arms.
double potential(const QueueState& state, std::span<const std::size_t> protected_arms);

struct DriftCheck {
  double lhs = 0.0;  // Phi(t) - Phi(t-1)
  double rhs = 0.0;  // 2 + 2 sum_i Q_i(t-1) (lambda_i - r_i x_i)
  bool ok = false;
};

/// Evaluates both sides of the one-step potential drift bound. The potential
/// is summed over all arms, which equals the protected sum because
/// unprotected queues are identically zero.
/// Throws PreconditionViolated when sum(lambda) > 1 or sum(x) > 1.
DriftCheck drift_check(const QueueState& prev, std::span<const double> lambda,
                       std::span<const double> r, std::span<const double> x);

}  // namespace banditq
