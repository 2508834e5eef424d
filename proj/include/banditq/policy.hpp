#pragma once

#include <functional>
#include <span>

#include "banditq/core.hpp"
#include "banditq/env.hpp"

namespace banditq {

/// r'_i = (Q_i(t-1) + V_t) * r_i(t). Throws NegativeInput.
Vec surrogate_rewards(std::span<const double> q_before, double v_t, std::span<const double> r);

/// Adaptive online gradient ascent on the simplex.
struct BanditQState {
  Vec x;
  double grad_sq_sum = 0.0;  // sum of ||r'||^2 over completed rounds
  std::size_t t = 0;

  static BanditQState uniform(std::size_t n);
};

/// x <- project(x + r' / sqrt(2 G)) with G the accumulator before this round,
/// then G += ||r'||^2. While G is still zero the step uses ||r'||^2 in place
/// of G, and a zero r' leaves x where it is.
BanditQState banditq_step(const BanditQState& state, std::span<const double> r_prime);

/// Exponential weights baseline.
struct HedgeState {
  Vec log_weights;
  double eta = 1.0;
  std::size_t t = 0;

  static HedgeState uniform(std::size_t n, double eta);
  Vec distribution() const;
};

HedgeState hedge_step(const HedgeState& state, std::span<const double> r);

/// sqrt(8 ln N / T); falls back to 1 for a single arm.
double default_hedge_eta(std::size_t n_arms, std::size_t horizon);

using TraceSink = std::function<void(const TraceRecord&)>;

/// Runs one episode. Every round is streamed to `sink` (if set); the summary
/// is built from in-process accumulators so it is exact without keeping the
/// trace. Throws SourceExhausted when the source has fewer than T rounds.
RunSummary run_episode(const InstanceConfig& cfg, const RewardSource& source,
                       std::uint64_t stream = 0, const TraceSink& sink = {});

struct Episode {
  std::vector<TraceRecord> trace;
  RunSummary summary;
};

Episode run_episode_traced(const InstanceConfig& cfg, const RewardSource& source,
                           std::uint64_t stream = 0);

}  // namespace banditq
