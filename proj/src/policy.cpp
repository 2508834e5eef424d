#include "banditq/policy.hpp"

#include <algorithm>
#include <cmath>

#include "banditq/oracle.hpp"
#include "banditq/queueing.hpp"
#include "banditq/simplex.hpp"

namespace banditq {

Vec surrogate_rewards(std::span<const double> q_before, double v_t, std::span<const double> r) {
  if (q_before.size() != r.size()) throw Error(ErrorCode::LengthMismatch, "queue and reward widths differ");
  if (!(v_t >= 0.0)) throw Error(ErrorCode::NegativeInput, "V_t must be >= 0");
  Vec out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(q_before[i] >= 0.0) || !(r[i] >= 0.0)) {
      throw Error(ErrorCode::NegativeInput, "queues and rewards must be >= 0");
    }
    out[i] = (q_before[i] + v_t) * r[i];
  }
  return out;
}

BanditQState BanditQState::uniform(std::size_t n) { return {uniform_point(n), 0.0, 0}; }

BanditQState banditq_step(const BanditQState& state, std::span<const double> r_prime) {
  if (r_prime.size() != state.x.size()) throw Error(ErrorCode::LengthMismatch, "gradient width differs from x");
  double sq = 0.0;
  for (double g : r_prime) sq += g * g;

  BanditQState next = state;
  next.t = state.t + 1;
  const double scale = state.grad_sq_sum > 0.0 ? state.grad_sq_sum : sq;
  if (scale > 0.0) {
    const double step = 1.0 / std::sqrt(2.0 * scale);
    Vec moved(state.x.size());
    for (std::size_t i = 0; i < moved.size(); ++i) moved[i] = state.x[i] + step * r_prime[i];
    next.x = project_to_simplex(moved);
  }
  next.grad_sq_sum = state.grad_sq_sum + sq;
  return next;
}

HedgeState HedgeState::uniform(std::size_t n, double eta) { return {Vec(n, 0.0), eta, 0}; }

Vec HedgeState::distribution() const {
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  Vec x(log_weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::exp(log_weights[i] - top);
    total += x[i];
  }
  for (double& e : x) e /= total;
  return x;
}

HedgeState hedge_step(const HedgeState& state, std::span<const double> r) {
  if (r.size() != state.log_weights.size()) throw Error(ErrorCode::LengthMismatch, "reward width differs from weights");
  HedgeState next = state;
  next.t = state.t + 1;
  for (std::size_t i = 0; i < r.size(); ++i) next.log_weights[i] += state.eta * r[i];
  return next;
}

double default_hedge_eta(std::size_t n_arms, std::size_t horizon) {
  if (n_arms < 2) return 1.0;
  return std::sqrt(8.0 * std::log(static_cast<double>(n_arms)) / static_cast<double>(horizon));
}

RunSummary run_episode(const InstanceConfig& cfg, const RewardSource& source, std::uint64_t stream,
                       const TraceSink& sink) {
  require_valid(cfg);
  const std::size_t n = cfg.n_arms;
  const std::size_t horizon = cfg.horizon;
  if (source.n_arms() != n) {
    throw Error(ErrorCode::InvalidSource, "source has " + std::to_string(source.n_arms()) +
                                              " arms, config has " + std::to_string(n));
  }
  if (source.available_rounds() < horizon) {
    throw Error(ErrorCode::SourceExhausted, "source provides " + std::to_string(source.available_rounds()) +
                                                " rounds, horizon is " + std::to_string(horizon));
  }

  Rng rng(cfg.seed, stream);
  const Vec lambda = cfg.rate_vector();
  const bool banditq = cfg.policy == PolicyKind::BanditQ;
  BanditQState learner = BanditQState::uniform(n);
  HedgeState hedge = HedgeState::uniform(n, cfg.hedge_eta.value_or(default_hedge_eta(n, horizon)));
  QueueState queues = QueueState::zeros(n);

  RunSummary sum;
  sum.policy = cfg.policy;
  sum.horizon = horizon;
  Vec cumulative(n, 0.0);
  Vec served_total(n, 0.0);
  Vec max_q(n, 0.0);
  WindowedFloor floor_tracker(n, cfg.window);

  TraceRecord rec;
  for (std::size_t t = 1; t <= horizon; ++t) {
    rec.t = t;
    rec.r = source.next_rewards(t, rng);
    rec.x = banditq ? learner.x : hedge.distribution();
    rec.served.resize(n);
    for (std::size_t i = 0; i < n; ++i) rec.served[i] = rec.r[i] * rec.x[i];

    if (!drift_check(queues, lambda, rec.r, rec.x).ok) ++sum.drift_violations;
    QueueState next_q = lindley_step(queues, lambda, rec.served);

    if (banditq) {
      rec.r_prime = surrogate_rewards(queues.q, cfg.v_schedule.at(t, horizon), rec.r);
      learner = banditq_step(learner, rec.r_prime);
    } else {
      rec.r_prime.assign(n, 0.0);
      hedge = hedge_step(hedge, rec.r);
    }

    rec.q_before = std::move(queues.q);
    rec.q_after = next_q.q;
    rec.potential = potential(next_q, cfg.protected_arms);
    queues = std::move(next_q);

    for (std::size_t i = 0; i < n; ++i) {
      cumulative[i] += rec.r[i];
      served_total[i] += rec.served[i];
      sum.total_reward += rec.served[i];
      max_q[i] = std::max(max_q[i], rec.q_after[i]);
    }
    floor_tracker.push(rec.r);
    if (sink) sink(rec);
  }

  const double T = static_cast<double>(horizon);
  for (auto arm : cfg.protected_arms) {
    const double rate = served_total[arm] / T;
    sum.max_queue[arm] = max_q[arm];
    sum.final_queue[arm] = queues.q[arm];
    sum.achieved_rate[arm] = rate;
    sum.rate_deficit[arm] = std::max(0.0, lambda[arm] - rate);
  }

  sum.empirical_floor = floor_tracker.floor();
  const auto feas = feasibility_check(cfg.target_rates, sum.empirical_floor);
  sum.feasible = feas.feasible;
  sum.feasibility_sum_ratio = feas.sum_ratio;
  sum.feasibility_slack = feas.slack();
  if (feas.feasible) {
    auto bench = benchmark_lp(cumulative, benchmark_lower_bounds(cfg.target_rates, sum.empirical_floor));
    sum.benchmark_reward = bench.value;
    sum.regret = bench.value - sum.total_reward;
    sum.x_star = bench.x_star;
  }
  return sum;
}

Episode run_episode_traced(const InstanceConfig& cfg, const RewardSource& source, std::uint64_t stream) {
  Episode ep;
  ep.trace.reserve(cfg.horizon);
  ep.summary = run_episode(cfg, source, stream, [&ep](const TraceRecord& r) { ep.trace.push_back(r); });
  return ep;
}

}  // namespace banditq
