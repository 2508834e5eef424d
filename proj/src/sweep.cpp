#include "banditq/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include <omp.h>

#include "banditq/policy.hpp"

namespace banditq {

void validate_sweep(const SweepSpec& spec) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidSweep, msg); };
  if (spec.horizons.empty()) fail("no horizons given");
  for (std::size_t i = 1; i < spec.horizons.size(); ++i) {
    if (spec.horizons[i] <= spec.horizons[i - 1]) fail("horizons must be strictly increasing");
  }
  if (spec.repetitions < 1) fail("repetitions must be >= 1");
  if (spec.policies.empty()) fail("no policies given");
  if (spec.base_config.v_schedule.kind == VSchedule::Kind::Explicit) {
    fail("explicit V schedules cannot be swept over horizons");
  }
}

std::uint64_t episode_stream(std::size_t horizon, std::size_t rep) {
  return splitmix64(static_cast<std::uint64_t>(horizon)) ^ static_cast<std::uint64_t>(rep + 1);
}

namespace {

struct EpisodeKey {
  PolicyKind policy;
  std::size_t horizon;
  std::size_t rep;
};

std::vector<EpisodeKey> enumerate(const SweepSpec& spec) {
  std::vector<EpisodeKey> keys;
  for (auto policy : spec.policies) {
    for (auto horizon : spec.horizons) {
      for (std::size_t rep = 0; rep < spec.repetitions; ++rep) keys.push_back({policy, horizon, rep});
    }
  }
  return keys;
}

SweepRow run_one(const SweepSpec& spec, const RewardSource& source, const EpisodeKey& key) {
  InstanceConfig cfg = spec.base_config;
  cfg.horizon = key.horizon;
  cfg.policy = key.policy;
  const RunSummary s = run_episode(cfg, source, episode_stream(key.horizon, key.rep));

  SweepRow row;
  row.policy = key.policy;
  row.horizon = key.horizon;
  row.rep = key.rep;
  row.regret = s.regret.value_or(std::numeric_limits<double>::quiet_NaN());
  for (const auto& [arm, q] : s.max_queue) row.max_queue = std::max(row.max_queue, q);
  row.achieved_rate = s.achieved_rate;
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep_serial(const SweepSpec& spec) {
  validate_sweep(spec);
  const RewardSource source(spec.source);
  std::vector<SweepRow> rows;
  for (const auto& key : enumerate(spec)) rows.push_back(run_one(spec, source, key));
  return rows;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int threads) {
  if (threads <= 1) return run_sweep_serial(spec);
  validate_sweep(spec);
  const RewardSource source(spec.source);
  const auto keys = enumerate(spec);
  std::vector<SweepRow> rows(keys.size());
  std::vector<std::exception_ptr> errors(keys.size());
  const auto count = static_cast<std::ptrdiff_t>(keys.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    try {
      rows[k] = run_one(spec, source, keys[k]);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

double median(std::vector<double> values) {
  if (values.empty() || std::any_of(values.begin(), values.end(), [](double v) { return std::isnan(v); })) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

MetricFit fit_metric(const std::map<std::size_t, std::vector<double>>& by_horizon) {
  MetricFit out;
  for (const auto& [horizon, vals] : by_horizon) {
    out.medians.emplace_back(static_cast<double>(horizon), median(vals));
  }
  try {
    out.fit = scaling_fit(out.medians);
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::map<PolicyKind, PolicyExponents> fit_exponents(const std::vector<SweepRow>& rows) {
  std::map<PolicyKind, std::map<std::size_t, std::vector<double>>> regrets;
  std::map<PolicyKind, std::map<std::size_t, std::vector<double>>> queues;
  for (const auto& row : rows) {
    const double r = std::isnan(row.regret) ? row.regret : std::max(row.regret, 1.0);
    regrets[row.policy][row.horizon].push_back(r);
    queues[row.policy][row.horizon].push_back(row.max_queue);
  }
  std::map<PolicyKind, PolicyExponents> out;
  for (const auto& [policy, by_horizon] : regrets) {
    out[policy].regret = fit_metric(by_horizon);
    out[policy].max_queue = fit_metric(queues[policy]);
  }
  return out;
}

}  // namespace banditq
