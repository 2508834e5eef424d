#pragma once

#include <map>
#include <optional>
#include <string>

#include "banditq/core.hpp"
#include "banditq/env.hpp"
#include "banditq/oracle.hpp"

namespace banditq {

enum class SweepMetric { Regret, MaxQueue };

struct SweepSpec {
  std::vector<std::size_t> horizons;
  std::size_t repetitions = 1;
  InstanceConfig base_config;
  SourceSpec source;
  SweepMetric metric = SweepMetric::Regret;
  std::vector<PolicyKind> policies{PolicyKind::BanditQ};
};

// Throws InvalidSweep when horizons are not strictly increasing, repetitions
// is zero, the policy list is empty or the base config uses an explicit V
// schedule (its length is tied to one horizon).
void validate_sweep(const SweepSpec& spec);

struct SweepRow {
  PolicyKind policy = PolicyKind::BanditQ;
  std::size_t horizon = 0;
  std::size_t rep = 0;
  double regret = 0.0;     // NaN when the realized instance is infeasible
  double max_queue = 0.0;  // max over protected arms and rounds
  std::map<std::size_t, double> achieved_rate;
};

/// Random stream of episode (T, rep). Policies share it, so every policy
/// sees the same reward sequence for a given (seed, T, rep).
std::uint64_t episode_stream(std::size_t horizon, std::size_t rep);

/// Reference path: episodes one after another.
std::vector<SweepRow> run_sweep_serial(const SweepSpec& spec);

/// Episodes distributed over `threads` OpenMP threads. Rows come back in the
/// same (policy, T, rep) order as the serial path and are bit-identical to it.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int threads);

struct MetricFit {
  std::optional<ScalingFit> fit;
  std::string error;  // set when the fit could not be computed
  std::vector<std::pair<double, double>> medians;
};

struct PolicyExponents {
  MetricFit regret;     // medians of max(regret, 1)
  MetricFit max_queue;
};

std::map<PolicyKind, PolicyExponents> fit_exponents(const std::vector<SweepRow>& rows);

double median(std::vector<double> values);

}  // namespace banditq
