#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace banditq {

using Vec = std::vector<double>;

enum class ErrorCode {
  NonFiniteInput,
  OutOfRangeInput,
  EmptyHistory,
  PreconditionViolated,
  NegativeInput,
  SourceExhausted,
  ReplayRowMissing,
  ReplayValueOutOfRange,
  ReplayMalformed,
  HistoryShorterThanWindow,
  EmptyBenchmarkSet,
  LengthMismatch,
  BadInterval,
  NonPositiveValue,
  TooFewPoints,
  InvalidConfig,
  InvalidSource,
  InvalidSweep,
  Parse,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every library failure is reported through this type; `code()` is the
// machine-readable part, `what()` names the violated condition.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class PolicyKind { BanditQ, Hedge };

std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy(std::string_view name);

/// Weight sequence V_t that trades reward-seeking against queue pressure.
struct VSchedule {
  enum class Kind { ConstantSqrtT, Zero, Explicit };

  Kind kind = Kind::ConstantSqrtT;
  double c = 1.0;       // ConstantSqrtT: V_t = c * sqrt(T)
  Vec values;           // Explicit: one value per round

  static VSchedule constant_sqrt_t(double c);
  static VSchedule zero();
  static VSchedule explicit_values(Vec values);

  // t is 1-based.
  double at(std::size_t t, std::size_t horizon) const;

  bool operator==(const VSchedule&) const = default;
};

struct InstanceConfig {
  std::size_t n_arms = 1;
  std::size_t horizon = 1;
  std::vector<std::size_t> protected_arms;
  std::map<std::size_t, double> target_rates;
  VSchedule v_schedule;
  std::size_t window = 1;
  std::uint64_t seed = 0;
  PolicyKind policy = PolicyKind::BanditQ;
  std::optional<double> hedge_eta;

  bool is_protected(std::size_t arm) const;
  // Dense rate vector of length n_arms; zero for unprotected arms.
  Vec rate_vector() const;

  bool operator==(const InstanceConfig&) const = default;
};

enum class ConfigError {
  BadArmCount,
  BadHorizon,
  BadWindow,
  ProtectedOutOfRange,
  DuplicateProtected,
  EmptyProtectedWithRates,
  MissingRate,
  RateOutOfRange,
  RateSumExceedsOne,
  BadVSchedule,
  BadHedgeEta,
};

std::string_view to_string(ConfigError err);

struct ConfigIssue {
  ConfigError code;
  std::string message;
};

struct ValidationResult {
  std::optional<InstanceConfig> config;
  std::vector<ConfigIssue> issues;

  bool ok() const { return config.has_value(); }
  bool has(ConfigError code) const;
};

/// Checks every InstanceConfig/VSchedule invariant and returns the config
/// only when none is violated. All violations are collected, not just the
/// first one.
ValidationResult validate_config(const InstanceConfig& cfg);

/// Throws Error(InvalidConfig) listing all issues when validation fails.
const InstanceConfig& require_valid(const InstanceConfig& cfg);

/// One round of an episode. Vectors are indexed by arm (0-based).
struct TraceRecord {
  std::size_t t = 0;  // 1..T
  Vec r;
  Vec x;
  Vec r_prime;  // zero for Hedge runs
  Vec q_before;
  Vec q_after;
  Vec served;   // r_i * x_i
  double potential = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

struct RunSummary {
  PolicyKind policy = PolicyKind::BanditQ;
  std::size_t horizon = 0;
  double total_reward = 0.0;
  // Absent when the realized instance admits no feasible comparator.
  std::optional<double> benchmark_reward;
  std::optional<double> regret;
  Vec x_star;
  std::map<std::size_t, double> max_queue;
  std::map<std::size_t, double> final_queue;
  std::map<std::size_t, double> achieved_rate;
  std::map<std::size_t, double> rate_deficit;
  Vec empirical_floor;
  bool feasible = true;
  double feasibility_sum_ratio = 0.0;
  double feasibility_slack = 1.0;
  std::size_t drift_violations = 0;
};

}  // namespace banditq
