#include "banditq/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace banditq {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::OutOfRangeInput: return "OutOfRangeInput";
    case ErrorCode::EmptyHistory: return "EmptyHistory";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::SourceExhausted: return "SourceExhausted";
    case ErrorCode::ReplayRowMissing: return "ReplayRowMissing";
    case ErrorCode::ReplayValueOutOfRange: return "ReplayValueOutOfRange";
    case ErrorCode::ReplayMalformed: return "ReplayMalformed";
    case ErrorCode::HistoryShorterThanWindow: return "HistoryShorterThanWindow";
    case ErrorCode::EmptyBenchmarkSet: return "EmptyBenchmarkSet";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BadInterval: return "BadInterval";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidSource: return "InvalidSource";
    case ErrorCode::InvalidSweep: return "InvalidSweep";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

std::string_view to_string(PolicyKind kind) {
  return kind == PolicyKind::BanditQ ? "banditq" : "hedge";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  if (name == "banditq" || name == "BanditQ") return PolicyKind::BanditQ;
  if (name == "hedge" || name == "Hedge") return PolicyKind::Hedge;
  return std::nullopt;
}

VSchedule VSchedule::constant_sqrt_t(double c) {
  VSchedule v;
  v.kind = Kind::ConstantSqrtT;
  v.c = c;
  return v;
}

VSchedule VSchedule::zero() {
  VSchedule v;
  v.kind = Kind::Zero;
  v.c = 0.0;
  return v;
}

VSchedule VSchedule::explicit_values(Vec values) {
  VSchedule v;
  v.kind = Kind::Explicit;
  v.c = 0.0;
  v.values = std::move(values);
  return v;
}

double VSchedule::at(std::size_t t, std::size_t horizon) const {
  switch (kind) {
    case Kind::ConstantSqrtT: return c * std::sqrt(static_cast<double>(horizon));
    case Kind::Zero: return 0.0;
    case Kind::Explicit:
      if (t == 0 || t > values.size()) {
        throw Error(ErrorCode::OutOfRangeInput,
                    "V schedule has no value for round " + std::to_string(t));
      }
      return values[t - 1];
  }
  return 0.0;
}

bool InstanceConfig::is_protected(std::size_t arm) const {
  return std::find(protected_arms.begin(), protected_arms.end(), arm) != protected_arms.end();
}

Vec InstanceConfig::rate_vector() const {
  Vec lambda(n_arms, 0.0);
  for (auto arm : protected_arms) {
    auto it = target_rates.find(arm);
    if (arm < n_arms && it != target_rates.end()) lambda[arm] = it->second;
  }
  return lambda;
}

std::string_view to_string(ConfigError err) {
  switch (err) {
    case ConfigError::BadArmCount: return "BadArmCount";
    case ConfigError::BadHorizon: return "BadHorizon";
    case ConfigError::BadWindow: return "BadWindow";
    case ConfigError::ProtectedOutOfRange: return "ProtectedOutOfRange";
    case ConfigError::DuplicateProtected: return "DuplicateProtected";
    case ConfigError::EmptyProtectedWithRates: return "EmptyProtectedWithRates";
    case ConfigError::MissingRate: return "MissingRate";
    case ConfigError::RateOutOfRange: return "RateOutOfRange";
    case ConfigError::RateSumExceedsOne: return "RateSumExceedsOne";
    case ConfigError::BadVSchedule: return "BadVSchedule";
    case ConfigError::BadHedgeEta: return "BadHedgeEta";
  }
  return "Unknown";
}

bool ValidationResult::has(ConfigError code) const {
  return std::any_of(issues.begin(), issues.end(),
                     [code](const ConfigIssue& i) { return i.code == code; });
}

ValidationResult validate_config(const InstanceConfig& cfg) {
  ValidationResult out;
  auto issue = [&out](ConfigError code, std::string msg) {
    out.issues.push_back({code, std::move(msg)});
  };

  if (cfg.n_arms < 1) issue(ConfigError::BadArmCount, "n_arms must be >= 1");
  if (cfg.horizon < 1) issue(ConfigError::BadHorizon, "horizon must be >= 1");
  if (cfg.window < 1 || cfg.window > std::max<std::size_t>(cfg.horizon, 1)) {
    issue(ConfigError::BadWindow, "window must satisfy 1 <= window <= horizon");
  }

  std::set<std::size_t> seen;
  for (auto arm : cfg.protected_arms) {
    if (arm >= cfg.n_arms) {
      issue(ConfigError::ProtectedOutOfRange,
            "protected arm " + std::to_string(arm) + " is not in [0, n_arms)");
    }
    if (!seen.insert(arm).second) {
      issue(ConfigError::DuplicateProtected, "protected arm " + std::to_string(arm) + " listed twice");
    }
  }

  double rate_sum = 0.0;
  for (const auto& [arm, rate] : cfg.target_rates) {
    if (!seen.count(arm)) {
      issue(ConfigError::EmptyProtectedWithRates,
            "target rate given for non-protected arm " + std::to_string(arm));
      continue;
    }
    if (!std::isfinite(rate) || rate <= 0.0 || rate > 1.0) {
      issue(ConfigError::RateOutOfRange,
            "target rate of arm " + std::to_string(arm) + " must lie in (0, 1]");
    }
    if (std::isfinite(rate)) rate_sum += rate;
  }
  for (auto arm : seen) {
    if (!cfg.target_rates.count(arm)) {
      issue(ConfigError::MissingRate, "protected arm " + std::to_string(arm) + " has no target rate");
    }
  }
  if (rate_sum > 1.0) {
    std::ostringstream msg;
    msg << "sum of target rates " << rate_sum << " exceeds 1";
    issue(ConfigError::RateSumExceedsOne, msg.str());
  }

  const auto& v = cfg.v_schedule;
  switch (v.kind) {
    case VSchedule::Kind::ConstantSqrtT:
      if (!std::isfinite(v.c) || v.c < 0.0) issue(ConfigError::BadVSchedule, "const_sqrt_t requires c >= 0");
      break;
    case VSchedule::Kind::Zero: break;
    case VSchedule::Kind::Explicit: {
      if (v.values.size() != cfg.horizon) {
        issue(ConfigError::BadVSchedule, "explicit V schedule must have exactly horizon values");
      }
      for (std::size_t i = 0; i < v.values.size(); ++i) {
        if (!std::isfinite(v.values[i]) || v.values[i] < 0.0) {
          issue(ConfigError::BadVSchedule, "explicit V schedule has a negative or non-finite value");
          break;
        }
        if (i > 0 && v.values[i] < v.values[i - 1]) {
          issue(ConfigError::BadVSchedule, "explicit V schedule is decreasing");
          break;
        }
      }
      break;
    }
  }

  if (cfg.hedge_eta && (!std::isfinite(*cfg.hedge_eta) || *cfg.hedge_eta <= 0.0)) {
    issue(ConfigError::BadHedgeEta, "hedge_eta must be > 0");
  }

  if (out.issues.empty()) out.config = cfg;
  return out;
}

const InstanceConfig& require_valid(const InstanceConfig& cfg) {
  auto res = validate_config(cfg);
  if (!res.ok()) {
    std::string msg;
    for (const auto& i : res.issues) {
      if (!msg.empty()) msg += "; ";
      msg += std::string(to_string(i.code)) + " (" + i.message + ")";
    }
    throw Error(ErrorCode::InvalidConfig, msg);
  }
  return cfg;
}

}  // namespace banditq
