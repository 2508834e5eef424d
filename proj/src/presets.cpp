#include "banditq/presets.hpp"

namespace banditq {

namespace {

InstanceConfig make_config(std::size_t n, std::size_t horizon, std::map<std::size_t, double> rates,
                           VSchedule v, PolicyKind policy, std::uint64_t seed) {
  InstanceConfig cfg;
  cfg.n_arms = n;
  cfg.horizon = horizon;
  for (const auto& [arm, rate] : rates) cfg.protected_arms.push_back(arm);
  cfg.target_rates = std::move(rates);
  cfg.v_schedule = std::move(v);
  cfg.seed = seed;
  cfg.policy = policy;
  return cfg;
}

// Arm 0 is protected with floor 0.5; arms 1 and 2 pay more on average.
IIDUniform iid_n3() { return {{0.5, 0.3, 0.1}, {0.7, 1.0, 0.9}}; }

std::vector<Preset> build_presets() {
  constexpr std::size_t k16k = std::size_t{1} << 14;
  const auto sqrt_t = VSchedule::constant_sqrt_t(1.0);
  return {
      {"starvation-n2", "constant rewards (0.4, 0.9), lambda_1 = 0.25, BanditQ",
       make_config(2, k16k, {{0, 0.25}}, sqrt_t, PolicyKind::BanditQ, 1), Starvation{0.4, 0.9, 2}},
      {"starvation-n2-hedge", "constant rewards (0.4, 0.9), lambda_1 = 0.25, Hedge",
       make_config(2, k16k, {{0, 0.25}}, sqrt_t, PolicyKind::Hedge, 1), Starvation{0.4, 0.9, 2}},
      {"iid-n3", "IID uniform rewards, arm 1 protected at 0.3 with floor 0.5, V = sqrt(T)",
       make_config(3, k16k, {{0, 0.3}}, sqrt_t, PolicyKind::BanditQ, 7), iid_n3()},
      {"iid-n3-v0", "IID uniform rewards, arm 1 protected at 0.3, V = 0",
       make_config(3, k16k, {{0, 0.3}}, VSchedule::zero(), PolicyKind::BanditQ, 7), iid_n3()},
      {"periodic-n3", "sinusoidal rewards, arms 1 and 2 protected",
       make_config(3, 1 << 13, {{0, 0.2}, {1, 0.12}}, sqrt_t, PolicyKind::BanditQ, 3),
       Periodic{{0.6, 0.5, 0.7}, {0.2, 0.2, 0.25}, 64}},
      {"unconstrained-n4", "IID uniform rewards, no protected arms",
       make_config(4, 1 << 12, {}, sqrt_t, PolicyKind::BanditQ, 11),
       IIDUniform{{0.0, 0.1, 0.2, 0.3}, {0.6, 0.7, 0.8, 0.9}}},
      {"infeasible-n2", "rates (0.4, 0.4) against constant rewards 0.5: sum of ratios 1.6",
       make_config(2, 1 << 12, {{0, 0.4}, {1, 0.4}}, sqrt_t, PolicyKind::BanditQ, 5), Starvation{0.5, 0.5, 2}},
  };
}

std::vector<SweepPreset> build_sweep_presets() {
  const std::vector<std::size_t> horizons{std::size_t{1} << 12, std::size_t{1} << 14, std::size_t{1} << 16};
  auto scaling = [&](VSchedule v) {
    SweepSpec s;
    s.horizons = horizons;
    s.repetitions = 5;
    s.base_config = make_config(3, horizons.front(), {{0, 0.3}}, std::move(v), PolicyKind::BanditQ, 2024);
    s.source = iid_n3();
    s.metric = SweepMetric::Regret;
    s.policies = {PolicyKind::BanditQ};
    return s;
  };
  SweepSpec compare;
  compare.horizons = {std::size_t{1} << 10, std::size_t{1} << 12, std::size_t{1} << 14};
  compare.repetitions = 1;
  compare.base_config =
      make_config(2, compare.horizons.front(), {{0, 0.25}}, VSchedule::constant_sqrt_t(1.0), PolicyKind::BanditQ, 1);
  compare.source = Starvation{0.4, 0.9, 2};
  compare.policies = {PolicyKind::BanditQ, PolicyKind::Hedge};

  SweepSpec queue_v0 = scaling(VSchedule::zero());
  queue_v0.metric = SweepMetric::MaxQueue;
  return {
      {"scaling-sqrt-t", "N=3 IID, lambda_1 = 0.3, V = sqrt(T), T in {2^12, 2^14, 2^16}, 5 reps",
       scaling(VSchedule::constant_sqrt_t(1.0))},
      {"scaling-v0", "same sweep with V = 0", queue_v0},
      {"starvation-compare", "BanditQ vs Hedge on the starvation adversary", compare},
  };
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build_presets();
  return all;
}

std::optional<Preset> find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

const std::vector<SweepPreset>& sweep_presets() {
  static const std::vector<SweepPreset> all = build_sweep_presets();
  return all;
}

std::optional<SweepPreset> find_sweep_preset(const std::string& name) {
  for (const auto& p : sweep_presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

}  // namespace banditq
