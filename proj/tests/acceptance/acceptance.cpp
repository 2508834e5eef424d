// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Thresholds are fixed here and not tuned per run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <omp.h>

#include "banditq/oracle.hpp"
#include "banditq/policy.hpp"
#include "banditq/presets.hpp"
#include "banditq/queueing.hpp"
#include "banditq/simplex.hpp"
#include "banditq/sweep.hpp"
#include "support/grid_oracle.hpp"

namespace fs = std::filesystem;
using namespace banditq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const Outcome& o) {
  std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

template <class F>
void criterion(const std::string& name, F&& body) {
  try {
    report(name, body());
  } catch (const std::exception& e) {
    report(name, {false, std::string("exception: ") + e.what()});
  }
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Per-round checks applied to every BanditQ episode the suite runs.

struct EpisodeChecks {
  std::size_t rounds = 0;
  std::size_t rate_cert_failures = 0;
  std::size_t drift_failures = 0;
  std::size_t oga_failures = 0;
  std::size_t oga_checkpoints = 0;
  double worst_rate_slack = INFINITY;   // min of sum(served) - (lambda t - Q)
  double worst_oga_margin = INFINITY;   // min of bound - vertex regret
};

EpisodeChecks check_episode(const InstanceConfig& cfg, const RewardSource& source, std::uint64_t stream,
                            RunSummary* summary_out = nullptr) {
  EpisodeChecks c;
  const Vec lambda = cfg.rate_vector();
  const std::size_t n = cfg.n_arms;
  const std::size_t horizon = cfg.horizon;
  const std::size_t checkpoints[] = {horizon / 4, horizon / 2, horizon};
  Vec served_sum(n, 0.0);
  Vec cum_rp(n, 0.0);
  double played_rp = 0.0;
  double sq_sum = 0.0;

  auto sink = [&](const TraceRecord& rec) {
    ++c.rounds;
    const auto d = drift_check(QueueState{rec.q_before, rec.t - 1}, lambda, rec.r, rec.x);
    if (!d.ok) ++c.drift_failures;

    for (std::size_t i = 0; i < n; ++i) {
      served_sum[i] += rec.served[i];
      cum_rp[i] += rec.r_prime[i];
      played_rp += rec.x[i] * rec.r_prime[i];
      sq_sum += rec.r_prime[i] * rec.r_prime[i];
    }
    for (auto arm : cfg.protected_arms) {
      const double slack = served_sum[arm] - (lambda[arm] * static_cast<double>(rec.t) - rec.q_after[arm]);
      c.worst_rate_slack = std::min(c.worst_rate_slack, slack);
      if (slack < -1e-9) ++c.rate_cert_failures;
    }
    if (std::find(std::begin(checkpoints), std::end(checkpoints), rec.t) != std::end(checkpoints)) {
      ++c.oga_checkpoints;
      const double vertex = *std::max_element(cum_rp.begin(), cum_rp.end()) - played_rp;
      const double margin = 2.0 * std::sqrt(sq_sum) - vertex;
      c.worst_oga_margin = std::min(c.worst_oga_margin, margin);
      if (margin < 0.0) ++c.oga_failures;
    }
  };
  const auto summary = run_episode(cfg, source, stream, sink);
  if (summary.drift_violations != 0) c.drift_failures += summary.drift_violations;
  if (summary_out) *summary_out = summary;
  return c;
}

struct CheckedRun {
  std::string label;
  EpisodeChecks checks;
};

// Every BanditQ preset at full horizon, plus every episode of both scaling
// sweeps (reproduced with the sweep's own streams).
std::vector<CheckedRun> run_all_banditq() {
  std::vector<CheckedRun> runs;
  for (const auto& p : presets()) {
    if (p.config.policy != PolicyKind::BanditQ) continue;
    runs.push_back({p.name, check_episode(p.config, RewardSource(p.source), 0)});
  }
  for (const char* name : {"scaling-sqrt-t", "scaling-v0"}) {
    const auto spec = find_sweep_preset(name)->spec;
    const RewardSource source(spec.source);
    for (auto horizon : spec.horizons) {
      for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
        auto cfg = spec.base_config;
        cfg.horizon = horizon;
        cfg.policy = PolicyKind::BanditQ;
        runs.push_back({fmt("%s/T=%zu/rep=%zu", name, horizon, rep),
                        check_episode(cfg, source, episode_stream(horizon, rep))});
      }
    }
  }
  return runs;
}

// ---------------------------------------------------------------------------

Outcome projection_oracle() {
  const auto start = std::chrono::steady_clock::now();
  constexpr int kTrials = 1000;
  std::vector<Vec> inputs(kTrials);
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < kTrials; ++k) {
    inputs[k].resize(2 + k % 3);
    for (auto& e : inputs[k]) e = u(gen);
  }
  std::vector<double> linf(kTrials, 0.0);
  std::vector<double> kkt(kTrials, 0.0);

#pragma omp parallel for schedule(dynamic, 4)
  for (int k = 0; k < kTrials; ++k) {
    const Vec& v = inputs[k];
    const Vec x = project_to_simplex(v);
    const auto grid = testing::grid_project(v, 1e-3);
    for (std::size_t i = 0; i < v.size(); ++i) linf[k] = std::max(linf[k], std::abs(x[i] - grid.x[i]));
    std::size_t pos = 0;
    while (x[pos] <= 0.0) ++pos;
    const double theta = v[pos] - x[pos];
    for (std::size_t i = 0; i < v.size(); ++i) {
      kkt[k] = std::max(kkt[k], std::abs(x[i] - std::max(0.0, v[i] - theta)));
    }
    if (!on_simplex(x)) kkt[k] = INFINITY;
  }
  const double worst_linf = *std::max_element(linf.begin(), linf.end());
  const double worst_kkt = *std::max_element(kkt.begin(), kkt.end());
  const double elapsed = seconds_since(start);
  return {worst_linf <= 2e-3 && worst_kkt <= 1e-9 && elapsed < 10.0,
          fmt("max l_inf vs grid = %.3g (<= 2e-3), max KKT residual = %.3g (<= 1e-9), %.2f s (< 10 s)", worst_linf,
              worst_kkt, elapsed)};
}

Outcome lindley_equivalence() {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  std::size_t positive = 0;
  for (int h = 0; h < 500; ++h) {
    const std::size_t len = 1 + gen() % 200;
    const double lambda = u(gen);
    const double scale = h % 2 ? 1.0 : lambda;
    Vec served(len);
    for (auto& s : served) s = scale * u(gen);
    QueueState st = QueueState::zeros(1);
    for (std::size_t t = 1; t <= len; ++t) {
      st = lindley_step(st, Vec{lambda}, Vec{served[t - 1]});
      const double expanded = lindley_expanded(lambda, std::span<const double>(served).first(t));
      worst = std::max(worst, std::abs(expanded - st.q[0]));
    }
    if (st.q[0] > 0.0) ++positive;
  }
  return {worst <= 1e-12, fmt("500 histories, max |expanded - iterated| = %.3g (<= 1e-12), %zu end with Q > 0", worst,
                              positive)};
}

Outcome rate_certificate(const std::vector<CheckedRun>& runs) {
  std::size_t failures_total = 0;
  std::size_t rounds = 0;
  double worst = INFINITY;
  for (const auto& r : runs) {
    failures_total += r.checks.rate_cert_failures;
    rounds += r.checks.rounds;
    worst = std::min(worst, r.checks.worst_rate_slack);
  }
  return {failures_total == 0,
          fmt("%zu runs, %zu rounds, %zu violations, min slack = %.3g (>= -1e-9)", runs.size(), rounds, failures_total,
              worst)};
}

Outcome drift_inequality(const std::vector<CheckedRun>& runs) {
  std::size_t failures_total = 0;
  std::size_t rounds = 0;
  for (const auto& r : runs) {
    failures_total += r.checks.drift_failures;
    rounds += r.checks.rounds;
  }
  return {failures_total == 0, fmt("%zu runs, %zu rounds, %zu violations", runs.size(), rounds, failures_total)};
}

Outcome oga_bound(const std::vector<CheckedRun>& runs) {
  std::size_t failures_total = 0;
  std::size_t checkpoints = 0;
  double worst = INFINITY;
  for (const auto& r : runs) {
    failures_total += r.checks.oga_failures;
    checkpoints += r.checks.oga_checkpoints;
    worst = std::min(worst, r.checks.worst_oga_margin);
  }
  return {failures_total == 0 && checkpoints > 0,
          fmt("%zu checkpoints (T/4, T/2, T), %zu violations, min margin 2*sqrt(G) - regret = %.4g", checkpoints,
              failures_total, worst)};
}

struct ScalingRuns {
  std::vector<SweepRow> sqrt_rows;
  std::vector<SweepRow> zero_rows;
  PolicyExponents sqrt_fit;
  PolicyExponents zero_fit;
  double elapsed = 0.0;
};

ScalingRuns run_scaling() {
  ScalingRuns s;
  const auto start = std::chrono::steady_clock::now();
  const int threads = std::max(2, omp_get_num_procs());
  s.sqrt_rows = run_sweep(find_sweep_preset("scaling-sqrt-t")->spec, threads);
  s.zero_rows = run_sweep(find_sweep_preset("scaling-v0")->spec, threads);
  s.elapsed = seconds_since(start);
  s.sqrt_fit = fit_exponents(s.sqrt_rows).at(PolicyKind::BanditQ);
  s.zero_fit = fit_exponents(s.zero_rows).at(PolicyKind::BanditQ);
  return s;
}

std::string medians(const MetricFit& m) {
  std::string out;
  for (const auto& [t, v] : m.medians) out += fmt("%s%.0f:%.4g", out.empty() ? "" : " ", t, v);
  return out;
}

Outcome queue_scaling(const ScalingRuns& s) {
  const auto& f = s.sqrt_fit.max_queue;
  if (!f.fit) return {false, "fit failed: " + f.error};
  return {f.fit->exponent <= 0.85 && s.elapsed < 60.0,
          fmt("max-queue exponent = %.4f (<= 0.85), r2 = %.3f, medians [%s], sweeps took %.2f s (< 60 s)",
              f.fit->exponent, f.fit->r2, medians(f).c_str(), s.elapsed)};
}

Outcome regret_scaling(const ScalingRuns& s) {
  const auto& f = s.sqrt_fit.regret;
  if (!f.fit) return {false, "fit failed: " + f.error};
  double worst_ratio = -INFINITY;
  std::vector<double> raw;
  for (const auto& row : s.sqrt_rows) {
    if (row.horizon != (std::size_t{1} << 16)) continue;
    worst_ratio = std::max(worst_ratio, row.regret / static_cast<double>(row.horizon));
    raw.push_back(row.regret);
  }
  return {f.fit->exponent <= 0.85 && worst_ratio <= 0.05,
          fmt("exponent of median max(Regret_T, 1) = %.4f (<= 0.85); max Regret_T/T at T=2^16 = %.4g (<= 0.05); "
              "median raw Regret at 2^16 = %.4g",
              f.fit->exponent, worst_ratio, median(raw))};
}

Outcome zero_v_remark(const ScalingRuns& s) {
  const auto& z = s.zero_fit.max_queue;
  const auto& q = s.sqrt_fit.max_queue;
  if (!z.fit || !q.fit) return {false, "fit failed: " + z.error + q.error};
  return {z.fit->exponent <= 0.62 && z.fit->exponent < q.fit->exponent,
          fmt("V=0 max-queue exponent = %.4f (<= 0.62) vs V=sqrt(T) exponent %.4f; medians [%s]", z.fit->exponent,
              q.fit->exponent, medians(z).c_str())};
}

Outcome fairness_separation() {
  InstanceConfig cfg;
  cfg.n_arms = 2;
  cfg.horizon = std::size_t{1} << 14;
  cfg.protected_arms = {0};
  cfg.target_rates = {{0, 0.25}};
  cfg.v_schedule = VSchedule::constant_sqrt_t(1.0);
  const RewardSource source(Starvation{0.4, 0.9, 2});

  const auto feas = feasibility_check(cfg.target_rates, source.declared_floor());
  cfg.policy = PolicyKind::Hedge;
  const auto hedge = run_episode(cfg, source);
  cfg.policy = PolicyKind::BanditQ;
  const auto bq = run_episode(cfg, source);

  const double T = static_cast<double>(cfg.horizon);
  const double hedge_rate = hedge.achieved_rate.at(0);
  const double bq_rate = bq.achieved_rate.at(0);
  const double certified = 0.25 - bq.final_queue.at(0) / T;
  return {feas.feasible && hedge_rate < 0.05 && bq_rate >= certified - 1e-9 && certified >= 0.20,
          fmt("lambda/floor = %.3f; Hedge rate = %.5f (< 0.05); BanditQ rate = %.9f >= 0.25 - Q(T)/T = %.9f (>= 0.20)",
              feas.sum_ratio, hedge_rate, bq_rate, certified)};
}

Outcome benchmark_oracle() {
  std::mt19937_64 gen(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  std::size_t bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 3;
    Vec reward(n);
    Vec lower(n, 0.0);
    for (auto& r : reward) r = 1000.0 * u(gen);
    double budget = u(gen);
    for (std::size_t i = 0; i < n; ++i) {
      if (gen() % 3 != 0) {
        lower[i] = budget * u(gen);
        budget -= lower[i];
      }
    }
    const auto exact = benchmark_lp(reward, lower);
    const auto grid = testing::grid_benchmark(reward, lower, 1e-3);
    const double scale = *std::max_element(reward.begin(), reward.end());
    const double rel = std::abs(exact.value - grid.objective) / scale;
    worst = std::max(worst, rel);
    if (rel > 2e-3) ++bad;
  }
  return {bad == 0, fmt("200 instances, max |exact - grid| / max R = %.3g (<= 2e-3)", worst)};
}

// ---------------------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BANDITQ_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() / ("banditq_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::string detail;
  bool ok = true;
  std::vector<std::string> traces;
  for (const auto& [tag, flags] : std::vector<std::pair<std::string, std::string>>{
           {"a", "--parallel 1"}, {"b", "--parallel 1"}, {"c", "--parallel 8"}}) {
    const int code = run_cli(flags + " run --preset iid-n3 --out " + (root / tag).string());
    ok = ok && code == 0;
    traces.push_back(slurp(root / tag / "trace.csv"));
  }
  const bool traces_equal = !traces[0].empty() && traces[0] == traces[1] && traces[0] == traces[2];

  std::vector<std::string> sweeps;
  for (const auto& [tag, flags] : std::vector<std::pair<std::string, std::string>>{
           {"s1", "--parallel 1"}, {"s8", "--parallel 8"}}) {
    ok = ok && run_cli(flags + " sweep --preset starvation-compare --out " + (root / tag).string()) == 0;
    sweeps.push_back(slurp(root / tag / "sweep.csv"));
  }
  const bool sweeps_equal = !sweeps[0].empty() && sweeps[0] == sweeps[1];
  fs::remove_all(root);
  return {ok && traces_equal && sweeps_equal,
          fmt("trace.csv (%zu bytes) identical across 2 runs and --parallel 1/8: %s; sweep.csv identical across "
              "--parallel 1/8: %s",
              traces[0].size(), traces_equal ? "yes" : "no", sweeps_equal ? "yes" : "no")};
}

}  // namespace

int main() {
  std::printf("BanditQ acceptance suite\n");
  criterion("projection oracle equivalence", projection_oracle);
  criterion("Lindley max-representation equivalence", lindley_equivalence);

  std::vector<CheckedRun> runs;
  try {
    runs = run_all_banditq();
  } catch (const std::exception& e) {
    std::printf("could not run BanditQ episodes: %s\n", e.what());
  }
  criterion("exact rate certificate", [&] { return rate_certificate(runs); });
  criterion("potential drift inequality", [&] { return drift_inequality(runs); });
  criterion("OGA adaptive regret bound", [&] { return oga_bound(runs); });

  ScalingRuns scaling;
  bool have_scaling = true;
  try {
    scaling = run_scaling();
  } catch (const std::exception& e) {
    have_scaling = false;
    std::printf("scaling sweeps failed: %s\n", e.what());
  }
  auto needs_scaling = [&](auto f) {
    return [&, f] { return have_scaling ? f(scaling) : Outcome{false, "sweeps did not run"}; };
  };
  criterion("queue scaling with V = sqrt(T)", needs_scaling(queue_scaling));
  criterion("regret scaling with V = sqrt(T)", needs_scaling(regret_scaling));
  criterion("queue scaling with V = 0", needs_scaling(zero_v_remark));

  criterion("fairness separation vs Hedge", fairness_separation);
  criterion("benchmark oracle vs grid search", benchmark_oracle);
  criterion("determinism", determinism);

  std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ALL PASS" : "FAILED", failures);
  return failures == 0 ? 0 : 1;
}
