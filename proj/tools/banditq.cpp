// Command-line driver: single episodes, horizon sweeps, offline audits and
// replay fixtures. Exit codes: 0 success, 1 error, 2 ran on an instance whose
// realized rewards make the rate targets infeasible.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "banditq/csv.hpp"
#include "banditq/io.hpp"
#include "banditq/oracle.hpp"
#include "banditq/policy.hpp"
#include "banditq/presets.hpp"
#include "banditq/sweep.hpp"

namespace fs = std::filesystem;
using namespace banditq;

namespace {

struct InstanceInput {
  std::string config_path;
  std::string preset;
  std::string source_path;
  std::optional<std::uint64_t> seed;
};

void add_instance_options(CLI::App* cmd, InstanceInput& in) {
  cmd->add_option("--config", in.config_path, "config JSON (may embed a \"source\" object)");
  cmd->add_option("--preset", in.preset, "built-in preset name (see list-presets)");
  cmd->add_option("--source", in.source_path, "reward source JSON, overrides the config's source");
  cmd->add_option("--seed", in.seed, "override the config seed");
}

std::string parent_dir(const std::string& path) { return fs::path(path).parent_path().string(); }

std::pair<InstanceConfig, std::optional<SourceSpec>> load_instance(const InstanceInput& in) {
  if (in.config_path.empty() == in.preset.empty()) {
    throw Error(ErrorCode::InvalidConfig, "give exactly one of --config or --preset");
  }
  InstanceConfig cfg;
  std::optional<SourceSpec> source;
  if (!in.preset.empty()) {
    auto p = find_preset(in.preset);
    if (!p) throw Error(ErrorCode::InvalidConfig, "unknown preset '" + in.preset + "'");
    cfg = p->config;
    source = p->source;
  } else {
    const auto j = io::read_json_file(in.config_path);
    cfg = io::config_from_json(j);
    if (j.contains("source")) source = io::source_from_json(j.at("source"), parent_dir(in.config_path));
  }
  if (!in.source_path.empty()) {
    source = io::source_from_json(io::read_json_file(in.source_path), parent_dir(in.source_path));
  }
  if (in.seed) cfg.seed = *in.seed;
  return {cfg, source};
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory " + dir + ": " + ec.message());
}

void print_feasibility(std::ostream& os, const RunSummary& s) {
  os << "feasible: " << (s.feasible ? "yes" : "no") << "  sum(lambda/floor) = " << s.feasibility_sum_ratio
     << "  slack = " << s.feasibility_slack << '\n';
  os << "empirical floors:";
  for (double f : s.empirical_floor) os << ' ' << f;
  os << '\n';
}

int cmd_run(const InstanceInput& in, const std::string& out_dir, bool no_trace) {
  auto [cfg, source_spec] = load_instance(in);
  if (!source_spec) throw Error(ErrorCode::InvalidSource, "no reward source: add \"source\" to the config or pass --source");
  require_valid(cfg);
  const RewardSource source(*source_spec);
  ensure_dir(out_dir);

  std::ofstream trace_out;
  if (!no_trace) {
    trace_out.open(fs::path(out_dir) / "trace.csv", std::ios::binary);
    if (!trace_out) throw Error(ErrorCode::Io, "cannot write trace.csv in " + out_dir);
    io::write_trace_header(trace_out, cfg.n_arms);
  }
  RateAuditor auditor(cfg.target_rates, default_audit_intervals(cfg.horizon), cfg.horizon);
  const RunSummary summary = run_episode(cfg, source, 0, [&](const TraceRecord& rec) {
    auditor.push(rec);
    if (!no_trace) io::write_trace_row(trace_out, rec);
  });
  if (!no_trace) {
    trace_out.close();
    if (!trace_out) throw Error(ErrorCode::Io, "failed writing trace.csv");
  }

  io::write_text_file((fs::path(out_dir) / "summary.json").string(), io::summary_to_json(summary).dump(2) + "\n");
  const auto rows = auditor.rows();
  std::ostringstream audit;
  io::write_audit_csv(audit, rows);
  io::write_text_file((fs::path(out_dir) / "audit.csv").string(), audit.str());

  std::cout << "policy " << to_string(summary.policy) << ", T = " << summary.horizon
            << ", total reward = " << summary.total_reward << '\n';
  if (summary.regret) std::cout << "regret = " << *summary.regret << '\n';
  for (const auto& [arm, rate] : summary.achieved_rate) {
    std::cout << "arm " << arm + 1 << ": achieved rate " << rate << " (target " << cfg.target_rates.at(arm)
              << "), max queue " << summary.max_queue.at(arm) << '\n';
  }
  for (const auto& r : rows) {
    if (!r.pass) std::cerr << "audit failure on arm " << r.arm + 1 << " [" << r.interval.start << "," << r.interval.end << "]\n";
  }
  if (!summary.feasible) {
    std::cerr << "instance is infeasible for the requested rates\n";
    print_feasibility(std::cerr, summary);
    return 2;
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& preset, std::optional<std::uint64_t> seed,
              const std::string& out_dir, int threads) {
  if (config_path.empty() == preset.empty()) throw Error(ErrorCode::InvalidSweep, "give exactly one of --config or --preset");
  SweepSpec spec;
  if (!preset.empty()) {
    auto p = find_sweep_preset(preset);
    if (!p) throw Error(ErrorCode::InvalidSweep, "unknown sweep preset '" + preset + "'");
    spec = p->spec;
  } else {
    spec = io::sweep_from_json(io::read_json_file(config_path), parent_dir(config_path));
  }
  if (seed) spec.base_config.seed = *seed;

  const auto rows = run_sweep(spec, threads);
  ensure_dir(out_dir);
  std::ostringstream csv_out;
  io::write_sweep_csv(csv_out, rows, spec.base_config.protected_arms);
  io::write_text_file((fs::path(out_dir) / "sweep.csv").string(), csv_out.str());

  const auto fits = fit_exponents(rows);
  io::write_text_file((fs::path(out_dir) / "exponents.json").string(),
                      io::exponents_to_json(fits, spec.metric).dump(2) + "\n");
  for (const auto& [policy, e] : fits) {
    for (const auto& [name, m] : {std::pair{"regret", &e.regret}, std::pair{"max_queue", &e.max_queue}}) {
      std::cout << to_string(policy) << ' ' << name << ": ";
      if (m->fit) {
        std::cout << "exponent " << m->fit->exponent << " (r2 " << m->fit->r2 << ")\n";
      } else {
        std::cout << "no fit\n";
        std::cerr << "warning: " << to_string(policy) << ' ' << name << " fit failed: " << m->error << '\n';
      }
    }
  }
  return 0;
}

std::optional<Interval> parse_interval(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return std::nullopt;
  try {
    return Interval{csv::parse_uint(std::string_view(text).substr(0, colon)),
                    csv::parse_uint(std::string_view(text).substr(colon + 1))};
  } catch (const Error&) {
    return std::nullopt;
  }
}

int cmd_audit(const InstanceInput& in, const std::string& trace_path, const std::vector<std::string>& interval_args,
              const std::string& out_dir) {
  auto [cfg, source_spec] = load_instance(in);
  (void)source_spec;
  std::ifstream trace_in(trace_path);
  if (!trace_in) throw Error(ErrorCode::Io, "cannot open trace " + trace_path);
  const auto trace = io::read_trace_csv(trace_in);
  if (trace.empty()) throw Error(ErrorCode::Parse, "trace has no rows");

  std::vector<Interval> intervals;
  for (const auto& arg : interval_args) {
    auto iv = parse_interval(arg);
    if (!iv) throw Error(ErrorCode::BadInterval, "expected START:END, got '" + arg + "'");
    intervals.push_back(*iv);
  }
  if (intervals.empty()) intervals = default_audit_intervals(trace.size());

  const auto rows = rate_audit(trace, cfg.target_rates, intervals);
  ensure_dir(out_dir);
  std::ostringstream audit;
  io::write_audit_csv(audit, rows);
  io::write_text_file((fs::path(out_dir) / "audit.csv").string(), audit.str());

  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.pass ? 0 : 1;
  std::cout << rows.size() - failed << "/" << rows.size() << " audit rows pass\n";
  return failed == 0 ? 0 : 1;
}

int cmd_gen_fixture(const InstanceInput& in, std::size_t horizon, const std::string& out_path) {
  if (horizon == 0) throw Error(ErrorCode::OutOfRangeInput, "--horizon must be >= 1");
  std::optional<SourceSpec> spec;
  std::uint64_t seed = 0;
  if (!in.preset.empty()) {
    auto p = find_preset(in.preset);
    if (!p) throw Error(ErrorCode::InvalidConfig, "unknown preset '" + in.preset + "'");
    spec = p->source;
    seed = p->config.seed;
  }
  if (!in.source_path.empty()) {
    spec = io::source_from_json(io::read_json_file(in.source_path), parent_dir(in.source_path));
  }
  if (!spec) throw Error(ErrorCode::InvalidSource, "give --preset or --source");
  if (in.seed) seed = *in.seed;

  const RewardSource source(*spec);
  if (source.available_rounds() < horizon) {
    throw Error(ErrorCode::SourceExhausted, "source provides fewer than " + std::to_string(horizon) + " rounds");
  }
  Rng rng(seed, 0);
  std::vector<Vec> rows;
  rows.reserve(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) rows.push_back(source.next_rewards(t, rng));
  std::ostringstream out;
  write_replay_csv(out, rows);
  const auto dir = parent_dir(out_path);
  if (!dir.empty()) ensure_dir(dir);
  io::write_text_file(out_path, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BanditQ: fair online prediction with rate constraints"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 1;
  app.add_option("--parallel", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);

  InstanceInput run_in;
  std::string run_out;
  bool no_trace = false;
  auto* run = app.add_subcommand("run", "run one episode; writes trace.csv, summary.json, audit.csv");
  add_instance_options(run, run_in);
  run->add_option("--out", run_out, "output directory")->required();
  run->add_flag("--no-trace", no_trace, "summary only, no per-round trace");

  std::string sweep_config, sweep_preset, sweep_out;
  std::optional<std::uint64_t> sweep_seed;
  auto* sweep = app.add_subcommand("sweep", "horizon sweep; writes sweep.csv and exponents.json");
  sweep->add_option("--config", sweep_config, "sweep JSON");
  sweep->add_option("--preset", sweep_preset, "built-in sweep preset");
  sweep->add_option("--seed", sweep_seed, "override the base seed");
  sweep->add_option("--out", sweep_out, "output directory")->required();

  InstanceInput audit_in;
  std::string trace_path, audit_out;
  std::vector<std::string> intervals;
  auto* audit = app.add_subcommand("audit", "rate audit of a recorded trace; writes audit.csv");
  add_instance_options(audit, audit_in);
  audit->add_option("--trace", trace_path, "trace.csv from a previous run")->required();
  audit->add_option("--interval", intervals, "START:END (1-based, inclusive); repeatable");
  audit->add_option("--out", audit_out, "output directory")->required();

  InstanceInput fix_in;
  std::size_t fix_horizon = 0;
  std::string fix_out;
  auto* fixture = app.add_subcommand("gen-fixture", "record a reward source as a replay CSV");
  fixture->add_option("--preset", fix_in.preset, "take the source of this preset");
  fixture->add_option("--source", fix_in.source_path, "reward source JSON");
  fixture->add_option("--seed", fix_in.seed, "RNG seed");
  fixture->add_option("--horizon", fix_horizon, "number of rounds")->required();
  fixture->add_option("--out", fix_out, "output CSV path")->required();

  auto* list = app.add_subcommand("list-presets", "print built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(run_in, run_out, no_trace);
    if (*sweep) return cmd_sweep(sweep_config, sweep_preset, sweep_seed, sweep_out, threads);
    if (*audit) return cmd_audit(audit_in, trace_path, intervals, audit_out);
    if (*fixture) return cmd_gen_fixture(fix_in, fix_horizon, fix_out);
    if (*list) {
      for (const auto& p : presets()) std::cout << p.name << "\t" << p.description << '\n';
      for (const auto& p : sweep_presets()) std::cout << p.name << "\t(sweep) " << p.description << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
