#include "banditq/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "banditq/csv.hpp"

namespace banditq::io {

namespace {

[[noreturn]] void parse_error(const std::string& msg) { throw Error(ErrorCode::Parse, msg); }

std::size_t arm_from_label(const std::string& label) {
  const auto v = csv::parse_uint(label);
  if (v < 1) parse_error("arm labels are 1-based, got '" + label + "'");
  return static_cast<std::size_t>(v - 1);
}

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    parse_error(std::string(what) + ": " + e.what());
  }
}

Vec vec_of(const json& j, const char* key) {
  if (!j.contains(key)) parse_error(std::string("missing key '") + key + "'");
  return j.at(key).get<Vec>();
}

json real_or_null(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

json arm_map(const std::map<std::size_t, double>& m) {
  json out = json::object();
  for (const auto& [arm, v] : m) out[std::to_string(arm + 1)] = v;
  return out;
}

std::map<std::size_t, double> arm_map_from(const json& j) {
  std::map<std::size_t, double> out;
  for (const auto& [label, v] : j.items()) out[arm_from_label(label)] = v.get<double>();
  return out;
}

}  // namespace

InstanceConfig config_from_json(const json& j) {
  return guarded("config", [&] {
    if (!j.is_object()) parse_error("config must be a JSON object");
    InstanceConfig cfg;
    cfg.n_arms = j.at("n_arms").get<std::size_t>();
    cfg.horizon = j.at("horizon").get<std::size_t>();
    for (const auto& a : j.value("protected", json::array())) {
      const auto label = a.get<std::size_t>();
      if (label < 1) parse_error("protected arms are 1-based");
      cfg.protected_arms.push_back(label - 1);
    }
    if (j.contains("target_rates")) cfg.target_rates = arm_map_from(j.at("target_rates"));
    if (j.contains("v_schedule")) {
      const auto& v = j.at("v_schedule");
      const auto type = v.at("type").get<std::string>();
      if (type == "const_sqrt_t") {
        cfg.v_schedule = VSchedule::constant_sqrt_t(v.value("c", 1.0));
      } else if (type == "zero") {
        cfg.v_schedule = VSchedule::zero();
      } else if (type == "explicit") {
        cfg.v_schedule = VSchedule::explicit_values(vec_of(v, "values"));
      } else {
        parse_error("unknown v_schedule type '" + type + "'");
      }
    }
    cfg.window = j.value("window", std::size_t{1});
    cfg.seed = j.value("seed", std::uint64_t{0});
    const auto policy = j.value("policy", std::string("banditq"));
    if (auto p = parse_policy(policy)) {
      cfg.policy = *p;
    } else {
      parse_error("unknown policy '" + policy + "'");
    }
    if (j.contains("hedge_eta") && !j.at("hedge_eta").is_null()) cfg.hedge_eta = j.at("hedge_eta").get<double>();
    return cfg;
  });
}

json config_to_json(const InstanceConfig& cfg) {
  json j;
  j["n_arms"] = cfg.n_arms;
  j["horizon"] = cfg.horizon;
  json prot = json::array();
  for (auto a : cfg.protected_arms) prot.push_back(a + 1);
  j["protected"] = prot;
  j["target_rates"] = arm_map(cfg.target_rates);
  switch (cfg.v_schedule.kind) {
    case VSchedule::Kind::ConstantSqrtT: j["v_schedule"] = {{"type", "const_sqrt_t"}, {"c", cfg.v_schedule.c}}; break;
    case VSchedule::Kind::Zero: j["v_schedule"] = {{"type", "zero"}}; break;
    case VSchedule::Kind::Explicit:
      j["v_schedule"] = {{"type", "explicit"}, {"values", cfg.v_schedule.values}};
      break;
  }
  j["window"] = cfg.window;
  j["seed"] = cfg.seed;
  j["policy"] = std::string(to_string(cfg.policy));
  if (cfg.hedge_eta) j["hedge_eta"] = *cfg.hedge_eta;
  return j;
}

SourceSpec source_from_json(const json& j, const std::string& base_dir) {
  return guarded("source", [&]() -> SourceSpec {
    const auto type = j.at("type").get<std::string>();
    if (type == "iid_uniform") return IIDUniform{vec_of(j, "lo"), vec_of(j, "hi")};
    if (type == "periodic") {
      return Periodic{vec_of(j, "base"), vec_of(j, "amplitude"), j.at("period").get<std::size_t>()};
    }
    if (type == "starvation") {
      return Starvation{j.at("protected_reward").get<double>(), j.at("rival_reward").get<double>(),
                        j.value("n_arms", std::size_t{2})};
    }
    if (type == "replay") {
      std::filesystem::path p = j.at("path").get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      return Replay{p.string()};
    }
    parse_error("unknown source type '" + type + "'");
  });
}

json source_to_json(const SourceSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IIDUniform>) {
          return {{"type", "iid_uniform"}, {"lo", s.lo}, {"hi", s.hi}};
        } else if constexpr (std::is_same_v<T, Periodic>) {
          return {{"type", "periodic"}, {"base", s.base}, {"amplitude", s.amplitude}, {"period", s.period}};
        } else if constexpr (std::is_same_v<T, Starvation>) {
          return {{"type", "starvation"},
                  {"protected_reward", s.protected_reward},
                  {"rival_reward", s.rival_reward},
                  {"n_arms", s.n_arms}};
        } else {
          return {{"type", "replay"}, {"path", s.path}};
        }
      },
      spec);
}

SweepSpec sweep_from_json(const json& j, const std::string& base_dir) {
  return guarded("sweep", [&] {
    SweepSpec spec;
    spec.horizons = j.at("horizons").get<std::vector<std::size_t>>();
    spec.repetitions = j.value("repetitions", std::size_t{1});
    spec.base_config = config_from_json(j.at("base_config"));
    if (j.contains("source")) {
      spec.source = source_from_json(j.at("source"), base_dir);
    } else if (j.at("base_config").contains("source")) {
      spec.source = source_from_json(j.at("base_config").at("source"), base_dir);
    } else {
      parse_error("sweep needs a 'source' object");
    }
    const auto metric = j.value("metric", std::string("regret"));
    if (metric == "regret") {
      spec.metric = SweepMetric::Regret;
    } else if (metric == "max_queue") {
      spec.metric = SweepMetric::MaxQueue;
    } else {
      parse_error("unknown metric '" + metric + "'");
    }
    if (j.contains("policies")) {
      spec.policies.clear();
      for (const auto& p : j.at("policies")) {
        auto kind = parse_policy(p.get<std::string>());
        if (!kind) parse_error("unknown policy '" + p.get<std::string>() + "'");
        spec.policies.push_back(*kind);
      }
    }
    return spec;
  });
}

json summary_to_json(const RunSummary& s) {
  json j;
  j["policy"] = std::string(to_string(s.policy));
  j["horizon"] = s.horizon;
  j["total_reward"] = s.total_reward;
  j["benchmark_reward"] = real_or_null(s.benchmark_reward);
  j["regret"] = real_or_null(s.regret);
  j["x_star"] = s.x_star;
  j["max_queue"] = arm_map(s.max_queue);
  j["final_queue"] = arm_map(s.final_queue);
  j["achieved_rate"] = arm_map(s.achieved_rate);
  j["rate_deficit"] = arm_map(s.rate_deficit);
  j["empirical_floor"] = s.empirical_floor;
  j["feasible"] = s.feasible;
  j["feasibility_sum_ratio"] = std::isfinite(s.feasibility_sum_ratio) ? json(s.feasibility_sum_ratio) : json(nullptr);
  j["feasibility_slack"] = std::isfinite(s.feasibility_slack) ? json(s.feasibility_slack) : json(nullptr);
  j["drift_violations"] = s.drift_violations;
  return j;
}

RunSummary summary_from_json(const json& j) {
  return guarded("summary", [&] {
    RunSummary s;
    const auto policy = parse_policy(j.at("policy").get<std::string>());
    if (!policy) parse_error("unknown policy in summary");
    s.policy = *policy;
    s.horizon = j.at("horizon").get<std::size_t>();
    s.total_reward = j.at("total_reward").get<double>();
    if (!j.at("benchmark_reward").is_null()) s.benchmark_reward = j.at("benchmark_reward").get<double>();
    if (!j.at("regret").is_null()) s.regret = j.at("regret").get<double>();
    s.x_star = j.at("x_star").get<Vec>();
    s.max_queue = arm_map_from(j.at("max_queue"));
    s.final_queue = arm_map_from(j.at("final_queue"));
    s.achieved_rate = arm_map_from(j.at("achieved_rate"));
    s.rate_deficit = arm_map_from(j.at("rate_deficit"));
    s.empirical_floor = j.at("empirical_floor").get<Vec>();
    s.feasible = j.at("feasible").get<bool>();
    const auto& ratio = j.at("feasibility_sum_ratio");
    s.feasibility_sum_ratio = ratio.is_null() ? INFINITY : ratio.get<double>();
    const auto& slack = j.at("feasibility_slack");
    s.feasibility_slack = slack.is_null() ? -INFINITY : slack.get<double>();
    s.drift_violations = j.at("drift_violations").get<std::size_t>();
    return s;
  });
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    parse_error(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

void write_trace_header(std::ostream& out, std::size_t n) {
  out << 't';
  for (const char* prefix : {"r_", "x_", "rprime_", "q_", "served_"}) {
    for (std::size_t i = 1; i <= n; ++i) out << ',' << prefix << i;
  }
  out << ",potential\n";
}

void write_trace_row(std::ostream& out, const TraceRecord& rec) {
  out << rec.t;
  for (const Vec* v : {&rec.r, &rec.x, &rec.r_prime, &rec.q_after, &rec.served}) {
    for (double e : *v) out << ',' << csv::format_real(e);
  }
  out << ',' << csv::format_real(rec.potential) << '\n';
}

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace) {
  if (trace.empty()) throw Error(ErrorCode::OutOfRangeInput, "cannot write an empty trace");
  write_trace_header(out, trace.front().r.size());
  for (const auto& rec : trace) write_trace_row(out, rec);
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) parse_error("trace is empty");
  const auto header = csv::split(csv::chomp(line));
  if (header.size() < 7 || (header.size() - 2) % 5 != 0 || header.front() != "t" || header.back() != "potential") {
    parse_error("trace header must be t,r_*,x_*,rprime_*,q_*,served_*,potential");
  }
  const std::size_t n = (header.size() - 2) / 5;
  std::ostringstream expect;
  write_trace_header(expect, n);
  if (std::string(csv::chomp(line)) + "\n" != expect.str()) parse_error("trace header columns out of order");

  std::vector<TraceRecord> out;
  Vec prev_q(n, 0.0);
  while (std::getline(in, line)) {
    const auto sv = csv::chomp(line);
    if (sv.empty()) continue;
    const auto f = csv::split(sv);
    if (f.size() != header.size()) parse_error("trace row has wrong column count");
    TraceRecord rec;
    rec.t = csv::parse_uint(f[0]);
    std::size_t col = 1;
    for (Vec* v : {&rec.r, &rec.x, &rec.r_prime, &rec.q_after, &rec.served}) {
      v->resize(n);
      for (std::size_t i = 0; i < n; ++i) (*v)[i] = csv::parse_real(f[col++]);
    }
    rec.potential = csv::parse_real(f[col]);
    rec.q_before = prev_q;
    prev_q = rec.q_after;
    out.push_back(std::move(rec));
  }
  return out;
}

void write_audit_csv(std::ostream& out, std::span<const RateAuditRow> rows) {
  out << "arm,interval_start,interval_end,achieved,target,certified_bound,pass\n";
  for (const auto& r : rows) {
    out << (r.arm + 1) << ',' << r.interval.start << ',' << r.interval.end << ',' << csv::format_real(r.achieved)
        << ',' << csv::format_real(r.target) << ',' << csv::format_real(r.certified_bound) << ','
        << (r.pass ? "true" : "false") << '\n';
  }
}

std::vector<RateAuditRow> read_audit_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      csv::chomp(line) != "arm,interval_start,interval_end,achieved,target,certified_bound,pass") {
    parse_error("unexpected audit header");
  }
  std::vector<RateAuditRow> rows;
  while (std::getline(in, line)) {
    const auto sv = csv::chomp(line);
    if (sv.empty()) continue;
    const auto f = csv::split(sv);
    if (f.size() != 7) parse_error("audit row has wrong column count");
    RateAuditRow r;
    r.arm = arm_from_label(std::string(f[0]));
    r.interval = {csv::parse_uint(f[1]), csv::parse_uint(f[2])};
    r.achieved = csv::parse_real(f[3]);
    r.target = csv::parse_real(f[4]);
    r.certified_bound = csv::parse_real(f[5]);
    if (f[6] != "true" && f[6] != "false") parse_error("pass column must be true or false");
    r.pass = f[6] == "true";
    rows.push_back(r);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows,
                     std::span<const std::size_t> protected_arms) {
  out << "policy,T,rep,regret,max_queue";
  for (auto arm : protected_arms) out << ",achieved_rate_" << (arm + 1);
  out << '\n';
  for (const auto& r : rows) {
    out << to_string(r.policy) << ',' << r.horizon << ',' << r.rep << ','
        << (std::isnan(r.regret) ? std::string("nan") : csv::format_real(r.regret)) << ','
        << csv::format_real(r.max_queue);
    for (auto arm : protected_arms) {
      auto it = r.achieved_rate.find(arm);
      out << ',' << csv::format_real(it == r.achieved_rate.end() ? 0.0 : it->second);
    }
    out << '\n';
  }
}

namespace {

json fit_to_json(const MetricFit& m) {
  json j;
  json med = json::array();
  for (const auto& [t, v] : m.medians) med.push_back({{"T", t}, {"median", std::isfinite(v) ? json(v) : json(nullptr)}});
  j["medians"] = med;
  if (m.fit) {
    j["exponent"] = m.fit->exponent;
    j["intercept"] = m.fit->intercept;
    j["r2"] = m.fit->r2;
  } else {
    j["exponent"] = nullptr;
    j["error"] = m.error;
  }
  return j;
}

}  // namespace

json exponents_to_json(const std::map<PolicyKind, PolicyExponents>& fits, SweepMetric metric) {
  json j;
  j["metric"] = metric == SweepMetric::Regret ? "regret" : "max_queue";
  json pol = json::object();
  for (const auto& [policy, e] : fits) {
    pol[std::string(to_string(policy))] = {{"regret", fit_to_json(e.regret)}, {"max_queue", fit_to_json(e.max_queue)}};
  }
  j["policies"] = pol;
  return j;
}

}  // namespace banditq::io
