#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "banditq/core.hpp"
#include "banditq/env.hpp"
#include "banditq/oracle.hpp"
#include "banditq/sweep.hpp"

namespace banditq::io {

using nlohmann::json;

// Config JSON. Arms are 1-based in files ("protected": [1], "target_rates":
// {"1": 0.3}) and 0-based in memory. An optional "source" object is carried
// alongside, see source_from_json.
InstanceConfig config_from_json(const json& j);
json config_to_json(const InstanceConfig& cfg);

// {"type":"iid_uniform","lo":[...],"hi":[...]}
// {"type":"periodic","base":[...],"amplitude":[...],"period":P}
// {"type":"starvation","protected_reward":a,"rival_reward":b,"n_arms":N}
// {"type":"replay","path":"file.csv"}  (relative paths resolve against base_dir)
SourceSpec source_from_json(const json& j, const std::string& base_dir = "");
json source_to_json(const SourceSpec& spec);

SweepSpec sweep_from_json(const json& j, const std::string& base_dir = "");

json summary_to_json(const RunSummary& s);
RunSummary summary_from_json(const json& j);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

// trace.csv: t,r_*,x_*,rprime_*,q_*,served_*,potential with q = Q(t).
void write_trace_header(std::ostream& out, std::size_t n_arms);
void write_trace_row(std::ostream& out, const TraceRecord& rec);
void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace);
// Rebuilds q_before from the previous row (zeros before round 1).
std::vector<TraceRecord> read_trace_csv(std::istream& in);

// audit.csv: arm,interval_start,interval_end,achieved,target,certified_bound,pass
void write_audit_csv(std::ostream& out, std::span<const RateAuditRow> rows);
std::vector<RateAuditRow> read_audit_csv(std::istream& in);

// sweep.csv: policy,T,rep,regret,max_queue,achieved_rate_<arm>...
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows,
                     std::span<const std::size_t> protected_arms);

json exponents_to_json(const std::map<PolicyKind, PolicyExponents>& fits, SweepMetric metric);

}  // namespace banditq::io
