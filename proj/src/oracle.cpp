#include "banditq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace banditq {

FeasibilityReport feasibility_check(const std::map<std::size_t, double>& rates,
                                    std::span<const double> floors) {
  FeasibilityReport rep;
  for (const auto& [arm, rate] : rates) {
    if (arm >= floors.size()) throw Error(ErrorCode::OutOfRangeInput, "rate given for an arm without a floor");
    const double floor = floors[arm];
    const bool ok = rate <= floor;
    rep.per_arm_ok[arm] = ok;
    if (floor <= 0.0) {
      if (rate > 0.0) {
        rep.sum_ratio = std::numeric_limits<double>::infinity();
        rep.diagnostics.push_back("ZeroFloorWithPositiveRate: arm " + std::to_string(arm + 1));
      }
      continue;
    }
    rep.sum_ratio += rate / floor;
    if (!ok) rep.diagnostics.push_back("rate exceeds floor on arm " + std::to_string(arm + 1));
  }
  const bool all_ok = std::all_of(rep.per_arm_ok.begin(), rep.per_arm_ok.end(),
                                  [](const auto& kv) { return kv.second; });
  if (rep.sum_ratio > 1.0) rep.diagnostics.push_back("sum of rate/floor ratios exceeds 1");
  rep.feasible = all_ok && rep.sum_ratio <= 1.0;
  return rep;
}

Vec benchmark_lower_bounds(const std::map<std::size_t, double>& rates,
                           std::span<const double> floors) {
  Vec l(floors.size(), 0.0);
  for (const auto& [arm, rate] : rates) {
    if (arm >= floors.size()) throw Error(ErrorCode::OutOfRangeInput, "rate given for an arm without a floor");
    if (rate <= 0.0) continue;
    l[arm] = floors[arm] > 0.0 ? rate / floors[arm] : std::numeric_limits<double>::infinity();
  }
  return l;
}

BenchmarkResult benchmark_lp(std::span<const double> cumulative,
                             std::span<const double> lower_bounds) {
  if (cumulative.empty() || cumulative.size() != lower_bounds.size()) {
    throw Error(ErrorCode::LengthMismatch, "benchmark_lp: cumulative and lower_bounds differ in length");
  }
  double mass = 0.0;
  for (double l : lower_bounds) {
    if (!(l >= 0.0)) throw Error(ErrorCode::NegativeInput, "benchmark lower bounds must be >= 0");
    mass += l;
  }
  if (mass > 1.0) throw Error(ErrorCode::EmptyBenchmarkSet, "lower bounds sum to more than 1");

  BenchmarkResult res;
  res.lower_bounds.assign(lower_bounds.begin(), lower_bounds.end());
  res.slack = 1.0 - mass;
  res.x_star = res.lower_bounds;
  const auto best = static_cast<std::size_t>(
      std::max_element(cumulative.begin(), cumulative.end()) - cumulative.begin());
  res.x_star[best] += res.slack;
  for (std::size_t i = 0; i < cumulative.size(); ++i) res.value += res.x_star[i] * cumulative[i];
  return res;
}

double regret(std::span<const TraceRecord> trace, const BenchmarkResult& benchmark) {
  if (benchmark.rounds != 0 && benchmark.rounds != trace.size()) {
    throw Error(ErrorCode::LengthMismatch, "benchmark covers " + std::to_string(benchmark.rounds) +
                                               " rounds, trace has " + std::to_string(trace.size()));
  }
  double comparator = 0.0;
  double played = 0.0;
  for (const auto& rec : trace) {
    if (rec.r.size() != benchmark.x_star.size() || rec.x.size() != rec.r.size()) {
      throw Error(ErrorCode::LengthMismatch, "trace width differs from benchmark width");
    }
    for (std::size_t i = 0; i < rec.r.size(); ++i) {
      comparator += benchmark.x_star[i] * rec.r[i];
      played += rec.x[i] * rec.r[i];
    }
  }
  return comparator - played;
}

RateAuditor::RateAuditor(std::map<std::size_t, double> rates, std::vector<Interval> intervals,
                         std::size_t horizon)
    : rates_(std::move(rates)), intervals_(std::move(intervals)) {
  for (const auto& iv : intervals_) {
    if (iv.start < 1 || iv.end > horizon || iv.start > iv.end) {
      throw Error(ErrorCode::BadInterval, "interval [" + std::to_string(iv.start) + "," +
                                              std::to_string(iv.end) + "] is not inside [1," +
                                              std::to_string(horizon) + "]");
    }
  }
  sums_.resize(intervals_.size());
  end_queue_.resize(intervals_.size());
}

void RateAuditor::push(const TraceRecord& rec) {
  for (std::size_t k = 0; k < intervals_.size(); ++k) {
    const auto& iv = intervals_[k];
    if (rec.t < iv.start || rec.t > iv.end) continue;
    for (const auto& [arm, rate] : rates_) {
      sums_[k][arm] += rec.served.at(arm);
      if (rec.t == iv.end) end_queue_[k][arm] = rec.q_after.at(arm);
    }
  }
}

std::vector<RateAuditRow> RateAuditor::rows() const {
  std::vector<RateAuditRow> out;
  for (const auto& [arm, rate] : rates_) {
    for (std::size_t k = 0; k < intervals_.size(); ++k) {
      const auto& iv = intervals_[k];
      const double len = static_cast<double>(iv.end - iv.start + 1);
      RateAuditRow row;
      row.arm = arm;
      row.interval = iv;
      auto s = sums_[k].find(arm);
      row.achieved = (s == sums_[k].end() ? 0.0 : s->second) / len;
      row.target = rate;
      auto q = end_queue_[k].find(arm);
      row.certified_bound = rate - (q == end_queue_[k].end() ? 0.0 : q->second) / len;
      row.pass = row.achieved >= row.certified_bound - 1e-9;
      out.push_back(row);
    }
  }
  return out;
}

std::vector<RateAuditRow> rate_audit(std::span<const TraceRecord> trace,
                                     const std::map<std::size_t, double>& rates,
                                     const std::vector<Interval>& intervals) {
  RateAuditor auditor(rates, intervals, trace.size());
  for (const auto& rec : trace) auditor.push(rec);
  return auditor.rows();
}

std::vector<Interval> default_audit_intervals(std::size_t horizon) {
  std::vector<Interval> out{{1, horizon}};
  if (horizon >= 4) {
    const std::size_t block = horizon / 4;
    for (std::size_t k = 0; k < 4; ++k) {
      out.push_back({k * block + 1, k == 3 ? horizon : (k + 1) * block});
    }
  }
  return out;
}

ScalingFit scaling_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw Error(ErrorCode::TooFewPoints, "scaling fit needs at least 3 points");
  std::set<double> horizons;
  for (const auto& [t, v] : points) {
    if (!(v > 0.0) || !(t > 0.0)) throw Error(ErrorCode::NonPositiveValue, "scaling fit needs positive T and values");
    horizons.insert(t);
  }
  if (horizons.size() != points.size()) throw Error(ErrorCode::TooFewPoints, "scaling fit needs distinct horizons");

  const double n = static_cast<double>(points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [t, v] : points) {
    mx += std::log(t);
    my += std::log(v);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [t, v] : points) {
    const double dx = std::log(t) - mx;
    const double dy = std::log(v) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  ScalingFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace banditq
