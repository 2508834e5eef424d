#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "banditq/core.hpp"

namespace banditq {

struct FeasibilityReport {
  bool feasible = true;
  double sum_ratio = 0.0;  // sum over protected arms of lambda_i / floor_i
  std::map<std::size_t, bool> per_arm_ok;  // lambda_i <= floor_i
  std::vector<std::string> diagnostics;

  double slack() const { return 1.0 - sum_ratio; }
};

/// A static allocation is feasible iff sum(lambda_i / floor_i) <= 1 and
/// lambda_i <= floor_i on every protected arm. A zero floor under a positive
/// rate is reported as infeasible with a diagnostic.
FeasibilityReport feasibility_check(const std::map<std::size_t, double>& rates,
                                    std::span<const double> floors);

struct BenchmarkResult {
  Vec x_star;
  double value = 0.0;
  Vec lower_bounds;
  double slack = 0.0;
  std::size_t rounds = 0;  // 0 when built from bare cumulative sums
};

/// lambda_i / floor_i for protected arms, 0 elsewhere. Infinite when the
/// floor is zero under a positive rate.
Vec benchmark_lower_bounds(const std::map<std::size_t, double>& rates,
                           std::span<const double> floors);

/// Maximizes <x, cumulative> over {x in simplex : x_i >= l_i}. The optimum
/// pins every coordinate at its lower bound and hands the leftover mass to
/// the largest cumulative reward (lowest index on ties).
/// Throws EmptyBenchmarkSet when sum(l) > 1.
BenchmarkResult benchmark_lp(std::span<const double> cumulative,
                             std::span<const double> lower_bounds);

/// Regret against a fixed comparator, re-summed round by round from the trace.
double regret(std::span<const TraceRecord> trace, const BenchmarkResult& benchmark);

struct Interval {
  std::size_t start = 1;  // inclusive, 1-based
  std::size_t end = 1;    // inclusive
};

struct RateAuditRow {
  std::size_t arm = 0;
  Interval interval;
  double achieved = 0.0;
  double target = 0.0;
  double certified_bound = 0.0;  // target - Q_arm(end) / length
  bool pass = false;
};

/// Streaming rate audit. Over any interval [a, b] of length tau the Lindley
/// max-representation gives sum(served) >= lambda * tau - Q(b); each row
/// checks achieved >= certified_bound - 1e-9.
class RateAuditor {
 public:
  RateAuditor(std::map<std::size_t, double> rates, std::vector<Interval> intervals,
              std::size_t horizon);

  void push(const TraceRecord& rec);
  std::vector<RateAuditRow> rows() const;

 private:
  std::map<std::size_t, double> rates_;
  std::vector<Interval> intervals_;
  std::vector<std::map<std::size_t, double>> sums_;
  std::vector<std::map<std::size_t, double>> end_queue_;
};

std::vector<RateAuditRow> rate_audit(std::span<const TraceRecord> trace,
                                     const std::map<std::size_t, double>& rates,
                                     const std::vector<Interval>& intervals);

/// Whole horizon plus four consecutive blocks.
std::vector<Interval> default_audit_intervals(std::size_t horizon);

struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares of log(value) on log(T).
ScalingFit scaling_fit(std::span<const std::pair<double, double>> points);

}  // namespace banditq
