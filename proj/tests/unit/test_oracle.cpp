#include <doctest.h>

#include <cmath>
#include <random>

#include "banditq/oracle.hpp"
#include "support/grid_oracle.hpp"

using namespace banditq;

namespace {

TraceRecord record(std::size_t t, Vec r, Vec x) {
  TraceRecord rec;
  rec.t = t;
  rec.served.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) rec.served[i] = r[i] * x[i];
  rec.r = std::move(r);
  rec.x = std::move(x);
  return rec;
}

// Trace with a single protected arm whose queue evolves by the recursion.
std::vector<TraceRecord> served_trace(const Vec& served, double lambda) {
  std::vector<TraceRecord> trace;
  double q = 0.0;
  for (std::size_t t = 0; t < served.size(); ++t) {
    TraceRecord rec;
    rec.t = t + 1;
    rec.r = {1.0};
    rec.x = {served[t]};
    rec.served = {served[t]};
    rec.q_before = {q};
    q = std::max(0.0, q + lambda - served[t]);
    rec.q_after = {q};
    trace.push_back(rec);
  }
  return trace;
}

}  // namespace

TEST_CASE("feasibility worked values") {
  auto a = feasibility_check({{0, 0.3}}, Vec{0.5});
  CHECK(a.feasible);
  CHECK(a.sum_ratio == doctest::Approx(0.6));

  auto b = feasibility_check({{0, 0.6}}, Vec{0.5});
  CHECK_FALSE(b.feasible);
  CHECK_FALSE(b.per_arm_ok.at(0));

  auto c = feasibility_check({{0, 0.4}, {1, 0.4}}, Vec{0.5, 0.5});
  CHECK_FALSE(c.feasible);
  CHECK(c.sum_ratio == doctest::Approx(1.6));
  CHECK(c.per_arm_ok.at(0));
}

TEST_CASE("zero floor under a positive rate is infeasible, not a crash") {
  auto rep = feasibility_check({{1, 0.2}}, Vec{0.5, 0.0});
  CHECK_FALSE(rep.feasible);
  REQUIRE_FALSE(rep.diagnostics.empty());
  CHECK(rep.diagnostics.front().find("ZeroFloorWithPositiveRate") != std::string::npos);
}

TEST_CASE("benchmark_lp worked values") {
  auto a = benchmark_lp(Vec{10, 20}, Vec{0.5, 0.0});
  CHECK(a.x_star[0] == doctest::Approx(0.5));
  CHECK(a.x_star[1] == doctest::Approx(0.5));
  CHECK(a.value == doctest::Approx(15.0));
  const auto g = testing::grid_benchmark(Vec{10, 20}, Vec{0.5, 0.0}, 1e-3);
  CHECK(g.objective == doctest::Approx(15.0));

  auto b = benchmark_lp(Vec{3, 7, 5}, Vec{0, 0, 0});
  CHECK(b.x_star == Vec{0, 1, 0});
  CHECK(b.value == 7.0);

  try {
    benchmark_lp(Vec{1, 1}, Vec{0.6, 0.6});
    FAIL("expected EmptyBenchmarkSet");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyBenchmarkSet);
  }
}

TEST_CASE("benchmark ties go to the lowest index") {
  auto r = benchmark_lp(Vec{5, 9, 9}, Vec{0.1, 0.0, 0.0});
  CHECK(r.x_star[1] == doctest::Approx(0.9));
  CHECK(r.x_star[2] == 0.0);
}

TEST_CASE("benchmark_lp agrees with lattice search and respects its bounds") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + gen() % 3;
    Vec reward(n);
    Vec lower(n, 0.0);
    for (auto& r : reward) r = 100.0 * u(gen);
    double budget = u(gen);
    for (std::size_t i = 0; i < n; ++i) {
      if (gen() % 2) {
        lower[i] = budget * u(gen);
        budget -= lower[i];
      }
    }
    const auto exact = benchmark_lp(reward, lower);
    const auto grid = testing::grid_benchmark(reward, lower, 1e-3);
    const double scale = *std::max_element(reward.begin(), reward.end());
    CHECK(std::abs(exact.value - grid.objective) <= 2e-3 * scale);
    CHECK(exact.value >= grid.objective - 1e-9);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(exact.x_star[i] >= lower[i]);
      mass += exact.x_star[i];
    }
    CHECK(mass == doctest::Approx(1.0));

    // raising any cumulative reward cannot lower the optimum
    Vec raised = reward;
    raised[gen() % n] += 10.0 * u(gen);
    CHECK(benchmark_lp(raised, lower).value >= exact.value - 1e-12);
  }
}

TEST_CASE("offline comparator meets every rate pointwise when floors are exact") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec> history;
  Vec floors(3, 1.0);
  for (int t = 0; t < 500; ++t) {
    Vec r{0.5 + 0.3 * u(gen), 0.2 + 0.8 * u(gen), u(gen)};
    for (int i = 0; i < 3; ++i) floors[i] = std::min(floors[i], r[i]);
    history.push_back(r);
  }
  const std::map<std::size_t, double> rates{{0, 0.3}, {1, 0.05}};
  REQUIRE(feasibility_check(rates, floors).feasible);
  Vec cumulative(3, 0.0);
  for (const auto& r : history) {
    for (int i = 0; i < 3; ++i) cumulative[i] += r[i];
  }
  const auto bench = benchmark_lp(cumulative, benchmark_lower_bounds(rates, floors));
  for (const auto& r : history) {
    for (const auto& [arm, rate] : rates) CHECK(bench.x_star[arm] * r[arm] >= rate - 1e-12);
  }
}

TEST_CASE("regret worked values") {
  BenchmarkResult bench;
  bench.x_star = {0.0, 1.0};
  bench.rounds = 1;
  std::vector<TraceRecord> trace{record(1, {0.0, 1.0}, {0.5, 0.5})};
  CHECK(regret(trace, bench) == doctest::Approx(0.5));

  std::vector<TraceRecord> same{record(1, {0.3, 0.8}, {0.0, 1.0}), record(2, {0.6, 0.1}, {0.0, 1.0})};
  bench.rounds = 2;
  CHECK(regret(same, bench) == 0.0);

  bench.rounds = 3;
  CHECK_THROWS_AS(regret(same, bench), Error);
}

TEST_CASE("regret matches the closed-form benchmark value") {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TraceRecord> trace;
  Vec cumulative(3, 0.0);
  double played = 0.0;
  for (std::size_t t = 1; t <= 400; ++t) {
    Vec r{u(gen), u(gen), u(gen)};
    Vec x{u(gen), u(gen), u(gen)};
    const double s = x[0] + x[1] + x[2];
    for (auto& e : x) e /= s;
    for (int i = 0; i < 3; ++i) {
      cumulative[i] += r[i];
      played += r[i] * x[i];
    }
    trace.push_back(record(t, r, x));
  }
  auto bench = benchmark_lp(cumulative, Vec{0.2, 0.0, 0.1});
  bench.rounds = trace.size();
  CHECK(std::abs(regret(trace, bench) - (bench.value - played)) <= 1e-9);
}

TEST_CASE("rate audit worked values") {
  const auto flat = served_trace(Vec(20, 0.4), 0.3);
  for (const auto& row : rate_audit(flat, {{0, 0.3}}, {{1, 20}, {5, 9}})) {
    CHECK(row.achieved == doctest::Approx(0.4));
    CHECK(row.pass);
  }

  const auto starved = served_trace(Vec(10, 0.0), 0.5);
  const auto rows = rate_audit(starved, {{0, 0.5}}, {{1, 10}});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].achieved == 0.0);
  CHECK(rows[0].certified_bound == doctest::Approx(0.0));
  CHECK(rows[0].pass);
}

TEST_CASE("rate audit rejects intervals outside the horizon") {
  const auto trace = served_trace(Vec(5, 0.1), 0.2);
  CHECK_THROWS_AS(rate_audit(trace, {{0, 0.2}}, {{0, 3}}), Error);
  CHECK_THROWS_AS(rate_audit(trace, {{0, 0.2}}, {{2, 6}}), Error);
  CHECK_THROWS_AS(rate_audit(trace, {{0, 0.2}}, {{4, 3}}), Error);
}

TEST_CASE("certified rate bound holds on every interval of random traces") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t len = 1 + gen() % 40;
    const double lambda = u(gen);
    Vec served(len);
    for (auto& s : served) s = u(gen) * lambda * 1.6;
    const auto trace = served_trace(served, lambda);
    std::vector<Interval> all;
    for (std::size_t a = 1; a <= len; ++a) {
      for (std::size_t b = a; b <= len; ++b) all.push_back({a, b});
    }
    for (const auto& row : rate_audit(trace, {{0, lambda}}, all)) CHECK(row.pass);
  }
}

TEST_CASE("scaling_fit recovers exact power laws") {
  std::vector<std::pair<double, double>> line{{10, 10}, {100, 100}, {1000, 1000}};
  auto a = scaling_fit(line);
  CHECK(a.exponent == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.r2 == doctest::Approx(1.0));

  std::vector<std::pair<double, double>> p75;
  for (double t : {1024.0, 4096.0, 16384.0}) p75.emplace_back(t, std::pow(t, 0.75));
  CHECK(std::abs(scaling_fit(p75).exponent - 0.75) <= 1e-9);

  for (double c : {0.01, 3.0, 1e4}) {
    std::vector<std::pair<double, double>> p50;
    for (double t : {100.0, 400.0, 1600.0, 6400.0}) p50.emplace_back(t, c * std::sqrt(t));
    CHECK(std::abs(scaling_fit(p50).exponent - 0.5) <= 1e-9);
  }
}

TEST_CASE("scaling_fit errors") {
  std::vector<std::pair<double, double>> two{{10, 1}, {100, 2}};
  CHECK_THROWS_AS(scaling_fit(two), Error);
  std::vector<std::pair<double, double>> zero{{10, 1}, {100, 0}, {1000, 2}};
  try {
    scaling_fit(zero);
    FAIL("expected NonPositiveValue");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveValue);
  }
  std::vector<std::pair<double, double>> dup{{10, 1}, {10, 2}, {100, 3}};
  CHECK_THROWS_AS(scaling_fit(dup), Error);
}
