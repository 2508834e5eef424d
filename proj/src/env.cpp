#include "banditq/env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>

#include "banditq/csv.hpp"

namespace banditq {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL))) {}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

namespace {

bool unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(ErrorCode::InvalidSource, msg);
}

}  // namespace

RewardSource::RewardSource(SourceSpec spec) : spec_(std::move(spec)) {
  if (auto* replay = std::get_if<Replay>(&spec_)) rows_ = read_replay_file(replay->path);
  validate_and_derive_floor();
}

RewardSource RewardSource::from_rows(std::vector<Vec> rows) {
  RewardSource src;
  src.spec_ = Replay{"<memory>"};
  src.rows_ = std::move(rows);
  src.validate_and_derive_floor();
  return src;
}

void RewardSource::validate_and_derive_floor() {
  std::visit(
      [this](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IIDUniform>) {
          require(!s.lo.empty() && s.lo.size() == s.hi.size(), "iid_uniform: lo/hi must be non-empty and equal length");
          for (std::size_t i = 0; i < s.lo.size(); ++i) {
            require(unit(s.lo[i]) && unit(s.hi[i]) && s.lo[i] <= s.hi[i], "iid_uniform: need 0 <= lo <= hi <= 1");
          }
          n_arms_ = s.lo.size();
          floor_ = s.lo;
        } else if constexpr (std::is_same_v<T, Periodic>) {
          require(!s.base.empty() && s.base.size() == s.amplitude.size(),
                  "periodic: base/amplitude must be non-empty and equal length");
          require(s.period >= 1, "periodic: period must be >= 1");
          n_arms_ = s.base.size();
          floor_.resize(n_arms_);
          for (std::size_t i = 0; i < n_arms_; ++i) {
            require(std::isfinite(s.amplitude[i]) && s.amplitude[i] >= 0.0, "periodic: amplitude must be >= 0");
            require(unit(s.base[i] - s.amplitude[i]) && unit(s.base[i] + s.amplitude[i]),
                    "periodic: need 0 <= base -/+ amplitude <= 1");
            floor_[i] = s.base[i] - s.amplitude[i];
          }
        } else if constexpr (std::is_same_v<T, Starvation>) {
          require(s.n_arms >= 1, "starvation: n_arms must be >= 1");
          require(unit(s.protected_reward) && unit(s.rival_reward), "starvation: rewards must lie in [0, 1]");
          n_arms_ = s.n_arms;
          floor_.assign(n_arms_, s.rival_reward);
          floor_[0] = s.protected_reward;
        } else {
          if (rows_.empty()) throw Error(ErrorCode::ReplayMalformed, "replay has no rows");
          n_arms_ = rows_.front().size();
          floor_.assign(n_arms_, 1.0);
          for (const auto& row : rows_) {
            if (row.size() != n_arms_) throw Error(ErrorCode::ReplayMalformed, "replay rows differ in width");
            for (std::size_t i = 0; i < n_arms_; ++i) {
              if (!unit(row[i])) {
                throw Error(ErrorCode::ReplayValueOutOfRange, "replay value outside [0, 1]");
              }
              floor_[i] = std::min(floor_[i], row[i]);
            }
          }
        }
      },
      spec_);
}

std::size_t RewardSource::available_rounds() const {
  if (std::holds_alternative<Replay>(spec_)) return rows_.size();
  return std::numeric_limits<std::size_t>::max();
}

Vec RewardSource::next_rewards(std::size_t t, Rng& rng) const {
  if (t == 0) throw Error(ErrorCode::OutOfRangeInput, "rounds are 1-based");
  Vec r(n_arms_);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IIDUniform>) {
          for (std::size_t i = 0; i < n_arms_; ++i) r[i] = rng.uniform(s.lo[i], s.hi[i]);
        } else if constexpr (std::is_same_v<T, Periodic>) {
          const double n = static_cast<double>(n_arms_);
          const double angle = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(s.period);
          for (std::size_t i = 0; i < n_arms_; ++i) {
            const double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / n;
            r[i] = s.base[i] + s.amplitude[i] * std::sin(angle + phase);
          }
        } else if constexpr (std::is_same_v<T, Starvation>) {
          r.assign(n_arms_, s.rival_reward);
          r[0] = s.protected_reward;
        } else {
          if (t > rows_.size()) {
            throw Error(ErrorCode::ReplayRowMissing,
                        "replay has " + std::to_string(rows_.size()) + " rows, round " + std::to_string(t) + " requested");
          }
          r = rows_[t - 1];
        }
      },
      spec_);
  for (std::size_t i = 0; i < n_arms_; ++i) r[i] = std::clamp(r[i], floor_[i], 1.0);
  return r;
}

WindowedFloor::WindowedFloor(std::size_t n_arms, std::size_t window)
    : window_(window), min_avg_(n_arms, std::numeric_limits<double>::infinity()) {
  if (window_ == 0) throw Error(ErrorCode::OutOfRangeInput, "window must be >= 1");
}

void WindowedFloor::push(std::span<const double> r) {
  if (r.size() != min_avg_.size()) throw Error(ErrorCode::LengthMismatch, "reward width differs from arm count");
  recent_.emplace_back(r.begin(), r.end());
  if (recent_.size() > window_) recent_.pop_front();
  ++rounds_;
  if (recent_.size() < window_) return;
  for (std::size_t i = 0; i < min_avg_.size(); ++i) {
    double sum = 0.0;
    for (const auto& row : recent_) sum += row[i];
    min_avg_[i] = std::min(min_avg_[i], sum / static_cast<double>(window_));
  }
}

Vec WindowedFloor::floor() const {
  if (rounds_ < window_) {
    throw Error(ErrorCode::HistoryShorterThanWindow,
                std::to_string(rounds_) + " rounds seen, window is " + std::to_string(window_));
  }
  return min_avg_;
}

Vec empirical_floor(std::span<const Vec> history, std::size_t window) {
  if (history.empty() || history.size() < window) {
    throw Error(ErrorCode::HistoryShorterThanWindow, "history shorter than window");
  }
  WindowedFloor tracker(history.front().size(), window);
  for (const auto& row : history) tracker.push(row);
  return tracker.floor();
}

std::vector<Vec> read_replay_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ReplayMalformed, "replay file is empty");
  auto header = csv::split(csv::chomp(line));
  if (header.size() < 2 || header[0] != "t") {
    throw Error(ErrorCode::ReplayMalformed, "replay header must be t,r_1,...,r_N");
  }
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (header[i] != "r_" + std::to_string(i)) {
      throw Error(ErrorCode::ReplayMalformed, "unexpected replay column '" + std::string(header[i]) + "'");
    }
  }
  const std::size_t n = header.size() - 1;
  std::vector<Vec> rows;
  while (std::getline(in, line)) {
    auto sv = csv::chomp(line);
    if (sv.empty()) continue;
    auto fields = csv::split(sv);
    if (fields.size() != n + 1) throw Error(ErrorCode::ReplayMalformed, "replay row has wrong column count");
    if (csv::parse_uint(fields[0]) != rows.size() + 1) {
      throw Error(ErrorCode::ReplayMalformed, "replay rows must be numbered 1, 2, ... in order");
    }
    Vec row(n);
    for (std::size_t i = 0; i < n; ++i) {
      row[i] = csv::parse_real(fields[i + 1]);
      if (!unit(row[i])) throw Error(ErrorCode::ReplayValueOutOfRange, "replay value outside [0, 1]");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Vec> read_replay_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open replay file " + path);
  return read_replay_csv(in);
}

void write_replay_csv(std::ostream& out, std::span<const Vec> rows) {
  if (rows.empty()) throw Error(ErrorCode::OutOfRangeInput, "cannot write an empty replay");
  const std::size_t n = rows.front().size();
  out << "t";
  for (std::size_t i = 1; i <= n; ++i) out << ",r_" << i;
  out << '\n';
  for (std::size_t t = 0; t < rows.size(); ++t) {
    out << (t + 1);
    for (double v : rows[t]) out << ',' << csv::format_real(v);
    out << '\n';
  }
}

}  // namespace banditq
