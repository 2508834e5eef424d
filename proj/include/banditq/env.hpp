#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <variant>

#include "banditq/core.hpp"

namespace banditq {

std::uint64_t splitmix64(std::uint64_t x);

/// Portable random stream: std::mt19937_64 (bit-exact by the standard)
/// seeded through SplitMix64 from (seed, stream). Doubles are built from the
/// top 53 bits, so draws do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }
  double uniform01();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 engine_;
};

struct IIDUniform {
  Vec lo;
  Vec hi;
};

struct Periodic {
  Vec base;
  Vec amplitude;
  std::size_t period = 1;
};

// Arm 0 earns protected_reward every round, every other arm rival_reward.
struct Starvation {
  double protected_reward = 0.4;
  double rival_reward = 0.9;
  std::size_t n_arms = 2;
};

struct Replay {
  std::string path;
};

using SourceSpec = std::variant<IIDUniform, Periodic, Starvation, Replay>;

/// A concrete reward sequence for one episode. Replay sources read their
/// file eagerly at construction.
class RewardSource {
 public:
  explicit RewardSource(SourceSpec spec);
  // Replay from in-memory rows (row t-1 holds round t).
  static RewardSource from_rows(std::vector<Vec> rows);

  const SourceSpec& spec() const { return spec_; }
  std::size_t n_arms() const { return n_arms_; }
  const Vec& declared_floor() const { return floor_; }
  // Rounds available; unbounded generators report SIZE_MAX.
  std::size_t available_rounds() const;

  /// Rewards for round t (1-based). Values are clamped to [floor_i, 1].
  Vec next_rewards(std::size_t t, Rng& rng) const;

 private:
  RewardSource() = default;
  void validate_and_derive_floor();

  SourceSpec spec_;
  std::vector<Vec> rows_;
  std::size_t n_arms_ = 0;
  Vec floor_;
};

/// Per-arm minimum over all sliding windows of length w of the
/// window-averaged reward. Throws HistoryShorterThanWindow.
Vec empirical_floor(std::span<const Vec> history, std::size_t window);

/// Streaming form of empirical_floor, fed one round at a time.
class WindowedFloor {
 public:
  WindowedFloor(std::size_t n_arms, std::size_t window);

  void push(std::span<const double> r);
  std::size_t rounds() const { return rounds_; }
  Vec floor() const;

 private:
  std::size_t window_;
  std::size_t rounds_ = 0;
  std::deque<Vec> recent_;
  Vec min_avg_;
};

/// Replay CSV: header `t,r_1,...,r_N`, row t holds round t's rewards.
std::vector<Vec> read_replay_csv(std::istream& in);
std::vector<Vec> read_replay_file(const std::string& path);
void write_replay_csv(std::ostream& out, std::span<const Vec> rows);

}  // namespace banditq
