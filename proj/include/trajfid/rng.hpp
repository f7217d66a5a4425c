#pragma once

#include <cstdint>

namespace trajfid {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

struct SplitMixStep {
  std::uint64_t state;
  std::uint64_t output;
};

// One step of SplitMix64 (Steele, Lea & Flood). Pure.
constexpr SplitMixStep splitmix64_next(std::uint64_t state) noexcept {
  state += kGoldenGamma;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return {state, z ^ (z >> 31)};
}

// Top 53 bits of `output` mapped to [0, 1).
constexpr double unit_interval(std::uint64_t output) noexcept {
  return static_cast<double>(output >> 11) * 0x1.0p-53;
}

struct BernoulliStep {
  std::uint64_t state;
  bool value;
};

// Always consumes exactly one output, including for p = 0 and p = 1.
constexpr BernoulliStep bernoulli(std::uint64_t state, double p) noexcept {
  const auto step = splitmix64_next(state);
  return {step.state, unit_interval(step.output) < p};
}

// Mutable wrapper that also counts draws, so callers can check which code
// paths consume randomness.
class Rng {
 public:
  explicit constexpr Rng(std::uint64_t state) noexcept : state_(state) {}

  constexpr std::uint64_t next() noexcept {
    const auto step = splitmix64_next(state_);
    state_ = step.state;
    ++draws_;
    return step.output;
  }

  constexpr bool bernoulli(double p) noexcept {
    const auto step = trajfid::bernoulli(state_, p);
    state_ = step.state;
    ++draws_;
    return step.value;
  }

  // Index in [0, n) as output % n. n must be positive.
  constexpr std::uint64_t uniform_index(std::uint64_t n) noexcept { return next() % n; }

  constexpr std::uint64_t state() const noexcept { return state_; }
  constexpr std::uint64_t draws() const noexcept { return draws_; }

 private:
  std::uint64_t state_;
  std::uint64_t draws_ = 0;
};

}  // namespace trajfid
