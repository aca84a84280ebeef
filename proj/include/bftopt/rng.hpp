#pragma once

#include <cmath>
#include <cstdint>

namespace bftopt {

// Counter-based pseudo-random streams. Every draw is a pure function of
// (key, counter), so independent streams never interfere: removing one
// consumer does not shift anyone else's sequence, and re-evaluating a round
// reproduces the same values.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream key for one agent: master seed XOR hash of the agent id. Keys are
/// assigned once and travel with the agent, so eliminating an agent leaves
/// the other agents' draws untouched.
inline std::uint64_t agent_stream_key(std::uint64_t master_seed, int agent_id) {
  return master_seed ^ splitmix64(static_cast<std::uint64_t>(agent_id));
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  /// Sub-stream for a given round; draws within a round are independent of
  /// how many draws other rounds made.
  CounterRng at_round(int round) const {
    return CounterRng(splitmix64(key_ ^ splitmix64(0x726f756e64ULL + static_cast<std::uint64_t>(round))));
  }

  std::uint64_t next_u64() { return splitmix64(key_ + counter_++); }

  /// Uniform in (0, 1).
  double next_unit() {
    // 53 high bits, offset by half an ulp to stay strictly inside (0,1).
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Box-Muller; platform-independent, unlike std::normal_distribution.
  double next_gaussian(double mean, double stddev) {
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace bftopt
