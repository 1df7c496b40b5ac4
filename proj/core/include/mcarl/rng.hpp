#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace mcarl {

// Deterministic random source. All draws go through explicit conversions
// (no std::*_distribution) so that streams are reproducible across
// standard library implementations and serializable as plain state.
class Rng {
 public:
  Rng() : Rng(0) {}
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // uniform integer in [0, n)
  uint64_t uniform_index(uint64_t n);

  // standard normal via Box-Muller (cached spare)
  double normal();

  std::string serialize() const;
  void deserialize(const std::string& text);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mcarl
