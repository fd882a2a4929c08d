// Deterministic counter-based random number generation.
//
// Episode runs must be bit-reproducible across platforms and across
// parallelism levels, so we avoid std::normal_distribution (whose output is
// implementation-defined) and draw everything from splitmix64 plus an
// explicit Box-Muller transform. Streams are derived by hashing, never by
// sharing state, so parallel episodes stay independent.
#pragma once

#include <cmath>
#include <cstdint>

namespace navfuse {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller. Consumes exactly two uniforms per call.
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    // 1 - u1 is in (0, 1], keeping the log argument positive.
    return std::sqrt(-2.0 * std::log(1.0 - u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double gaussian(double mean, double stddev) {
    return mean + stddev * gaussian();
  }

  // Derives an independent child stream. Mixing the stream id through one
  // splitmix step decorrelates nearby ids (seed, seed+1, ...).
  Rng split(std::uint64_t stream) const {
    Rng mixer(state_ ^ (0x632BE59BD9B4E019ull * (stream + 1)));
    return Rng(mixer.next_u64());
  }

  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    Rng mixer(seed ^ (0x632BE59BD9B4E019ull * (stream + 1)));
    return mixer.next_u64();
  }

 private:
  std::uint64_t state_;
};

}  // namespace navfuse
