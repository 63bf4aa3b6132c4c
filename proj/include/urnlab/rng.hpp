#pragma once

// Counter-based pseudo-random streams.  Draw t of stream (seed, id) is a pure
// function of (seed, id, t), so results are independent of thread count and
// scheduling: trajectory i always consumes stream i regardless of which
// worker runs it.  The generator is the splitmix64 finalizer over a Weyl
// sequence, which passes standard statistical batteries and needs no state
// beyond the counter.

#include <cstdint>

namespace urnlab {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t splitmix64_at(std::uint64_t key, std::uint64_t t) {
  return mix64(key + (t + 1) * 0x9e3779b97f4a7c15ULL);
}

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64_at(splitmix64_at(0x8bb84b93962eacc9ULL, seed), stream)) {}

  std::uint64_t next_u64() { return splitmix64_at(key_, t_++); }

  // Uniform in [0, 1) with 53 random bits; we avoid
  // std::uniform_real_distribution because its output is
  // implementation-defined and would break cross-platform reproducibility.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t t_ = 0;
};

}  // namespace urnlab
