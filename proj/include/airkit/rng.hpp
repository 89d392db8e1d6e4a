#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace airkit {

/// splitmix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// A seeded random stream. Streams for replication r, group g are derived
/// from the master seed alone, so any partition of replications across
/// workers draws the same numbers.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed) : engine_(mix64(seed)) {}

  static Stream derive(std::uint64_t master_seed, std::uint64_t replication,
                       std::uint64_t group) {
    std::uint64_t h = mix64(master_seed);
    h = mix64(h ^ replication);
    h = mix64(h ^ (group * 0xD6E8FEB86659FD93ULL));
    return Stream(h);
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace airkit
