#ifndef HAMCON_RANDOM_HPP
#define HAMCON_RANDOM_HPP

#include <cstdint>

namespace hamcon {

/// Counter-based deterministic random stream (splitmix64 core). The
/// same key always yields the same sequence on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next(); }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  bool coin() { return next() >> 63; }

  /// Uniform in [0, bound); bound must be > 0.
  std::uint64_t uniform(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  /// Uniform in [0, 1).
  double uniform_real() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Independent per-(vertex, round) stream derived from the master seed.
inline RandomStream derive_randomness(std::uint64_t master_seed,
                                      std::uint64_t vertex,
                                      std::uint64_t round) {
  return RandomStream(mix_key(mix_key(master_seed, vertex), round));
}

}  // namespace hamcon

#endif  // HAMCON_RANDOM_HPP
