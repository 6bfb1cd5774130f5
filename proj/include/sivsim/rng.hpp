#pragma once

// Counter-based pseudo-random generator.
//
// splitmix64 over an affine counter: output i of stream s is
// mix(key(s) + i * GAMMA).  State is two 64-bit words, any draw index is
// reachable in O(1) (skip()), and independent streams are derived by
// hashing (seed, stream) so parallel consumers never share a sequence.
// Deliberately not std::mt19937: identical results on every platform and
// a trivially serializable state matter more here than period length.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace sivsim {

namespace detail {
inline constexpr std::uint64_t splitmix_gamma = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}
}  // namespace detail

// Hash (seed, stream index) into a stream key. Stream 0 of seed s and the
// bare seed s are distinct keys on purpose.
inline constexpr std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t k = detail::mix64(seed + detail::splitmix_gamma);
  k = detail::mix64(k ^ detail::mix64(stream + 2 * detail::splitmix_gamma));
  return k;
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(derive_stream_key(seed, stream)) {}

  std::uint64_t next_u64() {
    std::uint64_t v = detail::mix64(key_ + counter_ * detail::splitmix_gamma);
    ++counter_;
    return v;
  }

  // Uniform on (0,1), never returns 0 or 1: top 53 bits, centered in the bin.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Exponential waiting time for a total rate in s^-1.
  double exponential(double rate) {
    if (!(rate > 0.0)) throw std::domain_error("exponential rate must be positive");
    return -std::log(uniform()) / rate;
  }

  // Standard normal via Box-Muller. Always consumes exactly two uniforms and
  // caches nothing, so draw counts stay predictable.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  void skip(std::uint64_t n) { counter_ += n; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_{0};
};

}  // namespace sivsim
