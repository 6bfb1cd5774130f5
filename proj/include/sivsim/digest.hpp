#pragma once

// FNV-1a 64-bit digests for reproducibility stamps.

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace sivsim {

class Fnv1a {
 public:
  static constexpr std::uint64_t offset_basis = 0xcbf29ce484222325ull;
  static constexpr std::uint64_t prime = 0x100000001b3ull;

  Fnv1a& update(const void* data, std::size_t n) {
    auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= prime;
    }
    return *this;
  }

  Fnv1a& update(std::string_view s) { return update(s.data(), s.size()); }

  Fnv1a& update(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    return update(&bits, sizeof bits);
  }

  Fnv1a& update(std::uint64_t v) { return update(&v, sizeof v); }

  std::uint64_t value() const { return hash_; }

  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t h = hash_;
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = digits[h & 0xf];
      h >>= 4;
    }
    return out;
  }

 private:
  std::uint64_t hash_{offset_basis};
};

inline std::uint64_t fnv1a64(std::string_view s) {
  return Fnv1a{}.update(s).value();
}

}  // namespace sivsim
