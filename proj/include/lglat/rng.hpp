#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace lglat {

// splitmix64 finalizer; full-avalanche 64-bit mixer
constexpr uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Counter-based generator: the key identifies a stream, the counter walks it.
// Substreams are derived by hashing, so `rng.substream("x").at(i)` yields the
// same values no matter what was drawn before — generation order never leaks
// into derived streams.
class Rng {
 public:
  Rng() : key_(mix64(0)), counter_(0) {}
  explicit Rng(uint64_t seed) : key_(mix64(seed)), counter_(0) {}
  Rng(uint64_t key, uint64_t counter) : key_(key), counter_(counter) {}

  Rng substream(std::string_view name) const {
    return Rng(mix64(key_ ^ fnv1a64(name)), 0);
  }
  Rng at(uint64_t index) const {
    return Rng(mix64(key_ ^ mix64(index ^ 0xa0761d6478bd642fULL)), 0);
  }

  uint64_t next_u64() { return mix64(key_ ^ mix64(++counter_)); }

  // [0, 1) with 53 random bits
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform over [0, n); n > 0
  uint64_t uniform_int(uint64_t n) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // standard normal via Box-Muller (two draws per value, no cached state)
  double normal() {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  uint64_t key() const { return key_; }
  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_;
  uint64_t counter_;
};

}  // namespace lglat
