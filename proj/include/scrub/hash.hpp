// 64/128-bit non-cryptographic hashing used across the toolkit.
// All hashes are fixed algorithms with explicit seeds so that every stage is
// reproducible across runs and platforms (little/big endian handled).
#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace scrub {

// splitmix64 finalizer; also used to derive per-slot seed streams.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stateful splitmix64 stream for deriving independent seeds.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() { return mix64(state_++); }

 private:
  std::uint64_t state_;
};

struct Digest128 {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  friend bool operator==(const Digest128& a, const Digest128& b) {
    return a.hi == b.hi && a.lo == b.lo;
  }
  friend bool operator!=(const Digest128& a, const Digest128& b) { return !(a == b); }
  friend bool operator<(const Digest128& a, const Digest128& b) {
    return a.hi != b.hi ? a.hi < b.hi : a.lo < b.lo;
  }

  std::string hex() const;
};

struct Digest128Hasher {
  std::size_t operator()(const Digest128& d) const noexcept {
    return static_cast<std::size_t>(d.hi ^ (d.lo * 0x9e3779b97f4a7c15ULL));
  }
};

// MurmurHash3 x64_128 (Austin Appleby, public domain), byte-order independent.
Digest128 murmur3_x64_128(const void* data, std::size_t len, std::uint64_t seed);

inline Digest128 murmur3_x64_128(std::string_view s, std::uint64_t seed = 0) {
  return murmur3_x64_128(s.data(), s.size(), seed);
}

// Seeded 64-bit hash of a byte string (low word of murmur3_x64_128).
inline std::uint64_t hash64(const void* data, std::size_t len, std::uint64_t seed = 0) {
  return murmur3_x64_128(data, len, seed).lo;
}

inline std::uint64_t hash64(std::string_view s, std::uint64_t seed = 0) {
  return hash64(s.data(), s.size(), seed);
}

// Hash of a span of 64-bit values (token-id windows for n-gram shingles).
// Values are serialized little-endian so the result is platform independent.
std::uint64_t hash64_u64_span(const std::uint64_t* values, std::size_t count,
                              std::uint64_t seed = 0);

}  // namespace scrub
