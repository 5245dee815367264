#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace llms {

// splitmix64 finalizer; used both as a mixer and for seed derivation.
constexpr uint64_t mix64(uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for row `row` of a multi-row structure: (seed ^ row), remixed.
constexpr uint64_t row_seed(uint64_t seed, uint64_t row) noexcept {
  return mix64(seed ^ row);
}

// Seeded 64-bit non-cryptographic hash over a byte string (FNV-1a body,
// splitmix finalizer). Stable across platforms and runs.
constexpr uint64_t hash_bytes(std::span<const uint8_t> bytes,
                              uint64_t seed) noexcept {
  uint64_t h = 0xcbf29ce484222325ULL ^ mix64(seed);
  for (uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return mix64(h ^ bytes.size());
}

// Map a 64-bit hash onto [0, n) without modulo bias dominating small n.
inline size_t reduce(uint64_t h, size_t n) noexcept {
  return static_cast<size_t>(
      (static_cast<unsigned __int128>(h) * static_cast<unsigned __int128>(n)) >> 64);
}

}  // namespace llms
