#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace llms {

// Flow identity: either the canonical 13-byte IPv4 5-tuple
// (src ip, dst ip, src port, dst port, proto; network byte order) or a
// fingerprint of configured width. Equality and hashing use whichever
// representation is active; a tuple key never equals a fingerprint key.
class FlowKey {
 public:
  static constexpr size_t kTupleBytes = 13;
  using Tuple = std::array<uint8_t, kTupleBytes>;

  enum class Kind : uint8_t { tuple, fingerprint };

  FlowKey() = default;
  explicit FlowKey(const Tuple& bytes) : bytes_(bytes) {}

  static FlowKey from_tuple(uint32_t src_ip, uint32_t dst_ip, uint16_t src_port,
                            uint16_t dst_port, uint8_t proto);
  // `bits` must be 16 or 32; the value is truncated to that width.
  static FlowKey from_fingerprint(uint32_t value, unsigned bits);
  // Inverse of hex(); throws InputError on bad input.
  static FlowKey from_hex(std::string_view hex);

  Kind kind() const noexcept { return kind_; }
  bool is_fingerprint() const noexcept { return kind_ == Kind::fingerprint; }
  const Tuple& bytes() const noexcept { return bytes_; }
  uint32_t fingerprint() const noexcept { return fp_; }
  unsigned fingerprint_bits() const noexcept { return fp_bits_; }

  // Valid only for tuple keys.
  uint32_t src_ip() const noexcept;
  uint32_t dst_ip() const noexcept;
  uint16_t src_port() const noexcept;
  uint16_t dst_port() const noexcept;
  uint8_t proto() const noexcept { return bytes_[12]; }

  // Seeded hash over the active representation.
  uint64_t hash(uint64_t seed) const noexcept;

  // 26 hex digits for tuple keys; bits/4 digits for fingerprints.
  std::string hex() const;

  friend bool operator==(const FlowKey& a, const FlowKey& b) noexcept {
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ == Kind::tuple) return a.bytes_ == b.bytes_;
    return a.fp_bits_ == b.fp_bits_ && a.fp_ == b.fp_;
  }
  friend std::strong_ordering operator<=>(const FlowKey& a,
                                          const FlowKey& b) noexcept;

 private:
  Tuple bytes_{};
  uint32_t fp_ = 0;
  uint8_t fp_bits_ = 0;
  Kind kind_ = Kind::tuple;
};

struct FlowKeyHash {
  size_t operator()(const FlowKey& k) const noexcept { return k.hash(0); }
};

// Hash of the key bytes truncated to `bits` (16 or 32). Throws ConfigError
// for other widths or if `key` is already a fingerprint.
FlowKey make_fingerprint(const FlowKey& key, unsigned bits, uint64_t seed);

// One packet of the stream. Header bytes start at the IPv4 header.
struct PacketRecord {
  FlowKey key;
  std::vector<uint8_t> header_bytes;
  uint64_t timestamp_us = 0;
};

// Appends a zero byte to odd-length headers so two-byte chunking is total.
void pad_header(std::vector<uint8_t>& header);

PacketRecord make_packet(const FlowKey& key, std::vector<uint8_t> header,
                         uint64_t timestamp_us);

std::string ipv4_to_string(uint32_t ip);
// Throws InputError if `s` is not a dotted quad.
uint32_t parse_ipv4(std::string_view s);

std::string to_hex(const std::vector<uint8_t>& bytes);
// Throws InputError on odd length or non-hex characters.
std::vector<uint8_t> from_hex(std::string_view hex);

}  // namespace llms
