#include "llmsketch/flow_key.hpp"

#include <charconv>

#include "llmsketch/errors.hpp"
#include "llmsketch/hash.hpp"

namespace llms {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

uint32_t load_be32(const uint8_t* p) {
  return (uint32_t{p[0]} << 24) | (uint32_t{p[1]} << 16) | (uint32_t{p[2]} << 8) |
         uint32_t{p[3]};
}

void store_be32(uint8_t* p, uint32_t v) {
  p[0] = static_cast<uint8_t>(v >> 24);
  p[1] = static_cast<uint8_t>(v >> 16);
  p[2] = static_cast<uint8_t>(v >> 8);
  p[3] = static_cast<uint8_t>(v);
}

}  // namespace

FlowKey FlowKey::from_tuple(uint32_t src_ip, uint32_t dst_ip, uint16_t src_port,
                            uint16_t dst_port, uint8_t proto) {
  Tuple t{};
  store_be32(t.data(), src_ip);
  store_be32(t.data() + 4, dst_ip);
  t[8] = static_cast<uint8_t>(src_port >> 8);
  t[9] = static_cast<uint8_t>(src_port);
  t[10] = static_cast<uint8_t>(dst_port >> 8);
  t[11] = static_cast<uint8_t>(dst_port);
  t[12] = proto;
  return FlowKey(t);
}

FlowKey FlowKey::from_fingerprint(uint32_t value, unsigned bits) {
  FlowKey k;
  k.kind_ = Kind::fingerprint;
  k.fp_bits_ = static_cast<uint8_t>(bits);
  k.fp_ = bits >= 32 ? value : (value & ((1u << bits) - 1));
  return k;
}

FlowKey FlowKey::from_hex(std::string_view hex) {
  const auto raw = llms::from_hex(hex);
  if (raw.size() == kTupleBytes) {
    Tuple t{};
    std::copy(raw.begin(), raw.end(), t.begin());
    return FlowKey(t);
  }
  if (raw.size() == 2 || raw.size() == 4) {
    uint32_t v = 0;
    for (uint8_t b : raw) v = (v << 8) | b;
    return from_fingerprint(v, static_cast<unsigned>(raw.size() * 8));
  }
  throw InputError("flow key hex must encode 13 (tuple), 2 or 4 (fingerprint) bytes: '" +
                   std::string(hex) + "'");
}

uint32_t FlowKey::src_ip() const noexcept { return load_be32(bytes_.data()); }
uint32_t FlowKey::dst_ip() const noexcept { return load_be32(bytes_.data() + 4); }
uint16_t FlowKey::src_port() const noexcept {
  return static_cast<uint16_t>((bytes_[8] << 8) | bytes_[9]);
}
uint16_t FlowKey::dst_port() const noexcept {
  return static_cast<uint16_t>((bytes_[10] << 8) | bytes_[11]);
}

uint64_t FlowKey::hash(uint64_t seed) const noexcept {
  if (kind_ == Kind::tuple) return hash_bytes(bytes_, seed);
  const uint8_t fp[5] = {static_cast<uint8_t>(fp_), static_cast<uint8_t>(fp_ >> 8),
                         static_cast<uint8_t>(fp_ >> 16), static_cast<uint8_t>(fp_ >> 24),
                         fp_bits_};
  return hash_bytes(fp, seed);
}

std::string FlowKey::hex() const {
  if (kind_ == Kind::tuple) return to_hex(std::vector<uint8_t>(bytes_.begin(), bytes_.end()));
  std::string out(fp_bits_ / 4, '0');
  for (size_t i = 0; i < out.size(); ++i) {
    const unsigned shift = static_cast<unsigned>(4 * (out.size() - 1 - i));
    out[i] = kHexDigits[(fp_ >> shift) & 0xf];
  }
  return out;
}

std::strong_ordering operator<=>(const FlowKey& a, const FlowKey& b) noexcept {
  if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
  if (a.kind_ == FlowKey::Kind::tuple) return a.bytes_ <=> b.bytes_;
  if (auto c = a.fp_bits_ <=> b.fp_bits_; c != 0) return c;
  return a.fp_ <=> b.fp_;
}

FlowKey make_fingerprint(const FlowKey& key, unsigned bits, uint64_t seed) {
  if (bits != 16 && bits != 32)
    throw ConfigError("fingerprint width must be 16 or 32 bits, got " + std::to_string(bits));
  if (key.is_fingerprint()) throw ConfigError("cannot fingerprint a fingerprint key");
  return FlowKey::from_fingerprint(static_cast<uint32_t>(key.hash(seed)), bits);
}

void pad_header(std::vector<uint8_t>& header) {
  if (header.size() % 2 != 0) header.push_back(0);
}

PacketRecord make_packet(const FlowKey& key, std::vector<uint8_t> header,
                         uint64_t timestamp_us) {
  pad_header(header);
  return PacketRecord{key, std::move(header), timestamp_us};
}

std::string ipv4_to_string(uint32_t ip) {
  return std::to_string(ip >> 24) + "." + std::to_string((ip >> 16) & 0xff) + "." +
         std::to_string((ip >> 8) & 0xff) + "." + std::to_string(ip & 0xff);
}

uint32_t parse_ipv4(std::string_view s) {
  uint32_t ip = 0;
  const char* p = s.data();
  const char* end = s.data() + s.size();
  for (int octet = 0; octet < 4; ++octet) {
    unsigned v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{} || next == p || v > 255)
      throw InputError("invalid IPv4 address '" + std::string(s) + "'");
    ip = (ip << 8) | v;
    p = next;
    if (octet < 3) {
      if (p == end || *p != '.') throw InputError("invalid IPv4 address '" + std::string(s) + "'");
      ++p;
    }
  }
  if (p != end) throw InputError("invalid IPv4 address '" + std::string(s) + "'");
  return ip;
}

std::string to_hex(const std::vector<uint8_t>& bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0xf]);
  }
  return out;
}

std::vector<uint8_t> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw InputError("odd-length hex string");
  std::vector<uint8_t> out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw InputError("invalid hex character in '" + std::string(hex) + "'");
    out[i] = static_cast<uint8_t>((hi << 4) | lo);
  }
  return out;
}

}  // namespace llms
