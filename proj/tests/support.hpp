#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "llmsketch/flow_key.hpp"

namespace llms::test {

inline FlowKey key_n(uint32_t n) {
  return FlowKey::from_tuple(0x0a000000u | (n & 0xffffff), 0xc0a80001u, static_cast<uint16_t>(n),
                             443, 6);
}

inline PacketRecord pkt(const FlowKey& k) { return make_packet(k, {}, 0); }

inline std::vector<FlowKey> random_keys(size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<FlowKey> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    out.push_back(FlowKey::from_tuple(static_cast<uint32_t>(rng()), static_cast<uint32_t>(rng()),
                                      static_cast<uint16_t>(rng()), static_cast<uint16_t>(rng()),
                                      static_cast<uint8_t>(rng() & 1 ? 6 : 17)));
  }
  return out;
}

}  // namespace llms::test
