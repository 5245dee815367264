#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

#include "llmsketch/errors.hpp"
#include "llmsketch/hash.hpp"
#include "llmsketch/trace.hpp"

namespace llms {

void ZipfParams::validate() const {
  if (!(alpha > 0)) throw ConfigError("zipf alpha must be positive");
  if (num_flows < 1) throw ConfigError("need at least one flow");
  if (num_packets < num_flows) throw ConfigError("need at least one packet per flow");
}

std::vector<uint64_t> zipf_flow_sizes(double alpha, uint64_t num_flows, uint64_t num_packets) {
  ZipfParams{alpha, num_flows, num_packets}.validate();
  const size_t n = static_cast<size_t>(num_flows);
  std::vector<double> raw(n);
  double z = 0;
  for (size_t r = 0; r < n; ++r) z += std::pow(static_cast<double>(r + 1), -alpha);
  for (size_t r = 0; r < n; ++r)
    raw[r] = static_cast<double>(num_packets) * std::pow(static_cast<double>(r + 1), -alpha) / z;

  std::vector<uint64_t> sizes(n);
  uint64_t total = 0;
  for (size_t r = 0; r < n; ++r) {
    sizes[r] = std::max<uint64_t>(1, static_cast<uint64_t>(std::floor(raw[r])));
    total += sizes[r];
  }

  if (total < num_packets) {
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return raw[a] - std::floor(raw[a]) > raw[b] - std::floor(raw[b]);
    });
    for (size_t i = 0; total < num_packets; i = (i + 1) % n) {
      ++sizes[order[i]];
      ++total;
    }
  }
  // Lifting the tail to one packet may overshoot; take it back from the head.
  for (size_t r = 0; total > num_packets; r = (r + 1) % n) {
    if (sizes[r] > 1) {
      --sizes[r];
      --total;
    }
  }
  return sizes;
}

namespace {

constexpr uint8_t kTcp = 6;
constexpr uint8_t kUdp = 17;

struct FlowProfile {
  FlowKey key;
  uint32_t src, dst;
  uint16_t sport, dport;
  uint8_t proto;
  uint8_t ttl;
  uint16_t length;
};

void put16(std::vector<uint8_t>& h, size_t at, uint16_t v) {
  h[at] = static_cast<uint8_t>(v >> 8);
  h[at + 1] = static_cast<uint8_t>(v);
}

void put32(std::vector<uint8_t>& h, size_t at, uint32_t v) {
  put16(h, at, static_cast<uint16_t>(v >> 16));
  put16(h, at + 2, static_cast<uint16_t>(v));
}

std::vector<uint8_t> build_header(const FlowProfile& f, uint32_t index_in_flow) {
  const size_t l4 = f.proto == kTcp ? 20 : 8;
  std::vector<uint8_t> h(20 + l4, 0);
  h[0] = 0x45;
  put16(h, 2, f.length);
  put16(h, 4, static_cast<uint16_t>(index_in_flow));
  put16(h, 6, 0x4000);
  h[8] = f.ttl;
  h[9] = f.proto;
  put32(h, 12, f.src);
  put32(h, 16, f.dst);
  uint32_t sum = 0;
  for (size_t i = 0; i < 20; i += 2) sum += (uint32_t{h[i]} << 8) | h[i + 1];
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  put16(h, 10, static_cast<uint16_t>(~sum));

  put16(h, 20, f.sport);
  put16(h, 22, f.dport);
  if (f.proto == kTcp) {
    put32(h, 24, 1000u + index_in_flow * (f.length - 40u));
    put32(h, 28, index_in_flow == 0 ? 0 : 1);
    h[32] = 0x50;
    h[33] = index_in_flow == 0 ? 0x02 : 0x18;
    put16(h, 34, 65535);
  } else {
    put16(h, 24, static_cast<uint16_t>(f.length - 20));
  }
  return h;
}

}  // namespace

TraceFile generate_zipf(const ZipfParams& params) {
  params.validate();
  const auto sizes = zipf_flow_sizes(params.alpha, params.num_flows, params.num_packets);
  std::mt19937_64 rng(mix64(params.seed));

  std::vector<FlowProfile> flows;
  flows.reserve(sizes.size());
  std::unordered_set<FlowKey, FlowKeyHash> used;
  static constexpr uint16_t kServices[] = {80, 443, 53, 22, 8080, 123, 25, 3306};
  for (size_t r = 0; r < sizes.size(); ++r) {
    // Bulk transfers lean towards TCP/443 with full-size packets, the tail
    // towards short UDP and assorted services.
    const bool bulk = sizes[r] >= 64;
    FlowProfile f{};
    do {
      f.src = ((10u + static_cast<uint32_t>(rng() % 24)) << 24) |
              (static_cast<uint32_t>(rng() % 64) << 16) | (static_cast<uint32_t>(rng() % 256) << 8) |
              static_cast<uint32_t>(rng() % 256);
      f.dst = static_cast<uint32_t>(rng());
      f.sport = static_cast<uint16_t>(1024 + rng() % 64512);
      const bool tcp = bulk ? (rng() % 10 < 9) : (rng() % 10 < 6);
      f.proto = tcp ? kTcp : kUdp;
      f.dport = (bulk && rng() % 10 < 7) ? 443 : kServices[rng() % std::size(kServices)];
      f.key = FlowKey::from_tuple(f.src, f.dst, f.sport, f.dport, f.proto);
    } while (!used.insert(f.key).second);
    f.ttl = static_cast<uint8_t>((rng() % 2 ? 64 : 128) - rng() % 20);
    f.length = static_cast<uint16_t>(bulk ? 1500 - (rng() % 4) * 8 : 60 + rng() % 500);
    flows.push_back(f);
  }

  std::vector<uint32_t> order;
  order.reserve(params.num_packets);
  for (size_t r = 0; r < sizes.size(); ++r) order.insert(order.end(), sizes[r], static_cast<uint32_t>(r));
  std::shuffle(order.begin(), order.end(), rng);

  TraceFile trace;
  trace.rows.reserve(order.size());
  std::vector<uint32_t> seen(flows.size(), 0);
  for (size_t i = 0; i < order.size(); ++i) {
    const FlowProfile& f = flows[order[i]];
    TraceRow row;
    row.ts_us = 10 * static_cast<uint64_t>(i);
    row.src_ip = f.src;
    row.dst_ip = f.dst;
    row.src_port = f.sport;
    row.dst_port = f.dport;
    row.proto = f.proto;
    if (params.with_headers) row.header = build_header(f, seen[order[i]]);
    ++seen[order[i]];
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

}  // namespace llms
