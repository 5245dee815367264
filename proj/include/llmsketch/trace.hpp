#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "llmsketch/classifier.hpp"
#include "llmsketch/flow_key.hpp"

namespace llms {

// One CSV row: ts_us,src_ip,dst_ip,src_port,dst_port,proto,header_hex
struct TraceRow {
  uint64_t ts_us = 0;
  uint32_t src_ip = 0;
  uint32_t dst_ip = 0;
  uint16_t src_port = 0;
  uint16_t dst_port = 0;
  uint8_t proto = 0;
  std::vector<uint8_t> header;  // may be empty

  FlowKey key() const { return FlowKey::from_tuple(src_ip, dst_ip, src_port, dst_port, proto); }
};

struct TraceFile {
  std::vector<TraceRow> rows;
};

inline constexpr const char* kTraceHeader =
    "ts_us,src_ip,dst_ip,src_port,dst_port,proto,header_hex";

// Throws InputError naming the offending row (1-based, header = row 1).
TraceFile read_trace_csv(const std::filesystem::path& path);
TraceFile read_trace_csv(std::istream& in, const std::string& name = "<stream>");
void write_trace_csv(const TraceFile& trace, std::ostream& out);
// Throws InputError if the file cannot be written.
void write_trace_csv(const TraceFile& trace, const std::filesystem::path& path);

std::vector<PacketRecord> to_packets(const TraceFile& trace);

// Exact per-flow packet counts (ground truth).
FlowSizeMap exact_counts(const std::vector<PacketRecord>& packets);

struct ZipfParams {
  double alpha = 1.0;
  uint64_t num_flows = 20000;
  uint64_t num_packets = 200000;
  uint64_t seed = 1;
  bool with_headers = true;

  // Throws ConfigError.
  void validate() const;
};

// Flow sizes for ranks 1..F: largest-remainder rounding of P * r^-alpha / Z
// with every flow holding at least one packet; sums to exactly P.
std::vector<uint64_t> zipf_flow_sizes(double alpha, uint64_t num_flows, uint64_t num_packets);

// Deterministic for a given params (including seed): synthesized distinct
// 5-tuples, Zipf flow sizes, packets shuffled with the same seed.
TraceFile generate_zipf(const ZipfParams& params);

struct IngestResult {
  TraceFile trace;
  uint64_t skipped = 0;
};

// Reads a minimal packet dump: records of little-endian u32 ts_sec, u32
// ts_usec, u32 caplen followed by caplen bytes of Ethernet II frame.
// Non-IPv4 frames (and frames too short for an IPv4 header) are skipped and
// counted. Throws InputError with the byte offset on a truncated record.
IngestResult ingest_pcapish(const std::filesystem::path& path);
IngestResult ingest_pcapish(std::istream& in);

}  // namespace llms
