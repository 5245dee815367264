#include "llmsketch/trace.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "llmsketch/errors.hpp"

namespace llms {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (;;) {
    const size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
T parse_uint(std::string_view s, uint64_t max, const char* what) {
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty() || v > max)
    throw InputError(std::string("invalid ") + what + " '" + std::string(s) + "'");
  return static_cast<T>(v);
}

}  // namespace

TraceFile read_trace_csv(std::istream& in, const std::string& name) {
  TraceFile trace;
  std::string line;
  if (!std::getline(in, line)) throw InputError(name + ": empty file, header row required");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader)
    throw InputError(name + ": row 1: header must be '" + std::string(kTraceHeader) + "'");
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      const auto f = split(line, ',');
      if (f.size() != 7) throw InputError("expected 7 columns, got " + std::to_string(f.size()));
      TraceRow r;
      r.ts_us = parse_uint<uint64_t>(f[0], UINT64_MAX, "timestamp");
      r.src_ip = parse_ipv4(f[1]);
      r.dst_ip = parse_ipv4(f[2]);
      r.src_port = parse_uint<uint16_t>(f[3], 65535, "src_port");
      r.dst_port = parse_uint<uint16_t>(f[4], 65535, "dst_port");
      r.proto = parse_uint<uint8_t>(f[5], 255, "proto");
      r.header = from_hex(f[6]);
      trace.rows.push_back(std::move(r));
    } catch (const InputError& e) {
      throw InputError(name + ": row " + std::to_string(row) + ": " + e.what());
    }
  }
  return trace;
}

TraceFile read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trace " + path.string());
  return read_trace_csv(in, path.string());
}

void write_trace_csv(const TraceFile& trace, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.rows) {
    out << r.ts_us << ',' << ipv4_to_string(r.src_ip) << ',' << ipv4_to_string(r.dst_ip) << ','
        << r.src_port << ',' << r.dst_port << ',' << unsigned{r.proto} << ',' << to_hex(r.header)
        << '\n';
  }
}

void write_trace_csv(const TraceFile& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  write_trace_csv(trace, out);
  if (!out) throw InputError("write to " + path.string() + " failed");
}

std::vector<PacketRecord> to_packets(const TraceFile& trace) {
  std::vector<PacketRecord> out;
  out.reserve(trace.rows.size());
  for (const auto& r : trace.rows) out.push_back(make_packet(r.key(), r.header, r.ts_us));
  return out;
}

FlowSizeMap exact_counts(const std::vector<PacketRecord>& packets) {
  FlowSizeMap counts;
  for (const auto& p : packets) ++counts[p.key];
  return counts;
}

}  // namespace llms
