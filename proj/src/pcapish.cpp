#include <algorithm>
#include <fstream>
#include <istream>

#include "llmsketch/errors.hpp"
#include "llmsketch/trace.hpp"

namespace llms {

namespace {

constexpr size_t kEthHeader = 14;
constexpr uint16_t kEtherIpv4 = 0x0800;
constexpr uint32_t kMaxCaplen = 262144;

uint32_t le32(const uint8_t* p) {
  return uint32_t{p[0]} | (uint32_t{p[1]} << 8) | (uint32_t{p[2]} << 16) | (uint32_t{p[3]} << 24);
}

uint16_t be16(const uint8_t* p) { return static_cast<uint16_t>((p[0] << 8) | p[1]); }
uint32_t be32(const uint8_t* p) {
  return (uint32_t{p[0]} << 24) | (uint32_t{p[1]} << 16) | (uint32_t{p[2]} << 8) | p[3];
}

// Fills `row` from an Ethernet frame; false if the frame is not usable IPv4.
bool parse_frame(const std::vector<uint8_t>& frame, TraceRow& row) {
  if (frame.size() < kEthHeader + 20) return false;
  if (be16(frame.data() + 12) != kEtherIpv4) return false;
  const uint8_t* ip = frame.data() + kEthHeader;
  const size_t avail = frame.size() - kEthHeader;
  if ((ip[0] >> 4) != 4) return false;
  const size_t ihl = static_cast<size_t>(ip[0] & 0x0f) * 4;
  if (ihl < 20 || ihl > avail) return false;

  row.proto = ip[9];
  row.src_ip = be32(ip + 12);
  row.dst_ip = be32(ip + 16);
  row.src_port = 0;
  row.dst_port = 0;
  size_t l4_len = 0;
  const uint16_t frag_offset = be16(ip + 6) & 0x1fff;
  if ((row.proto == 6 || row.proto == 17) && frag_offset == 0) {
    const uint8_t* l4 = ip + ihl;
    const size_t l4_avail = avail - ihl;
    if (l4_avail >= 4) {
      row.src_port = be16(l4);
      row.dst_port = be16(l4 + 2);
    }
    if (row.proto == 6)
      l4_len = l4_avail >= 13 ? std::min(l4_avail, size_t{(l4[12] >> 4) * 4u}) : l4_avail;
    else
      l4_len = std::min<size_t>(l4_avail, 8);
  }
  row.header.assign(ip, ip + ihl + l4_len);
  return true;
}

}  // namespace

IngestResult ingest_pcapish(std::istream& in) {
  IngestResult out;
  uint64_t offset = 0;
  for (;;) {
    uint8_t hdr[12];
    in.read(reinterpret_cast<char*>(hdr), sizeof hdr);
    const auto got = static_cast<size_t>(in.gcount());
    if (got == 0) break;
    if (got < sizeof hdr)
      throw InputError("truncated record header at offset " + std::to_string(offset));
    const uint32_t ts_sec = le32(hdr);
    const uint32_t ts_usec = le32(hdr + 4);
    const uint32_t caplen = le32(hdr + 8);
    if (caplen > kMaxCaplen)
      throw InputError("implausible caplen " + std::to_string(caplen) + " at offset " +
                       std::to_string(offset));
    std::vector<uint8_t> frame(caplen);
    in.read(reinterpret_cast<char*>(frame.data()), caplen);
    if (static_cast<size_t>(in.gcount()) != caplen)
      throw InputError("truncated record body at offset " + std::to_string(offset) + " (caplen " +
                       std::to_string(caplen) + ")");
    TraceRow row;
    row.ts_us = uint64_t{ts_sec} * 1000000 + ts_usec;
    if (parse_frame(frame, row))
      out.trace.rows.push_back(std::move(row));
    else
      ++out.skipped;
    offset += sizeof hdr + caplen;
  }
  return out;
}

IngestResult ingest_pcapish(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return ingest_pcapish(in);
}

}  // namespace llms
