#include <doctest.h>

#include <numeric>
#include <sstream>

#include "llmsketch/errors.hpp"
#include "llmsketch/trace.hpp"

using namespace llms;

namespace {

void put_le32(std::string& s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::string record(uint32_t sec, uint32_t usec, const std::vector<uint8_t>& frame) {
  std::string s;
  put_le32(s, sec);
  put_le32(s, usec);
  put_le32(s, static_cast<uint32_t>(frame.size()));
  s.append(frame.begin(), frame.end());
  return s;
}

std::vector<uint8_t> udp_frame() {
  std::vector<uint8_t> f(14, 0);
  f[12] = 0x08;
  f[13] = 0x00;
  const uint8_t ip[20] = {0x45, 0, 0, 28, 0, 1, 0, 0, 64, 17, 0, 0, 10, 0, 0, 1, 10, 0, 0, 2};
  f.insert(f.end(), ip, ip + 20);
  const uint8_t udp[8] = {0x30, 0x39, 0x00, 0x35, 0, 8, 0, 0};
  f.insert(f.end(), udp, udp + 8);
  f.push_back(0xaa);  // payload, not part of the stored header
  return f;
}

}  // namespace

TEST_CASE("zipf sizes sum exactly and keep every flow") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    const auto sizes = zipf_flow_sizes(alpha, 1000, 50000);
    CHECK(sizes.size() == 1000);
    CHECK(std::accumulate(sizes.begin(), sizes.end(), uint64_t{0}) == 50000);
    CHECK(*std::min_element(sizes.begin(), sizes.end()) >= 1);
    CHECK(std::is_sorted(sizes.rbegin(), sizes.rend()));
  }
}

TEST_CASE("steep skew concentrates on the top flow") {
  const auto sizes = zipf_flow_sizes(4.0, 1000, 100000);
  CHECK(sizes[0] > 80000);
}

TEST_CASE("generated traces are deterministic per seed") {
  ZipfParams p;
  p.num_flows = 300;
  p.num_packets = 3000;
  p.seed = 5;
  std::ostringstream a, b, c;
  write_trace_csv(generate_zipf(p), a);
  write_trace_csv(generate_zipf(p), b);
  p.seed = 6;
  write_trace_csv(generate_zipf(p), c);
  CHECK(a.str() == b.str());
  CHECK(a.str() != c.str());

  p.seed = 5;
  const auto t = generate_zipf(p);
  CHECK(t.rows.size() == 3000);
  const auto counts = exact_counts(to_packets(t));
  CHECK(counts.size() == 300);
  for (const auto& r : t.rows) CHECK(r.header.size() >= 28);
}

TEST_CASE("csv round-trip") {
  ZipfParams p;
  p.num_flows = 50;
  p.num_packets = 400;
  const auto t = generate_zipf(p);
  std::stringstream ss;
  write_trace_csv(t, ss);
  const auto back = read_trace_csv(ss);
  REQUIRE(back.rows.size() == t.rows.size());
  for (size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(back.rows[i].key() == t.rows[i].key());
    CHECK(back.rows[i].header == t.rows[i].header);
    CHECK(back.rows[i].ts_us == t.rows[i].ts_us);
  }
}

TEST_CASE("csv errors name the row") {
  std::istringstream in(std::string(kTraceHeader) + "\n1,10.0.0.1,10.0.0.2,1,2,6,\n2,10.0.0.1,bogus,1,2,6,\n");
  try {
    read_trace_csv(in);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
  std::istringstream wrong("a,b,c\n");
  CHECK_THROWS_AS(read_trace_csv(wrong), InputError);
  std::istringstream port(std::string(kTraceHeader) + "\n1,10.0.0.1,10.0.0.2,70000,2,6,\n");
  CHECK_THROWS_AS(read_trace_csv(port), InputError);
}

TEST_CASE("pcapish: empty input") {
  std::istringstream in("");
  const auto r = ingest_pcapish(in);
  CHECK(r.trace.rows.empty());
  CHECK(r.skipped == 0);
}

TEST_CASE("pcapish: udp frame and a skipped non-IPv4 frame") {
  auto arp = udp_frame();
  arp[13] = 0x06;
  std::istringstream in(record(1, 5, udp_frame()) + record(2, 0, arp));
  const auto r = ingest_pcapish(in);
  CHECK(r.skipped == 1);
  REQUIRE(r.trace.rows.size() == 1);
  const auto& row = r.trace.rows[0];
  CHECK(row.ts_us == 1000005);
  CHECK(row.src_ip == 0x0a000001);
  CHECK(row.dst_ip == 0x0a000002);
  CHECK(row.src_port == 12345);
  CHECK(row.dst_port == 53);
  CHECK(row.proto == 17);
  CHECK(row.header.size() == 28);
}

TEST_CASE("pcapish: truncation reports the record offset") {
  const auto good = record(1, 0, udp_frame());
  auto cut = record(2, 0, udp_frame());
  cut.resize(cut.size() - 3);
  std::istringstream in(good + cut);
  try {
    ingest_pcapish(in);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("offset " + std::to_string(good.size())) != std::string::npos);
  }
  std::istringstream half(good.substr(0, 7));
  CHECK_THROWS_AS(ingest_pcapish(half), InputError);
}
