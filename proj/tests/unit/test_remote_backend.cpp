#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <string>
#include <thread>

#include "llmsketch/classifier.hpp"
#include "llmsketch/errors.hpp"
#include "support.hpp"

using namespace llms;

namespace {

// Loopback stand-in for the scoring server: replies with (first byte)/255,
// "ERR" for lines that are not hex, a non-number for "ee00", and sleeps past
// the client timeout for "dd00" (one-byte headers are zero-padded).
class FakeServer {
 public:
  FakeServer() {
    lfd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    int one = 1;
    ::setsockopt(lfd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in a{};
    a.sin_family = AF_INET;
    a.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    a.sin_port = 0;
    REQUIRE(::bind(lfd_, reinterpret_cast<sockaddr*>(&a), sizeof a) == 0);
    REQUIRE(::listen(lfd_, 4) == 0);
    socklen_t len = sizeof a;
    ::getsockname(lfd_, reinterpret_cast<sockaddr*>(&a), &len);
    port_ = ntohs(a.sin_port);
    th_ = std::thread([this] { serve(); });
  }
  ~FakeServer() {
    stop_ = true;
    ::shutdown(lfd_, SHUT_RDWR);
    ::close(lfd_);
    th_.join();
  }
  std::string address() const { return "127.0.0.1:" + std::to_string(port_); }
  int connections() const { return conns_; }

 private:
  void serve() {
    while (!stop_) {
      const int fd = ::accept(lfd_, nullptr, nullptr);
      if (fd < 0) return;
      ++conns_;
      std::string buf;
      char tmp[256];
      for (;;) {
        const ssize_t n = ::recv(fd, tmp, sizeof tmp, 0);
        if (n <= 0) break;
        buf.append(tmp, static_cast<size_t>(n));
        size_t nl;
        while ((nl = buf.find('\n')) != std::string::npos) {
          const std::string line = buf.substr(0, nl);
          buf.erase(0, nl + 1);
          std::string out;
          if (line == "dd00") {
            std::this_thread::sleep_for(std::chrono::milliseconds(120));
            out = "0.5\n";
          } else if (line == "ee00") {
            out = "banana\n";
          } else {
            try {
              const auto bytes = from_hex(line);
              out = std::to_string(bytes.empty() ? 0.0 : bytes[0] / 255.0) + "\n";
            } catch (const InputError&) {
              out = "ERR\n";
            }
          }
          ::send(fd, out.data(), out.size(), MSG_NOSIGNAL);
        }
      }
      ::close(fd);
    }
  }

  int lfd_ = -1;
  uint16_t port_ = 0;
  std::atomic<bool> stop_{false};
  std::atomic<int> conns_{0};
  std::thread th_;
};

PacketRecord with_header(std::vector<uint8_t> h) { return make_packet(test::key_n(1), std::move(h), 0); }

}  // namespace

TEST_CASE("remote backend sustains many request/response cycles") {
  FakeServer srv;
  RemoteBackend be(srv.address(), 50);
  for (int i = 0; i < 1000; ++i) {
    const uint8_t b = static_cast<uint8_t>(i % 256);
    CHECK(be.classify(with_header({b, 0x01})).value() == doctest::Approx(b / 255.0).epsilon(1e-6));
  }
  CHECK(srv.connections() == 1);
}

TEST_CASE("bad replies and timeouts raise ClassifierError and recover") {
  FakeServer srv;
  RemoteBackend be(srv.address(), 50);
  CHECK_THROWS_AS(be.classify(with_header({0xee})), ClassifierError);
  CHECK(be.classify(with_header({0xff})).value() == doctest::Approx(1.0));
  CHECK_THROWS_AS(be.classify(with_header({0xdd})), ClassifierError);
  // The late reply goes to the dropped connection; the next call reconnects
  // once the single-threaded server is free again.
  std::this_thread::sleep_for(std::chrono::milliseconds(150));
  CHECK(be.classify(with_header({0x00})).value() == 0.0);
  CHECK(srv.connections() >= 2);
}

TEST_CASE("unreachable or malformed addresses") {
  CHECK_THROWS_AS(RemoteBackend("nocolon"), ConfigError);
  RemoteBackend be("127.0.0.1:1", 50);
  CHECK_THROWS_AS(be.classify(with_header({1})), ClassifierError);
}
