#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstring>

#include "llmsketch/classifier.hpp"
#include "llmsketch/errors.hpp"

namespace llms {

RemoteBackend::RemoteBackend(std::string address, int timeout_ms)
    : address_(std::move(address)), timeout_ms_(timeout_ms) {
  if (address_.rfind(':') == std::string::npos)
    throw ConfigError("remote address must be host:port, got '" + address_ + "'");
}

RemoteBackend::~RemoteBackend() {
  std::lock_guard lk(mu_);
  close_locked();
}

void RemoteBackend::close_locked() const {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
  pending_.clear();
}

void RemoteBackend::connect_locked() const {
  const auto colon = address_.rfind(':');
  const std::string host = address_.substr(0, colon);
  const std::string port = address_.substr(colon + 1);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0)
    throw ClassifierError("cannot resolve " + address_ + ": " + ::gai_strerror(rc));
  int fd = -1;
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw ClassifierError("cannot connect to " + address_);
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  fd_ = fd;
}

std::string RemoteBackend::roundtrip_locked(const std::string& line) const {
  if (fd_ < 0) connect_locked();
  const std::string msg = line + "\n";
  size_t sent = 0;
  while (sent < msg.size()) {
    const ssize_t n = ::send(fd_, msg.data() + sent, msg.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ClassifierError("send to " + address_ + " failed: " + std::strerror(errno));
    }
    sent += static_cast<size_t>(n);
  }
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms_);
  for (;;) {
    if (auto nl = pending_.find('\n'); nl != std::string::npos) {
      std::string reply = pending_.substr(0, nl);
      pending_.erase(0, nl + 1);
      if (!reply.empty() && reply.back() == '\r') reply.pop_back();
      return reply;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw ClassifierError("timeout waiting for " + address_);
    pollfd pfd{fd_, POLLIN, 0};
    const int pr = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (pr < 0 && errno == EINTR) continue;
    if (pr <= 0) throw ClassifierError("timeout waiting for " + address_);
    char buf[512];
    const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
    if (n <= 0) throw ClassifierError("connection to " + address_ + " closed");
    pending_.append(buf, static_cast<size_t>(n));
  }
}

ClassifierScore RemoteBackend::classify(const PacketRecord& pkt) const {
  std::lock_guard lk(mu_);
  std::string reply;
  try {
    reply = roundtrip_locked(to_hex(pkt.header_bytes));
  } catch (const ClassifierError&) {
    // A late reply would desynchronize the stream; start over next time.
    close_locked();
    throw;
  }
  double v = 0;
  auto [p, ec] = std::from_chars(reply.data(), reply.data() + reply.size(), v);
  if (ec != std::errc{} || p != reply.data() + reply.size() || !(v >= 0 && v <= 1))
    throw ClassifierError("remote classifier replied '" + reply + "'");
  return ClassifierScore(v);
}

}  // namespace llms
