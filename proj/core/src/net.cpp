#include "tbrd/net.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace tbrd::net {

namespace {
[[noreturn]] void fail(const std::string& what) {
  throw NetError(what + ": " + std::strerror(errno));
}

sockaddr_in make_addr(const std::string& ip, uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (ip.empty() || ip == "0.0.0.0") {
    addr.sin_addr.s_addr = INADDR_ANY;
  } else if (inet_pton(AF_INET, ip.c_str(), &addr.sin_addr) != 1) {
    throw NetError("bad IPv4 address: " + ip);
  }
  return addr;
}
}  // namespace

Socket::~Socket() { close(); }

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

Socket tcp_listen(const std::string& ip, uint16_t port, int backlog) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) fail("socket");
  Socket s(fd);
  int one = 1;
  setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = make_addr(ip, port);
  if (bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) fail("bind");
  if (listen(fd, backlog) != 0) fail("listen");
  return s;
}

uint16_t local_port(const Socket& s) {
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  if (getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0) fail("getsockname");
  return ntohs(addr.sin_port);
}

Socket tcp_accept(const Socket& listener) {
  int fd = ::accept(listener.fd(), nullptr, nullptr);
  return Socket(fd);  // invalid when the listener was shut down
}

Socket tcp_connect(const std::string& host, uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) fail("socket");
  Socket s(fd);
  sockaddr_in addr = make_addr(host.empty() ? "127.0.0.1" : host, port);
  if (addr.sin_addr.s_addr == INADDR_ANY) addr = make_addr("127.0.0.1", port);
  if (connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) fail("connect");
  int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return s;
}

static bool read_exact(int fd, uint8_t* buf, size_t len) {
  size_t got = 0;
  while (got < len) {
    ssize_t r = ::read(fd, buf + got, len - got);
    if (r == 0) return false;
    if (r < 0) {
      if (errno == EINTR) continue;
      fail("read");
    }
    got += static_cast<size_t>(r);
  }
  return true;
}

bool read_frame(int fd, std::string& out, size_t max_len) {
  uint8_t hdr[4];
  if (!read_exact(fd, hdr, 1)) return false;  // clean EOF only before byte 0
  if (!read_exact(fd, hdr + 1, 3)) throw NetError("truncated frame header");
  uint32_t len = (static_cast<uint32_t>(hdr[0]) << 24) | (static_cast<uint32_t>(hdr[1]) << 16) |
                 (static_cast<uint32_t>(hdr[2]) << 8) | hdr[3];
  if (len > max_len) throw NetError("frame too large");
  out.resize(len);
  if (len > 0 && !read_exact(fd, reinterpret_cast<uint8_t*>(out.data()), len)) {
    throw NetError("truncated frame body");
  }
  return true;
}

void write_frame(int fd, std::string_view payload) {
  uint32_t len = static_cast<uint32_t>(payload.size());
  uint8_t hdr[4] = {static_cast<uint8_t>(len >> 24), static_cast<uint8_t>(len >> 16),
                    static_cast<uint8_t>(len >> 8), static_cast<uint8_t>(len)};
  std::string buf(reinterpret_cast<char*>(hdr), 4);
  buf.append(payload);
  size_t sent = 0;
  while (sent < buf.size()) {
    ssize_t r = ::write(fd, buf.data() + sent, buf.size() - sent);
    if (r < 0) {
      if (errno == EINTR) continue;
      fail("write");
    }
    sent += static_cast<size_t>(r);
  }
}

Socket udp_broadcast_socket() {
  int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd < 0) fail("socket");
  Socket s(fd);
  int one = 1;
  if (setsockopt(fd, SOL_SOCKET, SO_BROADCAST, &one, sizeof(one)) != 0) fail("SO_BROADCAST");
  return s;
}

void udp_send(const Socket& s, const std::string& host, uint16_t port,
              std::span<const uint8_t> data) {
  sockaddr_in addr = make_addr(host, port);
  ssize_t r = ::sendto(s.fd(), data.data(), data.size(), 0,
                       reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
  if (r < 0) fail("sendto");
}

Socket udp_bind(const std::string& ip, uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd < 0) fail("socket");
  Socket s(fd);
  int one = 1;
  setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = make_addr(ip, port);
  if (bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) fail("bind");
  return s;
}

bool udp_recv(const Socket& s, Bytes& out, int timeout_ms) {
  pollfd pfd{s.fd(), POLLIN, 0};
  int pr = ::poll(&pfd, 1, timeout_ms);
  if (pr < 0) fail("poll");
  if (pr == 0) return false;
  out.resize(2048);
  ssize_t r = ::recvfrom(s.fd(), out.data(), out.size(), 0, nullptr, nullptr);
  if (r < 0) fail("recvfrom");
  out.resize(static_cast<size_t>(r));
  return true;
}

}  // namespace tbrd::net
