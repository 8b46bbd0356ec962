#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "tbrd/bytes.hpp"

// Thin POSIX socket helpers: framed TCP (4-byte big-endian length prefix +
// payload) for the USS protocol, plus UDP datagram broadcast for packs.
namespace tbrd::net {

struct NetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket();
  Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void close();

 private:
  int fd_ = -1;
};

Socket tcp_listen(const std::string& ip, uint16_t port, int backlog = 32);
uint16_t local_port(const Socket& s);
Socket tcp_accept(const Socket& listener);  // invalid socket once closed
Socket tcp_connect(const std::string& host, uint16_t port);

// Framed I/O. read_frame returns false on clean EOF before a length prefix.
bool read_frame(int fd, std::string& out, size_t max_len = 1 << 20);
void write_frame(int fd, std::string_view payload);

Socket udp_broadcast_socket();
void udp_send(const Socket& s, const std::string& host, uint16_t port,
              std::span<const uint8_t> data);
Socket udp_bind(const std::string& ip, uint16_t port);
// Returns false on timeout.
bool udp_recv(const Socket& s, Bytes& out, int timeout_ms);

}  // namespace tbrd::net
