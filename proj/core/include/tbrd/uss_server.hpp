#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "tbrd/net.hpp"
#include "tbrd/uss.hpp"

namespace tbrd::uss {

// Framed TCP front end over a Registry. One thread per connection; the
// registry itself serializes all state access.
class UssServer {
 public:
  UssServer(Registry& registry, const std::string& ip, uint16_t port);
  ~UssServer();

  UssServer(const UssServer&) = delete;
  UssServer& operator=(const UssServer&) = delete;

  uint16_t port() const { return port_; }
  void stop();

 private:
  void accept_loop();

  Registry& registry_;
  net::Socket listener_;
  uint16_t port_;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::vector<std::thread> workers_;
  std::mutex workers_mu_;
};

}  // namespace tbrd::uss
