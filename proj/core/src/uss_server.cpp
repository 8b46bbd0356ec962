#include "tbrd/uss_server.hpp"

#include <sys/socket.h>

namespace tbrd::uss {

UssServer::UssServer(Registry& registry, const std::string& ip, uint16_t port)
    : registry_(registry), listener_(net::tcp_listen(ip, port)) {
  port_ = net::local_port(listener_);
  accept_thread_ = std::thread([this] { accept_loop(); });
}

UssServer::~UssServer() { stop(); }

void UssServer::stop() {
  bool expected = false;
  if (!stopping_.compare_exchange_strong(expected, true)) return;
  ::shutdown(listener_.fd(), SHUT_RDWR);
  listener_.close();
  if (accept_thread_.joinable()) accept_thread_.join();
  std::lock_guard lk(workers_mu_);
  for (auto& w : workers_) {
    if (w.joinable()) w.join();
  }
  workers_.clear();
}

void UssServer::accept_loop() {
  while (!stopping_.load()) {
    net::Socket conn = net::tcp_accept(listener_);
    if (!conn.valid()) break;  // listener closed
    std::lock_guard lk(workers_mu_);
    workers_.emplace_back([this, c = std::move(conn)]() mutable {
      try {
        std::string req;
        while (net::read_frame(c.fd(), req)) {
          net::write_frame(c.fd(), handle_request(registry_, req));
        }
      } catch (const std::exception&) {
        // connection error: drop the session, registry state is untouched
      }
    });
  }
}

}  // namespace tbrd::uss
