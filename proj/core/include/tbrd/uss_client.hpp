#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tbrd/uss.hpp"

namespace tbrd::uss {

struct Ack {
  bool ok = false;
  std::string handle;  // set on successful register
  std::string error;
};

// Client-side view of the USS. Every call returns nullopt on transport
// failure so callers can retry; protocol-level rejections come back as
// Ack{ok=false} / QueryResponse.
class UssClient {
 public:
  virtual ~UssClient() = default;
  virtual std::optional<Ack> register_mission(const RegistrationRequest& req) = 0;
  virtual std::optional<Ack> report_start(const std::string& handle, int64_t t0_ms) = 0;
  virtual std::optional<Ack> report_end(const std::string& handle, int64_t t_end_ms) = 0;
  virtual std::optional<Ack> revoke(const std::string& handle) = 0;
  virtual std::optional<QueryResponse> query(const ObserverQuery& q) = 0;
};

// In-process client over a Registry; never fails transport. Used by the
// simulator and by tests.
class LocalUssClient final : public UssClient {
 public:
  explicit LocalUssClient(Registry& reg) : reg_(reg) {}
  std::optional<Ack> register_mission(const RegistrationRequest& req) override;
  std::optional<Ack> report_start(const std::string& handle, int64_t t0_ms) override;
  std::optional<Ack> report_end(const std::string& handle, int64_t t_end_ms) override;
  std::optional<Ack> revoke(const std::string& handle) override;
  std::optional<QueryResponse> query(const ObserverQuery& q) override;

 private:
  Registry& reg_;
};

// Framed-TCP client; opens a connection per call.
class TcpUssClient final : public UssClient {
 public:
  TcpUssClient(std::string host, uint16_t port)
      : host_(std::move(host)), port_(port) {}
  std::optional<Ack> register_mission(const RegistrationRequest& req) override;
  std::optional<Ack> report_start(const std::string& handle, int64_t t0_ms) override;
  std::optional<Ack> report_end(const std::string& handle, int64_t t_end_ms) override;
  std::optional<Ack> revoke(const std::string& handle) override;
  std::optional<QueryResponse> query(const ObserverQuery& q) override;

 private:
  std::optional<std::string> round_trip(const std::string& request_json);

  std::string host_;
  uint16_t port_;
};

// Parses "host:port"; throws std::invalid_argument on malformed input.
std::pair<std::string, uint16_t> parse_endpoint(const std::string& endpoint);

}  // namespace tbrd::uss
