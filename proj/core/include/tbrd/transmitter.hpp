#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tbrd/bytes.hpp"
#include "tbrd/clock.hpp"
#include "tbrd/keys_file.hpp"
#include "tbrd/net.hpp"
#include "tbrd/odid.hpp"
#include "tbrd/telemetry.hpp"
#include "tbrd/uss_client.hpp"

// Builds one authenticated Message Pack per interval and enforces the
// permitted transmission window; keys exhausted -> unauthenticated packs.
namespace tbrd::tx {

// Tail guard E within each interval: transmission is permitted only during
// [interval start, interval end - guard_ms).
struct TxWindow {
  int64_t guard_ms = 100;
};

struct TransmitLogEntry {
  int64_t interval = 0;
  int64_t t_ms = 0;  // transmit time, or the skip decision time
  bool transmitted = false;
  bool authenticated = false;
  std::string note;
};

class PacketSink {
 public:
  virtual ~PacketSink() = default;
  // Returns false on a channel failure (logged, retried next interval).
  virtual bool send(std::span<const uint8_t> pack, int64_t t_ms) = 0;
};

class CollectSink final : public PacketSink {
 public:
  struct Sent {
    Bytes pack;
    int64_t t_ms;
  };
  bool send(std::span<const uint8_t> pack, int64_t t_ms) override {
    sent.push_back({Bytes(pack.begin(), pack.end()), t_ms});
    return true;
  }
  std::vector<Sent> sent;
};

class UdpSink final : public PacketSink {
 public:
  UdpSink(std::string host, uint16_t port);
  bool send(std::span<const uint8_t> pack, int64_t t_ms) override;

 private:
  net::Socket socket_;
  std::string host_;
  uint16_t port_;
};

// One pack for interval i: auth payload over the four data frames, MAC under
// K'_i, bundle disclosing K_{i-d}. Requires 1 <= i <= n-1 and i - d >= 0.
odid::MessagePack build_beacon(int64_t i, const TelemetrySample& telemetry,
                               const KeysFile& keys, uint32_t auth_timestamp_s = 0);

// Unauthenticated fallback pack (4 frames, no auth pages).
odid::MessagePack build_plain_beacon(const TelemetrySample& telemetry,
                                     const KeysFile& keys);

struct TxOptions {
  TxWindow window;
  int64_t max_intervals = 0;  // 0 = run until the telemetry source ends
  std::string uss_handle;     // when set with a client, reports mission start/end
  bool verbose = false;
};

struct TxResult {
  int64_t t0_ms = 0;  // actual first-broadcast time
  std::vector<TransmitLogEntry> log;
};

// The transmit loop. Timing comes from the injected clock, so tests and the
// simulator run it on virtual time.
TxResult run_transmitter(const KeysFile& keys, TelemetrySource& telemetry,
                         PacketSink& sink, Clock& clock, const TxOptions& options,
                         uss::UssClient* uss = nullptr);

}  // namespace tbrd::tx
