// The broadcast transmitter: one authenticated Message Pack per interval
// from a keys file and a telemetry source, honoring the permitted
// transmission window. Packs go to UDP broadcast (-u) or stdout as hex.
//
// INI config keys (see --config, default tx_config.ini):
//   keys=keys.txt            transmitter keys file from tbrd-provision
//   telemetry=flight.csv     scripted telemetry (omit for --static)
//   duration-s=60            static-mode flight length
//   guard-ms=100             window tail guard E
//   udp-addr=255.255.255.255
//   udp-port=3411
//   uss=127.0.0.1:5555       report start/end when handle is set
//   handle=m-1

#include <iostream>

#include "CLI11.hpp"
#include "tbrd/clock.hpp"
#include "tbrd/transmitter.hpp"
#include "tbrd/uss_client.hpp"

using namespace tbrd;

namespace {

class HexStdoutSink final : public tx::PacketSink {
 public:
  bool send(std::span<const uint8_t> pack, int64_t t_ms) override {
    std::cout << t_ms << " " << to_hex(pack) << "\n";
    return true;
  }
};

class TeeSink final : public tx::PacketSink {
 public:
  TeeSink(tx::PacketSink& a, tx::PacketSink* b) : a_(a), b_(b) {}
  bool send(std::span<const uint8_t> pack, int64_t t_ms) override {
    bool ok = a_.send(pack, t_ms);
    if (b_) b_->send(pack, t_ms);
    return ok;
  }

 private:
  tx::PacketSink& a_;
  tx::PacketSink* b_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TBRD broadcast transmitter"};

  bool use_static = false, verbose = false, use_udp = false;
  app.add_flag("--static,-s", use_static, "Use static data");
  app.add_flag("--verbose,-v", verbose, "Enable verbose output");
  app.add_flag("--udp,-u", use_udp, "Broadcast TBRD over UDP");
  app.set_config("--config,-c", "tx_config.ini", "Path to configuration file");

  std::string keys_path = "keys.txt", telemetry_path, uss_endpoint, handle;
  std::string udp_addr = "255.255.255.255";
  uint16_t udp_port = 3411;
  int64_t duration_s = 60, guard_ms = 100;
  app.add_option("--keys", keys_path, "Keys file");
  app.add_option("--telemetry", telemetry_path, "Telemetry CSV for scripted flights");
  app.add_option("--duration-s", duration_s, "Static-mode flight length");
  app.add_option("--guard-ms", guard_ms, "Permitted-window tail guard E");
  app.add_option("--udp-addr", udp_addr, "UDP broadcast address");
  app.add_option("--udp-port", udp_port, "UDP destination port");
  app.add_option("--uss", uss_endpoint, "USS endpoint host:port");
  app.add_option("--handle", handle, "Mission handle for start/end reports");

  CLI11_PARSE(app, argc, argv);

  try {
    KeysFile keys = load_keys_file(keys_path);
    if (verbose) {
      std::cerr << "loaded " << keys.keys.size() << " keys for " << keys.uas_id << "\n";
    }

    std::unique_ptr<TelemetrySource> telemetry;
    if (use_static || telemetry_path.empty()) {
      TelemetrySample sample;
      sample.lat_deg = 42.3398;
      sample.lon_deg = -71.0892;
      sample.alt_m = 30.0;
      sample.operator_lat_deg = 42.3398;
      sample.operator_lon_deg = -71.0892;
      telemetry = std::make_unique<StaticTelemetry>(sample);
    } else {
      telemetry = std::make_unique<ScriptTelemetry>(
          ScriptTelemetry::from_csv(telemetry_path));
    }

    HexStdoutSink hex_sink;
    std::unique_ptr<tx::UdpSink> udp_sink;
    if (use_udp) udp_sink = std::make_unique<tx::UdpSink>(udp_addr, udp_port);

    tx::PacketSink* primary = udp_sink ? static_cast<tx::PacketSink*>(udp_sink.get())
                                       : &hex_sink;
    TeeSink sink(*primary, use_udp && verbose ? &hex_sink : nullptr);

    std::unique_ptr<uss::TcpUssClient> uss;
    if (!uss_endpoint.empty()) {
      auto [host, port] = uss::parse_endpoint(uss_endpoint);
      uss = std::make_unique<uss::TcpUssClient>(host, port);
    }

    tx::TxOptions options;
    options.window.guard_ms = guard_ms;
    options.uss_handle = handle;
    options.verbose = verbose;
    if (use_static || telemetry_path.empty()) options.max_intervals = duration_s;

    WallClock clock;
    tx::TxResult result =
        tx::run_transmitter(keys, *telemetry, sink, clock, options, uss.get());

    int sent = 0, skipped = 0;
    for (const auto& e : result.log) {
      if (e.transmitted) ++sent;
      else ++skipped;
      if (verbose && !e.note.empty()) {
        std::cerr << "interval " << e.interval << ": " << e.note << "\n";
      }
    }
    std::cerr << "transmitted " << sent << " packs, skipped " << skipped
              << ", t0=" << result.t0_ms << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
