// The receiver/verifier: listens for packs over UDP (-u) or reads
// "<t_ms> <hex>" lines from stdin, buffers them until key disclosure and
// emits line-delimited JSON verdict records.
//
// INI config keys (see --config, default rx_config.ini):
//   uss=127.0.0.1:5555
//   observer-id=OBSERVER
//   udp-addr=0.0.0.0
//   udp-port=3411
//   max-skew-ms=10

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tbrd/clock.hpp"
#include "tbrd/net.hpp"
#include "tbrd/uss_client.hpp"
#include "tbrd/verifier.hpp"

using namespace tbrd;

int main(int argc, char** argv) {
  CLI::App app{"TBRD receiver and verifier"};

  bool verbose = false, use_udp = false;
  app.add_flag("--verbose,-v", verbose, "Enable verbose output");
  app.add_flag("--udp,-u", use_udp, "Sniff UDP instead of stdin");
  app.set_config("--config,-c", "rx_config.ini", "Path to configuration file");

  std::string uss_endpoint = "127.0.0.1:5555", observer_id = "OBSERVER";
  std::string udp_addr = "0.0.0.0", out_path;
  uint16_t udp_port = 3411;
  int64_t max_skew_ms = 10, idle_timeout_s = 0;
  app.add_option("--uss", uss_endpoint, "USS endpoint host:port");
  app.add_option("--observer-id", observer_id, "Observer identity for USS queries");
  app.add_option("--udp-addr", udp_addr, "UDP bind address");
  app.add_option("--udp-port", udp_port, "UDP listen port");
  app.add_option("--max-skew-ms", max_skew_ms, "Receiver clock skew bound");
  app.add_option("--out", out_path, "Write verdict records here instead of stdout");
  app.add_option("--idle-timeout-s", idle_timeout_s,
                 "Exit after this long without traffic (0 = run forever)");

  CLI11_PARSE(app, argc, argv);

  try {
    auto [host, port] = uss::parse_endpoint(uss_endpoint);
    uss::TcpUssClient uss(host, port);

    verify::Verifier::Config config;
    config.observer_id = observer_id;
    config.max_skew_ms = max_skew_ms;
    verify::Verifier verifier(config, uss);

    std::ofstream out_file;
    if (!out_path.empty()) out_file.open(out_path, std::ios::trunc);
    std::ostream& out = out_path.empty() ? std::cout : out_file;

    auto emit = [&](const std::vector<verify::VerdictEvent>& events) {
      for (const auto& ev : events) {
        if (!verbose && !verify::is_terminal(ev.verdict.outcome)) continue;
        out << verify::to_json_line(ev.verdict) << "\n";
      }
      out.flush();
    };

    WallClock clock;
    if (use_udp) {
      net::Socket socket = net::udp_bind(udp_addr, udp_port);
      if (verbose) std::cerr << "listening on " << udp_addr << ":" << udp_port << "\n";
      int64_t last_traffic = clock.now_ms();
      Bytes pack;
      while (true) {
        if (net::udp_recv(socket, pack, 500)) {
          last_traffic = clock.now_ms();
          emit(verifier.ingest(pack, clock.now_ms()));
        } else {
          emit(verifier.retry_uss());
          if (idle_timeout_s > 0 &&
              clock.now_ms() - last_traffic > idle_timeout_s * 1000) {
            break;
          }
        }
      }
    } else {
      std::string line;
      while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        int64_t t_ms;
        std::string hex;
        if (!(row >> t_ms >> hex)) {
          std::cerr << "bad input line: " << line << "\n";
          continue;
        }
        emit(verifier.ingest(from_hex(hex), t_ms));
      }
      emit(verifier.retry_uss());
    }

    if (verbose) std::cerr << verifier.pending_count() << " packs still pending\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
