// The USS verification server: framed TCP front end over the mission
// registry, with optional snapshot persistence across restarts.

#include <csignal>
#include <iostream>

#include "CLI11.hpp"
#include "tbrd/uss.hpp"
#include "tbrd/uss_server.hpp"

using namespace tbrd;

namespace {
volatile std::sig_atomic_t g_stop = 0;
void handle_signal(int) { g_stop = 1; }
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TBRD USS verification server"};

  std::string ip = "0.0.0.0";
  uint16_t port = 5555;
  std::string snapshot_path;
  app.add_option("--ip", ip, "IP address to bind to");
  app.add_option("--port", port, "Port to bind to");
  app.add_option("--snapshot", snapshot_path, "Registry snapshot file");

  CLI11_PARSE(app, argc, argv);

  uss::Registry registry;
  try {
    if (!snapshot_path.empty()) {
      if (std::filesystem::exists(snapshot_path)) {
        registry.restore(snapshot_path);
        std::cout << "restored " << registry.records().size() << " missions from "
                  << snapshot_path << std::endl;
      }
      registry.set_snapshot_path(snapshot_path);
    }

    uss::UssServer server(registry, ip, port);
    std::cout << "USS listening on " << ip << ":" << server.port() << std::endl;

    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!g_stop) {
      std::this_thread::sleep_for(std::chrono::milliseconds(200));
    }
    std::cout << "shutting down\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
