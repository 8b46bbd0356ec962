// Mission provisioning CLI: generates the keychain from a sealed seed,
// writes the transmitter keys file and drives the USS mission lifecycle.
//
//   tbrd-provision plan     --operator-id OP --uas-id UAS --start <epoch-ms>
//                           --duration-s 300 --out keys.txt
//   tbrd-provision register --keys keys.txt --start <epoch-ms> --duration-s 300
//                           --uss host:port
//   tbrd-provision start|end|revoke --handle m-1 --uss host:port [--at <epoch-ms>]

#include <iostream>

#include "CLI11.hpp"
#include "tbrd/clock.hpp"
#include "tbrd/crypto.hpp"
#include "tbrd/provision.hpp"
#include "tbrd/uss_client.hpp"

using namespace tbrd;

namespace {

int fail(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 1;
}

uss::TcpUssClient client_for(const std::string& endpoint) {
  auto [host, port] = uss::parse_endpoint(endpoint);
  return uss::TcpUssClient(host, port);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TBRD mission provisioning"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI file");

  std::string operator_id, uas_id, out_path = "keys.txt", seed_path = "keys.seed";
  std::string uss_endpoint = "127.0.0.1:5555", seed_hex, keys_path, handle;
  int64_t start_ms = 0, duration_s = 300, t_int_ms = 1000, at_ms = 0;
  int32_t d = 1;

  CLI::App* plan = app.add_subcommand("plan", "Generate the keychain and keys file");
  plan->add_option("--operator-id", operator_id)->required();
  plan->add_option("--uas-id", uas_id)->required();
  plan->add_option("--start", start_ms, "Mission start, Unix epoch ms (0 = now)");
  plan->add_option("--duration-s", duration_s, "Mission length in seconds");
  plan->add_option("--t-int-ms", t_int_ms, "TESLA interval duration");
  plan->add_option("--d", d, "Key disclosure delay in intervals");
  plan->add_option("--out", out_path, "Keys file to write");
  plan->add_option("--seed-file", seed_path, "Sealed seed file (created if absent)");
  plan->add_option("--seed-hex", seed_hex, "Fixed seed, 64 hex chars (tests only)");

  CLI::App* reg = app.add_subcommand("register", "Register the mission with the USS");
  reg->add_option("--keys", keys_path, "Keys file from plan")->required();
  reg->add_option("--start", start_ms, "Validity window start, epoch ms")->required();
  reg->add_option("--duration-s", duration_s)->required();
  reg->add_option("--uss", uss_endpoint, "USS endpoint host:port");

  CLI::App* start = app.add_subcommand("start", "Report the first-broadcast time");
  start->add_option("--handle", handle)->required();
  start->add_option("--at", at_ms, "Start time, epoch ms (0 = now)");
  start->add_option("--uss", uss_endpoint);

  CLI::App* end = app.add_subcommand("end", "Report mission end");
  end->add_option("--handle", handle)->required();
  end->add_option("--at", at_ms, "End time, epoch ms (0 = now)");
  end->add_option("--uss", uss_endpoint);

  CLI::App* revoke = app.add_subcommand("revoke", "Revoke a registered mission");
  revoke->add_option("--handle", handle)->required();
  revoke->add_option("--uss", uss_endpoint);

  CLI11_PARSE(app, argc, argv);

  WallClock clock;
  try {
    if (plan->parsed()) {
      Key32 seed;
      if (!seed_hex.empty()) {
        std::cerr << "warning: fixed seed given; use for tests only\n";
        seed = key_from_hex(seed_hex);
      } else {
        seed = load_or_create_sealed_seed(seed_path);
      }

      MissionPlan mission;
      mission.operator_id = operator_id;
      mission.uas_id = uas_id;
      mission.start_ms = start_ms != 0 ? start_ms : clock.now_ms();
      mission.end_ms = mission.start_ms + duration_s * 1000;
      mission.t_int_ms = t_int_ms;
      mission.d = d;

      ProvisionResult result = plan_mission(mission, seed);
      write_keys_file(out_path, result.keys_file);
      std::cout << "keys file: " << out_path << " (" << result.keys_file.keys.size()
                << " keys)\n";
      std::cout << "commitment K_0: " << to_hex(result.registration.k0) << "\n";
      return 0;
    }

    if (reg->parsed()) {
      KeysFile keys = load_keys_file(keys_path);
      uss::RegistrationRequest request;
      request.operator_id = keys.operator_id;
      request.uas_id = keys.uas_id;
      request.window_start_ms = start_ms;
      request.window_end_ms = start_ms + duration_s * 1000;
      request.k0 = keys.commitment();
      request.t_int_ms = keys.params.t_int_ms;
      request.d = keys.params.d;

      auto ack = client_for(uss_endpoint).register_mission(request);
      if (!ack) return fail("USS unreachable at " + uss_endpoint);
      if (!ack->ok) return fail("USS rejected registration: " + ack->error);
      std::cout << "handle: " << ack->handle << "\n";
      return 0;
    }

    auto uss = client_for(uss_endpoint);
    std::optional<uss::Ack> ack;
    if (start->parsed()) {
      ack = uss.report_start(handle, at_ms != 0 ? at_ms : clock.now_ms());
    } else if (end->parsed()) {
      ack = uss.report_end(handle, at_ms != 0 ? at_ms : clock.now_ms());
    } else if (revoke->parsed()) {
      ack = uss.revoke(handle);
    }
    if (!ack) return fail("USS unreachable at " + uss_endpoint);
    if (!ack->ok) return fail("USS rejected request: " + ack->error);
    std::cout << "ok\n";
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}
