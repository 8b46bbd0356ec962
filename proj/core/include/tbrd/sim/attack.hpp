#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tbrd/sim/channel.hpp"
#include "tbrd/verifier.hpp"

// The seeded adversarial scenario corpus: honest-but-lossy, replay, ghost
// fleets and delayed forgery, run end to end through the real transmitter
// construction, channel and verifier.
namespace tbrd::sim {

enum class AdversaryKind { none, replayer, ghost_fleet, delayed_forger };

struct AdversaryConfig {
  AdversaryKind kind = AdversaryKind::none;
  // replayer: re-broadcasts packs captured in [capture_from, capture_until)
  // (offsets from mission start) shifted by replay_offset_ms.
  int64_t replay_offset_ms = 30'000;
  int64_t capture_from_ms = 0;
  int64_t capture_until_ms = 25'000;
  // ghost_fleet: spoofed UAS with self-generated, unregistered keychains,
  // parked in a line along the y-axis.
  int ghost_count = 5;
  double ghost_spacing_m = 3.0;
};

enum class AuthMode { none, tbrd };

struct ScenarioConfig {
  std::string id;
  std::string kind = "attack";  // "attack" or "swarm"
  int64_t t_int_ms = 1000;
  int32_t d = 1;
  int64_t intervals = 60;  // broadcast intervals for the honest transmitter
  double loss = 0.0;
  int64_t jitter_ms = 0;
  AdversaryConfig adversary;

  // swarm runs only
  AuthMode auth_mode = AuthMode::tbrd;
  double square_m = 40.0;
  double timestep_s = 1.0;
  double radius_m = 2.0;
  double horizon_s = 5.0;
  double cruise_mps = 2.0;
  int64_t duration_steps = 120;
};

// Reads scenarios/<id>.json. Unknown ids throw std::runtime_error.
ScenarioConfig load_scenario(const std::string& id, const std::filesystem::path& dir);
ScenarioConfig parse_scenario_json(const std::string& text);

struct DeliveredMsg {
  std::string uas_id;
  int64_t interval = 0;
  int64_t t_ms = 0;
  bool from_attacker = false;
};

struct AttackSuiteResult {
  // terminal verdict counts per uas_id
  std::map<std::string, std::map<verify::Outcome, int>> histogram;
  std::vector<verify::VerdictEvent> events;  // every event, in emission order
  std::vector<DeliveredMsg> observer_deliveries;
  size_t pending_remaining = 0;
  int64_t t0_ms = 0;
};

AttackSuiteResult run_attack_suite(const ScenarioConfig& scenario, uint64_t seed);

}  // namespace tbrd::sim
