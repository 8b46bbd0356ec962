#include "tbrd/sim/attack.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tbrd/crypto.hpp"
#include "tbrd/provision.hpp"
#include "tbrd/tesla.hpp"
#include "tbrd/transmitter.hpp"
#include "tbrd/uss_client.hpp"

namespace tbrd::sim {

using nlohmann::json;

namespace {

constexpr int64_t kSimEpochMs = 1'000'000;
constexpr double kLat0 = 42.0;
constexpr double kLon0 = -71.0;
constexpr double kMetersPerDegLat = 111'320.0;

double meters_per_deg_lon() {
  return kMetersPerDegLat * std::cos(kLat0 * M_PI / 180.0);
}

// Local-plane meters -> geodetic, so scripted geometry rides in real frames.
void xy_to_geo(double x_m, double y_m, double& lat, double& lon) {
  lat = kLat0 + y_m / kMetersPerDegLat;
  lon = kLon0 + x_m / meters_per_deg_lon();
}

Key32 derived_seed(uint64_t scenario_seed, const std::string& label) {
  Bytes material;
  for (int i = 0; i < 8; ++i) {
    material.push_back(static_cast<uint8_t>(scenario_seed >> (8 * i)));
  }
  material.insert(material.end(), label.begin(), label.end());
  return crypto::sha256(material);
}

class VerifierEndpoint final : public Endpoint {
 public:
  VerifierEndpoint(verify::Verifier& verifier, AttackSuiteResult& result)
      : verifier_(verifier), result_(result) {}

  void on_receive(const Delivery& d) override {
    DeliveredMsg msg;
    msg.t_ms = d.t_ms;
    msg.from_attacker = d.sender == "ATTACKER";
    try {
      odid::MessagePack pack = odid::decode_pack(d.pack);
      msg.uas_id = pack.basic.uas_id;
      if (pack.authenticated()) {
        msg.interval = odid::reassemble_auth(*pack.auth_pages).interval_counter;
      }
    } catch (const odid::CodecError&) {
      // recorded with interval 0; the verifier reports the parse failure
    }
    result_.observer_deliveries.push_back(msg);

    for (auto& ev : verifier_.ingest(d.pack, d.t_ms)) {
      if (verify::is_terminal(ev.verdict.outcome)) {
        result_.histogram[ev.verdict.uas_id][ev.verdict.outcome]++;
      }
      result_.events.push_back(std::move(ev));
    }
  }

 private:
  verify::Verifier& verifier_;
  AttackSuiteResult& result_;
};

class ReplayerEndpoint final : public Endpoint {
 public:
  ReplayerEndpoint(EventLoop& loop, BroadcastChannel& channel, const AdversaryConfig& cfg,
                   int64_t t0_ms)
      : loop_(loop), channel_(channel), cfg_(cfg), t0_ms_(t0_ms) {}

  void on_receive(const Delivery& d) override {
    int64_t offset = d.t_ms - t0_ms_;
    if (offset < cfg_.capture_from_ms || offset >= cfg_.capture_until_ms) return;
    Bytes copy = d.pack;
    loop_.schedule(d.t_ms + cfg_.replay_offset_ms,
                   [this, copy] { channel_.broadcast("ATTACKER", copy); });
  }

 private:
  EventLoop& loop_;
  BroadcastChannel& channel_;
  AdversaryConfig cfg_;
  int64_t t0_ms_;
};

// Forges a beacon for interval i = j - d the moment K_i is disclosed by the
// honest pack of interval j, using earlier captured disclosures to fill the
// forged bundle's own key field.
class DelayedForgerEndpoint final : public Endpoint {
 public:
  DelayedForgerEndpoint(EventLoop& loop, BroadcastChannel& channel, int32_t d)
      : loop_(loop), channel_(channel), d_(d) {}

  void on_receive(const Delivery& d) override {
    if (d.sender == "ATTACKER") return;
    odid::MessagePack pack;
    odid::AuthBundle bundle;
    try {
      pack = odid::decode_pack(d.pack);
      if (!pack.authenticated()) return;
      bundle = odid::reassemble_auth(*pack.auth_pages);
    } catch (const odid::CodecError&) {
      return;
    }

    int64_t j = bundle.interval_counter;
    disclosed_[pack.basic.uas_id][j - d_] = bundle.disclosed_key;

    int64_t target = j - d_;  // MAC key for this interval is now public
    auto& keys = disclosed_[pack.basic.uas_id];
    auto own_disclosure = keys.find(target - d_);
    if (target < 1 || own_disclosure == keys.end()) return;

    odid::MessagePack forged = pack;
    forged.location.lat_deg += 0.001;  // spoofed position
    Bytes payload = odid::build_auth_payload(static_cast<uint32_t>(target), forged.basic,
                                             forged.location, forged.system,
                                             forged.operator_id);
    odid::AuthBundle fb;
    fb.interval_counter = static_cast<uint32_t>(target);
    fb.mac = tesla::compute_mac(tesla::derive_mac_key(keys[target]), payload);
    fb.disclosed_key = own_disclosure->second;
    forged.auth_pages = odid::paginate_auth(fb, 0);

    Bytes raw = odid::encode_pack(forged);
    loop_.schedule(d.t_ms + 50, [this, raw] { channel_.broadcast("ATTACKER", raw); });
  }

 private:
  EventLoop& loop_;
  BroadcastChannel& channel_;
  int32_t d_;
  std::map<std::string, std::map<int64_t, Key32>> disclosed_;
};

struct HonestUas {
  KeysFile keys;
  std::vector<tx::CollectSink::Sent> transmissions;
};

// Runs the real transmit loop on a virtual clock and returns its timed packs.
HonestUas make_transmitter(const std::string& operator_id, const std::string& uas_id,
                           const ScenarioConfig& sc, const Key32& seed, double x_m,
                           double y_m, uss::Registry* registry) {
  MissionPlan plan;
  plan.operator_id = operator_id;
  plan.uas_id = uas_id;
  plan.start_ms = kSimEpochMs;
  plan.end_ms = kSimEpochMs + (sc.intervals + 1) * sc.t_int_ms;
  plan.t_int_ms = sc.t_int_ms;
  plan.d = sc.d;
  ProvisionResult prov = plan_mission(plan, seed);

  if (registry) {
    std::string handle = registry->register_mission(prov.registration);
    registry->start(handle, kSimEpochMs);
  }

  TelemetrySample sample;
  xy_to_geo(x_m, y_m, sample.lat_deg, sample.lon_deg);
  sample.alt_m = 5.0;
  sample.operator_lat_deg = sample.lat_deg;
  sample.operator_lon_deg = sample.lon_deg;
  StaticTelemetry telemetry(sample);

  ManualClock clock(kSimEpochMs);
  tx::CollectSink sink;
  tx::TxOptions options;
  options.max_intervals = sc.intervals;

  HonestUas uas;
  uas.keys = prov.keys_file;
  tx::run_transmitter(prov.keys_file, telemetry, sink, clock, options);
  uas.transmissions = std::move(sink.sent);
  return uas;
}

}  // namespace

ScenarioConfig parse_scenario_json(const std::string& text) {
  json j = json::parse(text);
  ScenarioConfig sc;
  sc.id = j.at("id").get<std::string>();
  sc.kind = j.value("kind", "attack");
  sc.t_int_ms = j.value("t_int_ms", int64_t{1000});
  sc.d = j.value("d", 1);
  sc.intervals = j.value("intervals", int64_t{60});
  sc.loss = j.value("loss", 0.0);
  sc.jitter_ms = j.value("jitter_ms", int64_t{0});

  if (j.contains("adversary")) {
    const json& a = j.at("adversary");
    std::string kind = a.at("kind").get<std::string>();
    if (kind == "replayer") sc.adversary.kind = AdversaryKind::replayer;
    else if (kind == "ghost_fleet") sc.adversary.kind = AdversaryKind::ghost_fleet;
    else if (kind == "delayed_forger") sc.adversary.kind = AdversaryKind::delayed_forger;
    else throw std::runtime_error("unknown adversary kind: " + kind);
    sc.adversary.replay_offset_ms = a.value("replay_offset_ms", int64_t{30'000});
    sc.adversary.capture_from_ms = a.value("capture_from_ms", int64_t{0});
    sc.adversary.capture_until_ms = a.value("capture_until_ms", int64_t{25'000});
    sc.adversary.ghost_count = a.value("ghost_count", 5);
    sc.adversary.ghost_spacing_m = a.value("ghost_spacing_m", 3.0);
  }

  if (j.contains("auth_mode")) {
    std::string mode = j.at("auth_mode").get<std::string>();
    if (mode == "none") sc.auth_mode = AuthMode::none;
    else if (mode == "tbrd") sc.auth_mode = AuthMode::tbrd;
    else throw std::runtime_error("unknown auth_mode: " + mode);
  }
  sc.square_m = j.value("square_m", 40.0);
  sc.timestep_s = j.value("timestep_s", 1.0);
  sc.radius_m = j.value("radius_m", 2.0);
  sc.horizon_s = j.value("horizon_s", 5.0);
  sc.cruise_mps = j.value("cruise_mps", 2.0);
  sc.duration_steps = j.value("duration_steps", int64_t{120});
  return sc;
}

ScenarioConfig load_scenario(const std::string& id, const std::filesystem::path& dir) {
  std::filesystem::path file = dir / (id + ".json");
  std::ifstream in(file);
  if (!in) throw std::runtime_error("no such scenario: " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_json(buf.str());
}

AttackSuiteResult run_attack_suite(const ScenarioConfig& scenario, uint64_t seed) {
  if (scenario.kind != "attack") {
    throw std::invalid_argument("run_attack_suite needs an attack scenario");
  }

  uss::Registry registry;
  uss::LocalUssClient uss_client(registry);

  AttackSuiteResult result;
  result.t0_ms = kSimEpochMs;

  // Honest transmitter, registered and started.
  HonestUas honest = make_transmitter("OP-1", "UAS-1", scenario,
                                      derived_seed(seed, "honest"), 0.0, 10.0, &registry);

  // Ghost fleet: syntactically valid, unregistered chains in a y-axis line.
  std::vector<HonestUas> ghosts;
  if (scenario.adversary.kind == AdversaryKind::ghost_fleet) {
    int k = scenario.adversary.ghost_count;
    for (int g = 0; g < k; ++g) {
      double y = (g - (k - 1) / 2.0) * scenario.adversary.ghost_spacing_m;
      std::string id = "GHOST-" + std::to_string(g + 1);
      ghosts.push_back(make_transmitter("OP-GHOST", id, scenario,
                                        derived_seed(seed, id), 0.0, y, nullptr));
    }
  }

  EventLoop loop;
  BroadcastChannel channel(loop, ChannelConfig{scenario.loss, scenario.jitter_ms, seed});

  verify::Verifier::Config vcfg;
  vcfg.observer_id = "OBS-1";
  vcfg.default_d = scenario.d;
  verify::Verifier verifier(vcfg, uss_client);
  VerifierEndpoint observer(verifier, result);
  channel.attach("OBSERVER", &observer);

  ReplayerEndpoint replayer(loop, channel, scenario.adversary, kSimEpochMs);
  DelayedForgerEndpoint forger(loop, channel, scenario.d);
  if (scenario.adversary.kind == AdversaryKind::replayer) {
    channel.attach("ATTACKER", &replayer);
  } else if (scenario.adversary.kind == AdversaryKind::delayed_forger) {
    channel.attach("ATTACKER", &forger);
  }

  auto schedule_uas = [&loop, &channel](const std::string& sender, const HonestUas& uas) {
    for (const auto& sent : uas.transmissions) {
      loop.schedule(sent.t_ms, [&channel, sender, pack = sent.pack] {
        channel.broadcast(sender, pack);
      });
    }
  };
  schedule_uas("UAS-1", honest);
  for (size_t g = 0; g < ghosts.size(); ++g) {
    schedule_uas("GHOST-" + std::to_string(g + 1), ghosts[g]);
  }

  loop.run();
  result.pending_remaining = verifier.pending_count();
  return result;
}

}  // namespace tbrd::sim
