#include "doctest.h"

#include <random>

#include "tbrd/provision.hpp"
#include "tbrd/transmitter.hpp"
#include "tbrd/verifier.hpp"

using namespace tbrd;
using namespace tbrd::verify;

namespace {

constexpr int64_t kT0 = 1'000'000;

struct Mission {
  KeysFile keys;
  std::string handle;
};

Mission provision_and_start(uss::Registry& registry, const std::string& uas,
                            const std::string& op, Key32 seed, int64_t intervals = 60) {
  MissionPlan plan;
  plan.operator_id = op;
  plan.uas_id = uas;
  plan.start_ms = kT0;
  plan.end_ms = kT0 + (intervals + 1) * 1000;
  plan.t_int_ms = 1000;
  plan.d = 1;
  ProvisionResult prov = plan_mission(plan, seed);
  Mission m{prov.keys_file, registry.register_mission(prov.registration)};
  registry.start(m.handle, kT0);
  return m;
}

Mission provision_unregistered(const std::string& uas, const std::string& op, Key32 seed,
                               int64_t intervals = 60) {
  MissionPlan plan;
  plan.operator_id = op;
  plan.uas_id = uas;
  plan.start_ms = kT0;
  plan.end_ms = kT0 + (intervals + 1) * 1000;
  ProvisionResult prov = plan_mission(plan, seed);
  return Mission{prov.keys_file, ""};
}

TelemetrySample sample_at(int64_t offset_ms) {
  TelemetrySample t;
  t.lat_deg = 42.0 + offset_ms * 1e-7;
  t.lon_deg = -71.0;
  t.alt_m = 30.0;
  t.speed_mps = 5.0;
  t.direction_deg = 90;
  t.t_ms = offset_ms;
  return t;
}

// honest pack for interval i, transmitted at the interval start
Bytes pack_for(const Mission& m, int64_t i) {
  return odid::encode_pack(tx::build_beacon(i, sample_at((i - 1) * 1000), m.keys));
}

int64_t arrival_of(int64_t i) { return kT0 + (i - 1) * 1000 + 20; }

Outcome outcome_for(const std::vector<VerdictEvent>& events, int64_t interval) {
  for (const auto& ev : events) {
    if (ev.verdict.interval == interval && is_terminal(ev.verdict.outcome)) {
      return ev.verdict.outcome;
    }
  }
  return Outcome::pending;
}

Key32 seed_of(uint8_t fill) {
  Key32 s;
  s.fill(fill);
  return s;
}

class FlakyUssClient final : public uss::UssClient {
 public:
  explicit FlakyUssClient(uss::UssClient& inner) : inner_(inner) {}
  bool online = false;

  std::optional<uss::Ack> register_mission(const uss::RegistrationRequest& r) override {
    return inner_.register_mission(r);
  }
  std::optional<uss::Ack> report_start(const std::string& h, int64_t t) override {
    return inner_.report_start(h, t);
  }
  std::optional<uss::Ack> report_end(const std::string& h, int64_t t) override {
    return inner_.report_end(h, t);
  }
  std::optional<uss::Ack> revoke(const std::string& h) override { return inner_.revoke(h); }
  std::optional<uss::QueryResponse> query(const uss::ObserverQuery& q) override {
    if (!online) return std::nullopt;
    return inner_.query(q);
  }

 private:
  uss::UssClient& inner_;
};

}  // namespace

TEST_CASE("M_4 then M_5: the disclosed key authenticates the buffered message") {
  uss::Registry registry;
  uss::LocalUssClient uss(registry);
  Mission m = provision_and_start(registry, "UAS-1", "OP-1", seed_of(1));

  Verifier v(Verifier::Config{}, uss);
  auto first = v.ingest(pack_for(m, 4), arrival_of(4));
  REQUIRE(first.size() == 1);
  CHECK(first[0].verdict.outcome == Outcome::pending);
  CHECK(v.pending_count() == 1);

  auto second = v.ingest(pack_for(m, 5), arrival_of(5));
  CHECK(outcome_for(second, 4) == Outcome::authentic);
  CHECK(v.pending_count() == 1);  // M_5 now waits for its own disclosure
}

TEST_CASE("gap tolerance: M_4 then M_7 verifies across the loss run") {
  uss::Registry registry;
  uss::LocalUssClient uss(registry);
  Mission m = provision_and_start(registry, "UAS-1", "OP-1", seed_of(2));

  Verifier v(Verifier::Config{}, uss);
  v.ingest(pack_for(m, 4), arrival_of(4));
  auto events = v.ingest(pack_for(m, 7), arrival_of(7));  // M_5, M_6 lost
  CHECK(outcome_for(events, 4) == Outcome::authentic);
}

TEST_CASE("a tampered Location field yields mac_mismatch") {
  uss::Registry registry;
  uss::LocalUssClient uss(registry);
  Mission m = provision_and_start(registry, "UAS-1", "OP-1", seed_of(3));

  Verifier v(Verifier::Config{}, uss);
  Bytes tampered = pack_for(m, 4);
  tampered[3 + 25 + 9] ^= 0x01;  // flip one latitude bit inside the Location frame
  v.ingest(tampered, arrival_of(4));
  auto events = v.ingest(pack_for(m, 5), arrival_of(5));
  CHECK(outcome_for(events, 4) == Outcome::mac_mismatch);
}

TEST_CASE("self-consistent but unregistered chain is flagged unknown_mission") {
  uss::Registry registry;
  uss::LocalUssClient uss(registry);
  provision_and_start(registry, "UAS-1", "OP-1", seed_of(4));
  Mission ghost = provision_unregistered("GHOST-1", "OP-GHOST", seed_of(5));

  Verifier v(Verifier::Config{}, uss);
  v.ingest(pack_for(ghost, 4), arrival_of(4));
  auto events = v.ingest(pack_for(ghost, 5), arrival_of(5));
  CHECK(outcome_for(events, 4) == Outcome::unknown_mission);
}

TEST_CASE("a registered uas_id broadcast from a foreign chain is chain_mismatch") {
  uss::Registry registry;
  uss::LocalUssClient uss(registry);
  provision_and_start(registry, "UAS-1", "OP-1", seed_of(6));

  // attacker reuses the registered identity over its own keychain
  Mission fake = provision_unregistered("UAS-1", "OP-1", seed_of(7));

  Verifier v(Verifier::Config{}, uss);
  v.ingest(pack_for(fake, 4), arrival_of(4));
  auto events = v.ingest(pack_for(fake, 5), arrival_of(5));
  CHECK(outcome_for(events, 4) == Outcome::chain_mismatch);
}

TEST_CASE("operator mismatch is its own failure class") {
  uss::Registry registry;
  uss::LocalUssClient uss(registry);
  Mission m = provision_and_start(registry, "UAS-1", "OP-REGISTERED", seed_of(8));

  Mission lying = m;
  lying.keys.operator_id = "OP-IMPOSTOR";

  Verifier v(Verifier::Config{}, uss);
  v.ingest(pack_for(lying, 4), arrival_of(4));
  auto events = v.ingest(pack_for(lying, 5), arrival_of(5));
  CHECK(outcome_for(events, 4) == Outcome::operator_mismatch);
}

TEST_CASE("a replayed pack 30 s later is an interval violation") {
  uss::Registry registry;
  uss::LocalUssClient uss(registry);
  Mission m = provision_and_start(registry, "UAS-1", "OP-1", seed_of(9));

  Verifier v(Verifier::Config{}, uss);
  Bytes m4 = pack_for(m, 4);
  v.ingest(m4, arrival_of(4));
  auto original = v.ingest(pack_for(m, 5), arrival_of(5));
  CHECK(outcome_for(original, 4) == Outcome::authentic);

  // the key for interval 4 is long public by now, so the copy is judged
  // against its own late arrival time the moment it shows up
  auto replayed = v.ingest(m4, arrival_of(4) + 30'000);
  CHECK(outcome_for(replayed, 4) == Outcome::interval_violation);
}

TEST_CASE("key reuse with a different payload is replay_detected") {
  uss::Registry registry;
  uss::LocalUssClient uss(registry);
  Mission m = provision_and_start(registry, "UAS-1", "OP-1", seed_of(10));

  Bytes original = pack_for(m, 4);
  Bytes variant =
      odid::encode_pack(tx::build_beacon(4, sample_at(123'456), m.keys));
  REQUIRE(original != variant);

  Verifier v(Verifier::Config{}, uss);
  v.ingest(original, arrival_of(4));
  v.ingest(variant, arrival_of(4) + 100);  // both inside the valid window
  auto events = v.ingest(pack_for(m, 5), arrival_of(5));

  bool saw_authentic = false;
  bool saw_replay = false;
  for (const auto& ev : events) {
    if (ev.verdict.interval != 4) continue;
    if (ev.verdict.outcome == Outcome::authentic) saw_authentic = true;
    if (ev.verdict.outcome == Outcome::replay_detected) saw_replay = true;
  }
  CHECK(saw_authentic);
  CHECK(saw_replay);
}

TEST_CASE("hostile input becomes verdicts, not exceptions") {
  uss::Registry registry;
  uss::LocalUssClient uss(registry);
  Mission m = provision_and_start(registry, "UAS-1", "OP-1", seed_of(11));

  Verifier v(Verifier::Config{}, uss);

  Bytes garbage(50, 0xcc);
  auto e1 = v.ingest(garbage, arrival_of(1));
  REQUIRE(e1.size() == 1);
  CHECK(e1[0].verdict.outcome == Outcome::parse_error);

  // authenticated pack with page 2 replaced by a duplicate of page 3
  Bytes broken = pack_for(m, 4);
  std::copy(broken.begin() + 3 + 7 * 25, broken.begin() + 3 + 8 * 25,
            broken.begin() + 3 + 6 * 25);
  auto e2 = v.ingest(broken, arrival_of(4));
  REQUIRE(e2.size() == 1);
  CHECK(e2[0].verdict.outcome == Outcome::parse_error);

  Bytes plain = odid::encode_pack(tx::build_plain_beacon(sample_at(0), m.keys));
  auto e3 = v.ingest(plain, arrival_of(1));
  REQUIRE(e3.size() == 1);
  CHECK(e3[0].verdict.outcome == Outcome::unauthenticated);
}

TEST_CASE("USS outage leaves messages pending until retry succeeds") {
  uss::Registry registry;
  uss::LocalUssClient inner(registry);
  FlakyUssClient uss(inner);
  Mission m = provision_and_start(registry, "UAS-1", "OP-1", seed_of(12));

  Verifier v(Verifier::Config{}, uss);
  v.ingest(pack_for(m, 4), arrival_of(4));
  auto blocked = v.ingest(pack_for(m, 5), arrival_of(5));
  CHECK(outcome_for(blocked, 4) == Outcome::pending);
  CHECK(v.pending_count() == 2);  // M_4 still parked, MAC already checked

  uss.online = true;
  auto released = v.retry_uss();
  CHECK(outcome_for(released, 4) == Outcome::authentic);
  CHECK(v.pending_count() == 1);
}

TEST_CASE("a verifier started mid-flight authenticates everything after it") {
  uss::Registry registry;
  uss::LocalUssClient uss(registry);
  Mission m = provision_and_start(registry, "UAS-1", "OP-1", seed_of(13));

  Verifier v(Verifier::Config{}, uss);
  int authentic = 0;
  for (int64_t i = 20; i <= 30; ++i) {
    for (const auto& ev : v.ingest(pack_for(m, i), arrival_of(i))) {
      if (ev.verdict.outcome == Outcome::authentic) ++authentic;
    }
  }
  CHECK(authentic == 10);  // intervals 20..29; 30 still pending
}

TEST_CASE("completeness under random loss; terminal verdicts are monotone") {
  uss::Registry registry;
  uss::LocalUssClient uss(registry);
  Mission m = provision_and_start(registry, "UAS-1", "OP-1", seed_of(14));

  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 5; ++trial) {
    Verifier v(Verifier::Config{}, uss);
    std::vector<int64_t> delivered;
    std::vector<VerdictEvent> all;
    for (int64_t i = 1; i <= 40; ++i) {
      if (rng() % 2 == 0) continue;  // lost
      delivered.push_back(i);
      for (auto& ev : v.ingest(pack_for(m, i), arrival_of(i))) all.push_back(ev);
    }

    for (size_t idx = 0; idx < delivered.size(); ++idx) {
      bool has_later = idx + 1 < delivered.size();
      if (has_later) {
        CHECK(outcome_for(all, delivered[idx]) == Outcome::authentic);
      }
    }

    // at most one terminal verdict per buffered message
    std::map<int64_t, int> terminal_count;
    for (const auto& ev : all) {
      if (is_terminal(ev.verdict.outcome)) terminal_count[ev.verdict.interval]++;
    }
    for (const auto& [interval, count] : terminal_count) CHECK(count == 1);
  }
}

TEST_CASE("verdict records serialize as documented JSON lines") {
  Verdict v{"UAS-1", 4, Outcome::authentic, "", 1'003'020};
  CHECK(to_json_line(v) ==
        R"({"arrival_ms":1003020,"detail":"","interval":4,"outcome":"authentic",)"
        R"("uas_id":"UAS-1"})");
}
