#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tbrd/bytes.hpp"
#include "tbrd/odid.hpp"
#include "tbrd/uss_client.hpp"

// Receive-side verification: buffer packs until key disclosure, then run the
// MAC, chain-commitment, USS and temporal checks and emit per-message verdicts.
namespace tbrd::verify {

enum class Outcome {
  pending,
  authentic,
  mac_mismatch,
  chain_mismatch,
  interval_violation,
  replay_detected,
  unknown_mission,
  revoked_mission,
  operator_mismatch,
  unauthenticated,
  parse_error,
};

const char* to_string(Outcome o);
bool is_terminal(Outcome o);

struct Verdict {
  std::string uas_id;
  int64_t interval = 0;
  Outcome outcome = Outcome::pending;
  std::string detail;
  int64_t arrival_ms = 0;
};

std::string to_json_line(const Verdict& v);

// A verdict plus the authenticated telemetry it vouches for (present only
// when the outcome is authentic; consumers like the swarm feed on it).
struct VerdictEvent {
  Verdict verdict;
  std::optional<odid::LocationMsg> location;
};

class Verifier {
 public:
  struct Config {
    std::string observer_id = "OBSERVER";
    int64_t max_skew_ms = 10;
    int32_t default_d = 1;  // used for release arithmetic before USS data arrives
    int64_t pending_expiry_ms = 24LL * 3600 * 1000;
    int64_t max_hash_gap = 4096;  // refuse absurd hash-forward distances
    // append-only ledger of accepted (uas, interval, payload digest) records;
    // loading it at startup extends replay detection across runs
    std::string replay_log_path;
  };

  Verifier(Config config, uss::UssClient& uss);

  // Parses and parks one received pack, then releases whatever the pack's
  // disclosed key unlocks. Returns every verdict produced by this call,
  // including the new pack's own (pending/unauthenticated/parse_error).
  std::vector<VerdictEvent> ingest(std::span<const uint8_t> pack_bytes,
                                   int64_t arrival_ms);

  // Re-attempts USS-dependent checks for messages whose MAC already
  // verified but whose USS lookup failed (offline verification).
  std::vector<VerdictEvent> retry_uss();

  size_t pending_count() const;

 private:
  struct Pending {
    int64_t arrival_ms = 0;
    int64_t interval = 0;
    odid::AuthBundle bundle;
    Bytes auth_payload;
    odid::LocationMsg location;
    std::string operator_id;
    bool mac_verified = false;  // waiting only on the USS when set
  };

  struct DisclosedKey {
    int64_t key_interval = 0;  // chain index of the key
    Key32 key{};
  };

  void release_with_key(const std::string& uas_id, const DisclosedKey& dk,
                        std::vector<VerdictEvent>& out);
  // Runs USS + temporal checks; false when the USS was unreachable.
  bool finish_checks(const std::string& uas_id, Pending& p,
                     std::vector<VerdictEvent>& out);
  void expire_old(int64_t now_ms);

  Config config_;
  uss::UssClient& uss_;
  mutable std::mutex mu_;
  std::map<std::string, std::deque<Pending>> pending_;          // by uas_id
  std::map<std::string, std::vector<DisclosedKey>> recent_keys_;  // newest last
  std::map<std::string, int32_t> known_d_;  // per-mission d learned from the USS
  std::map<std::pair<std::string, int64_t>, Key32> accepted_payloads_;
};

}  // namespace tbrd::verify
