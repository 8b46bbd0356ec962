#include "tbrd/verifier.hpp"

#include <algorithm>

#include "json.hpp"
#include "tbrd/crypto.hpp"
#include "tbrd/tesla.hpp"

namespace tbrd::verify {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::pending: return "pending";
    case Outcome::authentic: return "authentic";
    case Outcome::mac_mismatch: return "mac_mismatch";
    case Outcome::chain_mismatch: return "chain_mismatch";
    case Outcome::interval_violation: return "interval_violation";
    case Outcome::replay_detected: return "replay_detected";
    case Outcome::unknown_mission: return "unknown_mission";
    case Outcome::revoked_mission: return "revoked_mission";
    case Outcome::operator_mismatch: return "operator_mismatch";
    case Outcome::unauthenticated: return "unauthenticated";
    case Outcome::parse_error: return "parse_error";
  }
  return "?";
}

bool is_terminal(Outcome o) { return o != Outcome::pending; }

std::string to_json_line(const Verdict& v) {
  nlohmann::json j{{"uas_id", v.uas_id},
                   {"interval", v.interval},
                   {"outcome", to_string(v.outcome)},
                   {"detail", v.detail},
                   {"arrival_ms", v.arrival_ms}};
  return j.dump();
}

namespace {
Key32 hash_forward(Key32 key, int64_t times) {
  for (int64_t i = 0; i < times; ++i) key = crypto::sha256(key);
  return key;
}
}  // namespace

Verifier::Verifier(Config config, uss::UssClient& uss)
    : config_(std::move(config)), uss_(uss) {}

size_t Verifier::pending_count() const {
  std::lock_guard lk(mu_);
  size_t n = 0;
  for (const auto& [_, q] : pending_) n += q.size();
  return n;
}

void Verifier::expire_old(int64_t now_ms) {
  for (auto& [_, q] : pending_) {
    std::erase_if(q, [&](const Pending& p) {
      return now_ms - p.arrival_ms > config_.pending_expiry_ms;
    });
  }
}

std::vector<VerdictEvent> Verifier::ingest(std::span<const uint8_t> pack_bytes,
                                           int64_t arrival_ms) {
  std::lock_guard lk(mu_);
  std::vector<VerdictEvent> out;
  expire_old(arrival_ms);

  odid::MessagePack pack;
  try {
    pack = odid::decode_pack(pack_bytes);
  } catch (const odid::CodecError& e) {
    out.push_back({Verdict{"", 0, Outcome::parse_error, e.what(), arrival_ms}, {}});
    return out;
  }

  const std::string uas_id = pack.basic.uas_id;
  if (!pack.authenticated()) {
    out.push_back(
        {Verdict{uas_id, 0, Outcome::unauthenticated, "no auth pages", arrival_ms}, {}});
    return out;
  }

  odid::AuthBundle bundle;
  try {
    bundle = odid::reassemble_auth(*pack.auth_pages);
  } catch (const odid::CodecError& e) {
    out.push_back({Verdict{uas_id, 0, Outcome::parse_error, e.what(), arrival_ms}, {}});
    return out;
  }
  if (bundle.interval_counter < 1) {
    out.push_back(
        {Verdict{uas_id, 0, Outcome::parse_error, "bad interval counter", arrival_ms}, {}});
    return out;
  }

  // The MAC covers the exact bytes the sender framed: the big-endian interval
  // counter followed by the four data frames as received.
  Pending p;
  p.arrival_ms = arrival_ms;
  p.interval = bundle.interval_counter;
  p.bundle = bundle;
  p.auth_payload.reserve(odid::kAuthPayloadLen);
  put_u32be(p.auth_payload, bundle.interval_counter);
  p.auth_payload.insert(p.auth_payload.end(), pack_bytes.begin() + 3,
                        pack_bytes.begin() + 3 + 4 * odid::kFrameLen);
  p.location = pack.location;
  p.operator_id = pack.operator_id.operator_id;

  pending_[uas_id].push_back(std::move(p));
  out.push_back({Verdict{uas_id, bundle.interval_counter, Outcome::pending, "buffered",
                         arrival_ms},
                 {}});

  // Remember the key this pack disclosed, then run a release pass with the
  // keys seen so far (covers reordered arrivals as well as the normal case).
  int32_t d_eff = config_.default_d;
  if (auto it = known_d_.find(uas_id); it != known_d_.end()) d_eff = it->second;
  DisclosedKey dk{static_cast<int64_t>(bundle.interval_counter) - d_eff,
                  bundle.disclosed_key};
  if (dk.key_interval >= 0) {
    auto& keys = recent_keys_[uas_id];
    bool dup = std::any_of(keys.begin(), keys.end(), [&](const DisclosedKey& k) {
      return k.key_interval == dk.key_interval && k.key == dk.key;
    });
    if (!dup) {
      keys.push_back(dk);
      if (keys.size() > 6) keys.erase(keys.begin());
    }
  }

  auto keys_snapshot = recent_keys_[uas_id];
  for (auto it = keys_snapshot.rbegin(); it != keys_snapshot.rend(); ++it) {
    release_with_key(uas_id, *it, out);
  }
  return out;
}

void Verifier::release_with_key(const std::string& uas_id, const DisclosedKey& dk,
                                std::vector<VerdictEvent>& out) {
  auto it = pending_.find(uas_id);
  if (it == pending_.end()) return;

  int32_t d_eff = config_.default_d;
  if (auto kd = known_d_.find(uas_id); kd != known_d_.end()) d_eff = kd->second;

  auto& queue = it->second;
  for (auto p = queue.begin(); p != queue.end();) {
    if (p->interval > dk.key_interval) {
      ++p;
      continue;
    }
    int64_t gap = dk.key_interval - p->interval;
    if (gap > config_.max_hash_gap) {
      ++p;
      continue;
    }

    Key32 k_i = hash_forward(dk.key, gap);

    // Consistency gate: the derived interval key must chain onto the key the
    // buffered message itself disclosed. A disclosing pack from a different
    // (or fabricated) chain must not be able to finalize this message.
    if (!p->mac_verified &&
        !crypto::equal(hash_forward(k_i, d_eff), p->bundle.disclosed_key)) {
      ++p;
      continue;
    }

    if (!p->mac_verified) {
      Key32 mac = tesla::compute_mac(tesla::derive_mac_key(k_i), p->auth_payload);
      if (!crypto::equal(mac, p->bundle.mac)) {
        out.push_back({Verdict{uas_id, p->interval, Outcome::mac_mismatch,
                               "recomputed MAC differs", p->arrival_ms},
                       {}});
        p = queue.erase(p);
        continue;
      }
      p->mac_verified = true;
    }

    if (finish_checks(uas_id, *p, out)) {
      p = queue.erase(p);
    } else {
      ++p;  // USS unreachable: verify later
    }
  }
}

bool Verifier::finish_checks(const std::string& uas_id, Pending& p,
                             std::vector<VerdictEvent>& out) {
  auto resp = uss_.query({config_.observer_id, uas_id, p.arrival_ms});
  if (!resp) return false;

  auto final = [&](Outcome o, std::string detail,
                   std::optional<odid::LocationMsg> loc = {}) {
    out.push_back({Verdict{uas_id, p.interval, o, std::move(detail), p.arrival_ms},
                   std::move(loc)});
    return true;
  };

  if (resp->status == uss::QueryStatus::no_mission) {
    return final(Outcome::unknown_mission, "no registered mission covers arrival time");
  }
  if (resp->status == uss::QueryStatus::revoked) {
    return final(Outcome::revoked_mission, "mission revoked");
  }

  known_d_[uas_id] = resp->d;

  tesla::ChainParams params;
  params.t_int_ms = resp->t_int_ms;
  params.d = resp->d;
  params.n = 1;  // not used by the timing checks
  params.t0_ms = resp->t0_ms;

  // Claims from the far future would otherwise buy unbounded hashing below.
  int64_t max_plausible =
      tesla::interval_of(p.arrival_ms + config_.max_skew_ms, params) + 1;
  if (p.interval > max_plausible) {
    return final(Outcome::interval_violation, "claimed interval after arrival time");
  }

  int64_t commit_steps = p.interval - resp->d;
  if (commit_steps < 0 ||
      !tesla::verify_commitment(p.bundle.disclosed_key, commit_steps, resp->k0)) {
    return final(Outcome::chain_mismatch, "disclosed key does not hash to K_0");
  }

  if (p.operator_id != resp->operator_id) {
    return final(Outcome::operator_mismatch,
                 "broadcast operator_id differs from registration");
  }

  if (!tesla::backdate_check(p.arrival_ms, p.interval, params) ||
      !tesla::safety_condition(p.arrival_ms, p.interval, params, config_.max_skew_ms)) {
    return final(Outcome::interval_violation, "key no longer secret at arrival");
  }

  Key32 digest = crypto::sha256(p.auth_payload);
  auto key = std::make_pair(uas_id, p.interval);
  auto seen = accepted_payloads_.find(key);
  if (seen != accepted_payloads_.end() && !crypto::equal(seen->second, digest)) {
    return final(Outcome::replay_detected, "interval reused with different payload");
  }
  accepted_payloads_.emplace(key, digest);
  return final(Outcome::authentic, "", p.location);
}

std::vector<VerdictEvent> Verifier::retry_uss() {
  std::lock_guard lk(mu_);
  std::vector<VerdictEvent> out;
  for (auto& [uas_id, queue] : pending_) {
    for (auto p = queue.begin(); p != queue.end();) {
      if (p->mac_verified && finish_checks(uas_id, *p, out)) {
        p = queue.erase(p);
      } else {
        ++p;
      }
    }
  }
  return out;
}

}  // namespace tbrd::verify
