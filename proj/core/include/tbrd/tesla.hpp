#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tbrd/bytes.hpp"

// TESLA keychain generation, per-interval MAC keys, commitment checking and
// the receiver-side timing conditions. Pure logic, no I/O; all values are
// immutable after construction and safe to share across threads.
namespace tbrd::tesla {

struct ChainParams {
  int64_t t_int_ms = 1000;  // interval duration
  int32_t d = 1;            // key disclosure delay, in intervals
  int64_t n = 0;            // usable intervals; the chain holds n+1 keys
  int64_t t0_ms = 0;        // mission start (time of first broadcast), epoch ms UTC

  bool valid() const { return t_int_ms > 0 && d >= 1 && n >= 1; }
};

// Per-interval MAC key K'_i, kept distinct from the chain key it derives from.
struct MacKey {
  Key32 value{};
};

// Ordered keys K_0..K_n with K_{i-1} = SHA-256(K_i). K_n is the seed; K_0 is
// the public commitment.
class KeyChain {
 public:
  KeyChain(ChainParams params, std::vector<Key32> keys);

  const ChainParams& params() const { return params_; }
  int64_t n() const { return params_.n; }
  const Key32& key(int64_t i) const;  // 0 <= i <= n
  const Key32& commitment() const { return keys_.front(); }
  const std::vector<Key32>& keys() const { return keys_; }

 private:
  ChainParams params_;
  std::vector<Key32> keys_;
};

// Builds the chain from a 32-byte seed: keys[n] = seed, keys[i-1] = SHA-256(keys[i]).
// Throws std::invalid_argument on bad seed length or invalid params.
KeyChain generate_chain(std::span<const uint8_t> seed, const ChainParams& params);

// K'_i = HMAC-SHA-256(key = k_i, message = "TBRD-MAC-KEY").
MacKey derive_mac_key(const Key32& k_i);

// Full untruncated HMAC-SHA-256 of payload under the interval MAC key.
// Throws std::invalid_argument on an empty payload.
Key32 compute_mac(const MacKey& mac_key, std::span<const uint8_t> payload);

// True iff SHA-256 applied claimed_interval times to disclosed_key equals k0.
// A key disclosed in the message of interval i is K_{i-d}; pass i-d here.
bool verify_commitment(const Key32& disclosed_key, int64_t claimed_interval,
                       const Key32& k0);

// Interval index for wall time t: floor((t - t0)/T_int) + 1, so i = 1 covers
// [t0, t0 + T_int). Throws std::invalid_argument if t_ms < t0_ms.
int64_t interval_of(int64_t t_ms, const ChainParams& params);

// Standard TESLA safety condition: the sender could not yet have disclosed
// K_i when the message arrived, allowing max_skew_ms of receiver clock error.
bool safety_condition(int64_t arrival_ms, int64_t claimed_interval,
                      const ChainParams& params, int64_t max_skew_ms);

// The back-dating check from the verification procedure, generalized to an
// arbitrary interval length: arrival - i*T_int must precede t0 + T_int.
bool backdate_check(int64_t arrival_ms, int64_t claimed_interval,
                      const ChainParams& params);

}  // namespace tbrd::tesla
