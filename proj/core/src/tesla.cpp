#include "tbrd/tesla.hpp"

#include <chrono>
#include <stdexcept>
#include <thread>

#include "tbrd/clock.hpp"
#include "tbrd/crypto.hpp"

namespace tbrd {

int64_t WallClock::now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

void WallClock::sleep_until_ms(int64_t t_ms) {
  int64_t now = now_ms();
  if (t_ms > now) std::this_thread::sleep_for(std::chrono::milliseconds(t_ms - now));
}

namespace tesla {

namespace {
// floor division that is correct for negative numerators
int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
}  // namespace

KeyChain::KeyChain(ChainParams params, std::vector<Key32> keys)
    : params_(params), keys_(std::move(keys)) {
  if (!params_.valid()) throw std::invalid_argument("invalid chain params");
  if (static_cast<int64_t>(keys_.size()) != params_.n + 1) {
    throw std::invalid_argument("key chain must hold n+1 keys");
  }
}

const Key32& KeyChain::key(int64_t i) const {
  if (i < 0 || i > params_.n) throw std::out_of_range("key index out of range");
  return keys_[static_cast<size_t>(i)];
}

KeyChain generate_chain(std::span<const uint8_t> seed, const ChainParams& params) {
  if (seed.size() != 32) throw std::invalid_argument("seed must be exactly 32 bytes");
  if (!params.valid()) throw std::invalid_argument("invalid chain params");

  std::vector<Key32> keys(static_cast<size_t>(params.n) + 1);
  std::copy(seed.begin(), seed.end(), keys.back().begin());
  for (int64_t i = params.n; i >= 1; --i) {
    keys[static_cast<size_t>(i - 1)] = crypto::sha256(keys[static_cast<size_t>(i)]);
  }
  return KeyChain(params, std::move(keys));
}

MacKey derive_mac_key(const Key32& k_i) {
  static constexpr char kLabel[] = "TBRD-MAC-KEY";  // 12 ASCII bytes
  std::span<const uint8_t> label(reinterpret_cast<const uint8_t*>(kLabel), 12);
  return MacKey{crypto::hmac_sha256(k_i, label)};
}

Key32 compute_mac(const MacKey& mac_key, std::span<const uint8_t> payload) {
  if (payload.empty()) throw std::invalid_argument("payload must be non-empty");
  return crypto::hmac_sha256(mac_key.value, payload);
}

bool verify_commitment(const Key32& disclosed_key, int64_t claimed_interval,
                       const Key32& k0) {
  if (claimed_interval < 0) throw std::invalid_argument("claimed_interval < 0");
  Key32 acc = disclosed_key;
  for (int64_t i = 0; i < claimed_interval; ++i) acc = crypto::sha256(acc);
  return crypto::equal(acc, k0);
}

int64_t interval_of(int64_t t_ms, const ChainParams& params) {
  if (t_ms < params.t0_ms) throw std::invalid_argument("time precedes mission start");
  return (t_ms - params.t0_ms) / params.t_int_ms + 1;
}

bool safety_condition(int64_t arrival_ms, int64_t claimed_interval,
                      const ChainParams& params, int64_t max_skew_ms) {
  // Latest interval the sender's clock could be in when the message arrived.
  int64_t upper = floor_div(arrival_ms + max_skew_ms - params.t0_ms, params.t_int_ms) + 1;
  return upper < claimed_interval + params.d;
}

bool backdate_check(int64_t arrival_ms, int64_t claimed_interval,
                      const ChainParams& params) {
  return arrival_ms - claimed_interval * params.t_int_ms < params.t0_ms + params.t_int_ms;
}

}  // namespace tesla
}  // namespace tbrd
