#include "tbrd/bench.hpp"

#include <openssl/ec.h>
#include <openssl/evp.h>

#include <chrono>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "tbrd/crypto.hpp"

namespace tbrd::bench {

namespace {

using Us = std::chrono::duration<double, std::micro>;

struct EvpPkeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct EvpPkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};
struct EvpMdCtxDeleter {
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};

std::unique_ptr<EVP_PKEY, EvpPkeyDeleter> generate_p521_key() {
  std::unique_ptr<EVP_PKEY_CTX, EvpPkeyCtxDeleter> ctx(
      EVP_PKEY_CTX_new_id(EVP_PKEY_EC, nullptr));
  if (!ctx || EVP_PKEY_keygen_init(ctx.get()) <= 0 ||
      EVP_PKEY_CTX_set_ec_paramgen_curve_nid(ctx.get(), NID_secp521r1) <= 0) {
    throw std::runtime_error("P-521 keygen init failed");
  }
  EVP_PKEY* raw = nullptr;
  if (EVP_PKEY_keygen(ctx.get(), &raw) <= 0) {
    throw std::runtime_error("P-521 keygen failed");
  }
  return std::unique_ptr<EVP_PKEY, EvpPkeyDeleter>(raw);
}

size_t ecdsa_sign(EVP_PKEY* key, std::span<const uint8_t> payload,
                  std::vector<uint8_t>& sig) {
  std::unique_ptr<EVP_MD_CTX, EvpMdCtxDeleter> md(EVP_MD_CTX_new());
  if (!md || EVP_DigestSignInit(md.get(), nullptr, EVP_sha512(), nullptr, key) <= 0) {
    throw std::runtime_error("ECDSA sign init failed");
  }
  size_t sig_len = sig.size();
  if (EVP_DigestSign(md.get(), sig.data(), &sig_len, payload.data(), payload.size()) <= 0) {
    throw std::runtime_error("ECDSA sign failed");
  }
  return sig_len;
}

}  // namespace

CryptoBenchResult bench_hmac_vs_ecdsa(size_t payload_len, int iterations) {
  if (iterations < 100) throw std::invalid_argument("iterations must be >= 100");

  std::vector<uint8_t> payload(payload_len, 0xa5);
  Key32 mac_key = crypto::sha256(payload);  // any fixed key

  using clock = std::chrono::steady_clock;

  // warm up then time the HMAC route
  volatile uint8_t guard = 0;
  for (int i = 0; i < 16; ++i) guard ^= crypto::hmac_sha256(mac_key, payload)[0];
  auto t0 = clock::now();
  for (int i = 0; i < iterations; ++i) {
    guard ^= crypto::hmac_sha256(mac_key, payload)[0];
  }
  auto t1 = clock::now();
  double hmac_mean = Us(t1 - t0).count() / iterations;

  // ECDSA P-521 (~256-bit security) over the same payload
  auto key = generate_p521_key();
  std::vector<uint8_t> sig(256);
  size_t sig_len = ecdsa_sign(key.get(), payload, sig);

  int sig_iters = std::max(iterations / 10, 100);
  auto t2 = clock::now();
  for (int i = 0; i < sig_iters; ++i) {
    std::vector<uint8_t> s(256);
    sig_len = ecdsa_sign(key.get(), payload, s);
  }
  auto t3 = clock::now();
  double sig_mean = Us(t3 - t2).count() / sig_iters;

  CryptoBenchResult r;
  r.hmac_mean_us = hmac_mean;
  r.sig_mean_us = sig_mean;
  r.ratio = hmac_mean > 0 ? sig_mean / hmac_mean : 0;
  r.hmac_out_bytes = 32;
  r.sig_bytes = sig_len;
  (void)guard;
  return r;
}

std::string format_report(const CryptoBenchResult& r) {
  std::ostringstream out;
  out << "HMAC-SHA-256: " << r.hmac_mean_us << " us/op, output " << r.hmac_out_bytes
      << " bytes\n"
      << "ECDSA P-521:  " << r.sig_mean_us << " us/op, signature " << r.sig_bytes
      << " bytes\n"
      << "signature/HMAC time ratio: " << r.ratio << "x\n";
  return out.str();
}

}  // namespace tbrd::bench
