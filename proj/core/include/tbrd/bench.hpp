#pragma once

#include <cstddef>
#include <string>

namespace tbrd::bench {

// Relative compute cost of the two authentication routes on this host:
// HMAC-SHA-256 vs an elliptic-curve signature at an equivalent security
// strength (P-521). Sizes are the 32-byte MAC and the DER-encoded signature.
struct CryptoBenchResult {
  double hmac_mean_us = 0;
  double sig_mean_us = 0;
  double ratio = 0;  // sig_mean / hmac_mean
  size_t hmac_out_bytes = 0;
  size_t sig_bytes = 0;  // DER-encoded ECDSA signature length
};

// Requires iterations >= 100. payload_len may be zero.
CryptoBenchResult bench_hmac_vs_ecdsa(size_t payload_len, int iterations);

std::string format_report(const CryptoBenchResult& r);

}  // namespace tbrd::bench
