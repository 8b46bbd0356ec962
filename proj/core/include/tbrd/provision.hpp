#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "tbrd/bytes.hpp"
#include "tbrd/keys_file.hpp"
#include "tbrd/tesla.hpp"
#include "tbrd/uss.hpp"

// Mission setup surrogate for the mobile app + TEE: keychain generation from
// a sealed seed, the transmitter keys file, and the USS registration request.
namespace tbrd {

struct MissionPlan {
  std::string operator_id;  // ASCII, <= 20 bytes
  std::string uas_id;       // ASCII, <= 20 bytes
  int64_t start_ms = 0;     // epoch ms UTC
  int64_t end_ms = 0;
  int64_t t_int_ms = 1000;
  int32_t d = 1;
};

struct ProvisionResult {
  tesla::KeyChain chain;
  KeysFile keys_file;  // K_0 .. K_{n-1}; the seed K_n is withheld
  uss::RegistrationRequest registration;
};

// n = ceil((end - start) / t_int). Throws std::invalid_argument on an empty
// or inverted mission window or over-long ids.
ProvisionResult plan_mission(const MissionPlan& plan, const Key32& seed);

// Reads a 64-hex-char seed file, or creates one (mode 0600) with fresh
// randomness when absent. The seed never leaves this file and the chain.
Key32 load_or_create_sealed_seed(const std::filesystem::path& path);

}  // namespace tbrd
