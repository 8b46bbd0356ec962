#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tbrd/bytes.hpp"
#include "tbrd/tesla.hpp"

namespace tbrd {

// The transmitter key handoff file. Text, line-oriented:
//
//   TBRD-KEYS v1
//   operator_id=<ascii>
//   uas_id=<ascii>
//   t_int_ms=<int>
//   d=<int>
//   n=<int>
//   t0_ms=<int>            (0 until the mission starts)
//   <64 hex chars>         K_0 first, then K_1 .. K_{n-1}
//
// Exactly n key lines; the chain seed K_n is never written.
struct KeysFile {
  std::string operator_id;
  std::string uas_id;
  tesla::ChainParams params;        // t0_ms as recorded in the file
  std::vector<Key32> keys;          // K_0 .. K_{n-1}

  const Key32& commitment() const { return keys.front(); }
};

std::string format_keys_file(const KeysFile& kf);
KeysFile parse_keys_file(const std::string& text);

void write_keys_file(const std::filesystem::path& path, const KeysFile& kf);
KeysFile load_keys_file(const std::filesystem::path& path);

}  // namespace tbrd
