#include "doctest.h"

#include <fstream>
#include <sstream>

#include "tbrd/keys_file.hpp"
#include "tbrd/odid.hpp"
#include "tbrd/provision.hpp"
#include "tbrd/tesla.hpp"
#include "tbrd/transmitter.hpp"
#include "tbrd/uss.hpp"

using namespace tbrd;

namespace {

std::string read_hex_file(const std::string& name) {
  std::ifstream in(std::string(TBRD_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::string hex;
  in >> hex;
  return hex;
}

// 4-byte big-endian length prefix + UTF-8 JSON payload
std::string unframe(const Bytes& framed) {
  REQUIRE(framed.size() >= 4);
  uint32_t len = get_u32be(framed, 0);
  REQUIRE(framed.size() == 4 + len);
  return std::string(framed.begin() + 4, framed.end());
}

}  // namespace

TEST_CASE("shipped beacon vector decodes and re-verifies") {
  Bytes raw = from_hex(read_hex_file("beacon_interval4.hex"));
  odid::MessagePack pack = odid::decode_pack(raw);
  CHECK(pack.basic.uas_id == "UAS-TX");
  CHECK(pack.operator_id.operator_id == "OP-TX");
  REQUIRE(pack.authenticated());

  odid::AuthBundle bundle = odid::reassemble_auth(*pack.auth_pages);
  CHECK(bundle.interval_counter == 4);

  // rebuild the chain the fixture was produced from and re-derive the MAC
  MissionPlan plan;
  plan.operator_id = "OP-TX";
  plan.uas_id = "UAS-TX";
  plan.start_ms = 1'000'000;
  plan.end_ms = plan.start_ms + 10'000;
  KeysFile keys = plan_mission(plan, Key32{}).keys_file;

  Bytes payload;
  put_u32be(payload, bundle.interval_counter);
  payload.insert(payload.end(), raw.begin() + 3, raw.begin() + 3 + 4 * odid::kFrameLen);
  CHECK(tesla::compute_mac(tesla::derive_mac_key(keys.keys[4]), payload) == bundle.mac);
  CHECK(bundle.disclosed_key == keys.keys[3]);

  CHECK(encode_pack(pack) == raw);
}

TEST_CASE("shipped USS frames replay against a fresh registry") {
  uss::Registry reg;
  for (const char* name : {"uss_register", "uss_start", "uss_query"}) {
    std::string request = unframe(from_hex(read_hex_file(std::string(name) + "_request.hex")));
    std::string expected =
        unframe(from_hex(read_hex_file(std::string(name) + "_response.hex")));
    CHECK(handle_request(reg, request) == expected);
  }
}
