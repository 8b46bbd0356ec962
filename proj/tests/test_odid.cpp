#include "doctest.h"

#include <random>

#include "tbrd/odid.hpp"

using namespace tbrd;
using namespace tbrd::odid;

namespace {

LocationMsg random_location(std::mt19937_64& rng) {
  auto unit = [&rng] { return (rng() % 1'000'000) / 1'000'000.0; };
  LocationMsg m;
  m.status = rng() % 2 ? OpStatus::airborne : OpStatus::ground;
  m.direction_deg = static_cast<uint16_t>(rng() % 360);
  m.speed_mps = unit() * 120.0;
  m.vspeed_mps = unit() * 40.0 - 20.0;
  m.lat_deg = unit() * 180.0 - 90.0;
  m.lon_deg = unit() * 360.0 - 180.0;
  m.alt_m = unit() * 4000.0 - 500.0;
  m.timestamp_ds = static_cast<uint16_t>(rng() % 36000);
  return m;
}

AuthBundle random_bundle(std::mt19937_64& rng) {
  AuthBundle b;
  b.interval_counter = static_cast<uint32_t>(1 + rng() % 100000);
  for (auto& x : b.mac) x = static_cast<uint8_t>(rng());
  for (auto& x : b.disclosed_key) x = static_cast<uint8_t>(rng());
  return b;
}

MessagePack sample_pack(std::mt19937_64& rng, bool authenticated) {
  MessagePack p;
  p.basic.id_type = IdType::serial;
  p.basic.ua_type = UaType::multirotor;
  p.basic.uas_id = "UAS" + std::to_string(rng() % 100000);
  p.location = random_location(rng);
  p.system.operator_location_type = OperatorLocationType::takeoff;
  p.system.operator_lat_deg = 42.0;
  p.system.operator_lon_deg = -71.0;
  p.operator_id.operator_id = "OP" + std::to_string(rng() % 100000);
  if (authenticated) {
    p.auth_pages = paginate_auth(random_bundle(rng), static_cast<uint32_t>(rng()));
  }
  return p;
}

}  // namespace

TEST_CASE("basic id frame layout") {
  BasicIdMsg m;
  m.id_type = IdType::serial;
  m.ua_type = UaType::multirotor;
  m.uas_id = "TESTUAS123";
  Frame f = encode_frame(m);

  CHECK(f[0] == 0x02);  // type 0x0, version 2
  CHECK(f[1] == ((1 << 4) | 2));
  CHECK(std::string(reinterpret_cast<const char*>(f.data() + 2), 10) == "TESTUAS123");
  for (size_t i = 12; i < 22; ++i) CHECK(f[i] == 0);  // zero padding
}

TEST_CASE("location frame: zero identity and degree quantization") {
  LocationMsg zeros;
  zeros.alt_m = -1000.0;  // encodes as raw 0
  Frame f = encode_frame(zeros);
  CHECK(f[0] == 0x12);
  for (size_t i = 8; i < 16; ++i) CHECK(f[i] == 0);  // lat/lon all-zero

  LocationMsg boston;
  boston.lat_deg = 42.3398;
  boston.lon_deg = -71.0892;
  Frame g = encode_frame(boston);
  // 423398000 as signed little-endian 32-bit
  CHECK(g[8] == 0x70);
  CHECK(g[9] == 0x8a);
  CHECK(g[10] == 0x3c);
  CHECK(g[11] == 0x19);
  int32_t lat_raw = static_cast<int32_t>(get_u32le(g, 8));
  int32_t lon_raw = static_cast<int32_t>(get_u32le(g, 12));
  CHECK(lat_raw == 423398000);
  CHECK(lon_raw == -710892000);
}

TEST_CASE("encode rejects out-of-range fields") {
  LocationMsg m;
  m.lat_deg = 90.5;
  CHECK_THROWS_AS(encode_frame(m), CodecError);
  m.lat_deg = 0;
  m.direction_deg = 360;
  CHECK_THROWS_AS(encode_frame(m), CodecError);

  BasicIdMsg b;
  b.uas_id = "THIS-ID-IS-FAR-TOO-LONG-TO-FIT";
  CHECK_THROWS_AS(encode_frame(b), CodecError);
}

TEST_CASE("decode_frame rejects truncated and unknown input") {
  Bytes short_frame(24, 0);
  CHECK_THROWS_AS(decode_frame(short_frame), CodecError);

  Bytes unknown(25, 0);
  unknown[0] = (0x9 << 4) | 2;  // type nibble 0x9
  CHECK_THROWS_AS(decode_frame(unknown), CodecError);
}

TEST_CASE("location round-trip: decode(encode(m)) = m up to quantization") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    LocationMsg m = random_location(rng);
    Frame f = encode_frame(m);
    auto decoded = decode_frame(f);
    auto* loc = std::get_if<LocationMsg>(&decoded);
    REQUIRE(loc != nullptr);

    CHECK(loc->status == m.status);
    CHECK(loc->direction_deg == m.direction_deg);
    CHECK(loc->timestamp_ds == m.timestamp_ds);
    CHECK(std::abs(loc->speed_mps - m.speed_mps) <= 0.0051);
    CHECK(std::abs(loc->vspeed_mps - m.vspeed_mps) <= 0.0051);
    CHECK(std::abs(loc->lat_deg - m.lat_deg) <= 5e-8);
    CHECK(std::abs(loc->lon_deg - m.lon_deg) <= 5e-8);
    CHECK(std::abs(loc->alt_m - m.alt_m) <= 0.25);

    // re-encoding the decoded value reproduces the wire bytes exactly
    CHECK(encode_frame(*loc) == f);
  }
}

TEST_CASE("auth payload layout") {
  std::mt19937_64 rng(5);
  MessagePack p = sample_pack(rng, false);
  Bytes payload = build_auth_payload(1, p.basic, p.location, p.system, p.operator_id);
  CHECK(payload.size() == 104);
  CHECK(payload[0] == 0x00);
  CHECK(payload[1] == 0x00);
  CHECK(payload[2] == 0x00);
  CHECK(payload[3] == 0x01);

  LocationMsg other = p.location;
  other.direction_deg = (other.direction_deg + 10) % 360;
  Bytes changed = build_auth_payload(1, p.basic, other, p.system, p.operator_id);
  CHECK(changed != payload);
}

TEST_CASE("auth pagination carries the 68-byte bundle exactly") {
  std::mt19937_64 rng(6);
  AuthBundle b = random_bundle(rng);
  Bytes raw = serialize_bundle(b);
  CHECK(raw.size() == 68);

  auto pages = paginate_auth(b, 1234);
  CHECK(pages.size() == 4);
  CHECK(pages[0].data == Bytes(raw.begin(), raw.begin() + 17));
  CHECK(pages[0].auth_data_len == 68);
  for (const auto& page : pages) CHECK(encode_frame(page).size() == 25);

  for (int trial = 0; trial < 50; ++trial) {
    AuthBundle bundle = random_bundle(rng);
    CHECK(reassemble_auth(paginate_auth(bundle, 0)) == bundle);
  }
}

TEST_CASE("reassemble_auth rejects structural damage") {
  std::mt19937_64 rng(7);
  auto pages = paginate_auth(random_bundle(rng), 0);

  std::vector<AuthPageMsg> missing(pages.begin(), pages.end());
  missing.erase(missing.begin() + 2);
  missing.push_back(pages[3]);  // duplicate 3, still no page 2
  CHECK_THROWS_AS(reassemble_auth(missing), CodecError);

  auto bad_len = pages;
  bad_len[0].auth_data_len = 67;
  CHECK_THROWS_AS(reassemble_auth(bad_len), CodecError);
}

TEST_CASE("message pack: sizes, round-trip, count validation") {
  std::mt19937_64 rng(8);
  MessagePack p = sample_pack(rng, true);
  Bytes raw = encode_pack(p);
  CHECK(raw.size() == 203);

  MessagePack back = decode_pack(raw);
  CHECK(encode_pack(back) == raw);

  MessagePack plain = sample_pack(rng, false);
  Bytes plain_raw = encode_pack(plain);
  CHECK(plain_raw.size() == 103);
  CHECK(encode_pack(decode_pack(plain_raw)) == plain_raw);

  Bytes bad_count = raw;
  bad_count[2] = 7;
  CHECK_THROWS_AS(decode_pack(bad_count), CodecError);

  for (int trial = 0; trial < 200; ++trial) {
    MessagePack q = sample_pack(rng, trial % 2 == 0);
    Bytes bytes = encode_pack(q);
    CHECK(encode_pack(decode_pack(bytes)) == bytes);
  }
}

TEST_CASE("authentication overhead constants") {
  std::mt19937_64 rng(9);
  Bytes bundle = serialize_bundle(random_bundle(rng));
  CHECK(bundle.size() == 68);
  CHECK(bundle.size() <= 255);            // broadcast auth-data cap
  CHECK(68 * 2 < 139 + 4);                // under half the signature baseline
  CHECK(encode_pack(sample_pack(rng, true)).size() == 203);
}
