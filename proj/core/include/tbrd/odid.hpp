#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>

#include "tbrd/bytes.hpp"

// Encode/decode of the five Remote ID message types and the Message Pack,
// including the 4-page framing of the 68-byte authentication bundle.
// Byte-level layout is documented in docs/wire-format.md.
namespace tbrd::odid {

inline constexpr uint8_t kProtocolVersion = 2;
inline constexpr size_t kFrameLen = 25;
inline constexpr uint8_t kAuthType = 0x3;  // signature over the message set
inline constexpr size_t kAuthBundleLen = 68;
inline constexpr size_t kAuthPayloadLen = 104;
inline constexpr size_t kAuthPageCount = 4;
inline constexpr size_t kPage0DataLen = 17;
inline constexpr size_t kPageNDataLen = 23;
inline constexpr size_t kAstmAuthDataCap = 255;

using Frame = std::array<uint8_t, kFrameLen>;

enum class MsgType : uint8_t {
  basic_id = 0x0,
  location = 0x1,
  auth_page = 0x2,
  system = 0x4,
  operator_id = 0x5,
  message_pack = 0xf,
};

enum class IdType : uint8_t { serial = 1, caa_assigned = 2 };

enum class UaType : uint8_t {
  none = 0,
  aeroplane = 1,
  multirotor = 2,
  gyroplane = 3,
  hybrid_lift = 4,
  glider = 5,
  lighter_than_air = 6,
  free_balloon = 7,
};

enum class OpStatus : uint8_t { ground = 0, airborne = 1 };

enum class OperatorLocationType : uint8_t { takeoff = 0, dynamic = 1, fixed = 2 };

struct BasicIdMsg {
  IdType id_type = IdType::serial;
  UaType ua_type = UaType::multirotor;
  std::string uas_id;  // up to 20 ASCII bytes, zero-padded on the wire

  bool operator==(const BasicIdMsg&) const = default;
};

struct LocationMsg {
  OpStatus status = OpStatus::ground;
  uint16_t direction_deg = 0;  // 0..359
  double speed_mps = 0;        // >= 0, 0.01 m/s resolution
  double vspeed_mps = 0;       // signed, 0.01 m/s resolution
  double lat_deg = 0;          // [-90, 90], 1e-7 deg resolution
  double lon_deg = 0;          // [-180, 180], 1e-7 deg resolution
  double alt_m = 0;            // geodetic, [-1000, 31767.5], 0.5 m resolution
  uint16_t timestamp_ds = 0;   // tenths of seconds past the hour, 0..35999

  bool operator==(const LocationMsg&) const = default;
};

struct SystemMsg {
  OperatorLocationType operator_location_type = OperatorLocationType::takeoff;
  double operator_lat_deg = 0;
  double operator_lon_deg = 0;

  bool operator==(const SystemMsg&) const = default;
};

struct OperatorIdMsg {
  std::string operator_id;  // up to 20 ASCII bytes, zero-padded on the wire

  bool operator==(const OperatorIdMsg&) const = default;
};

// i || mac || disclosed key, 68 bytes on the wire.
struct AuthBundle {
  uint32_t interval_counter = 0;  // serialized big-endian
  Key32 mac{};
  Key32 disclosed_key{};

  bool operator==(const AuthBundle&) const = default;
};

struct AuthPageMsg {
  uint8_t page_index = 0;             // 0..3
  uint8_t last_page_index = 3;        // page 0 only
  uint8_t auth_data_len = kAuthBundleLen;  // page 0 only
  uint32_t timestamp_s = 0;           // page 0 only; excluded from the MAC
  Bytes data;                         // 17 bytes on page 0, 23 on pages 1..3

  bool operator==(const AuthPageMsg&) const = default;
};

using AnyMsg = std::variant<BasicIdMsg, LocationMsg, SystemMsg, OperatorIdMsg, AuthPageMsg>;

// Basic ID, Location, System, Operator ID plus 4 auth pages when present.
struct MessagePack {
  BasicIdMsg basic;
  LocationMsg location;
  SystemMsg system;
  OperatorIdMsg operator_id;
  std::optional<std::array<AuthPageMsg, kAuthPageCount>> auth_pages;

  bool authenticated() const { return auth_pages.has_value(); }
  size_t frame_count() const { return authenticated() ? 8 : 4; }
};

// Thrown on out-of-range fields, truncated input, or malformed structure.
struct CodecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Frame encode_frame(const BasicIdMsg& m);
Frame encode_frame(const LocationMsg& m);
Frame encode_frame(const SystemMsg& m);
Frame encode_frame(const OperatorIdMsg& m);
Frame encode_frame(const AuthPageMsg& m);
Frame encode_frame(const AnyMsg& m);

AnyMsg decode_frame(std::span<const uint8_t> raw);

Bytes serialize_bundle(const AuthBundle& b);  // exactly 68 bytes
AuthBundle parse_bundle(std::span<const uint8_t> raw);

// 4-byte big-endian interval counter followed by the four data frames in the
// order Basic ID, Location, System, Operator ID; exactly 104 bytes.
Bytes build_auth_payload(uint32_t interval_counter, const BasicIdMsg& basic,
                         const LocationMsg& loc, const SystemMsg& sys,
                         const OperatorIdMsg& op);

std::array<AuthPageMsg, kAuthPageCount> paginate_auth(const AuthBundle& bundle,
                                                      uint32_t timestamp_s = 0);

// Exact inverse of paginate_auth; throws CodecError on a missing or duplicate
// page, or on a declared length other than 68.
AuthBundle reassemble_auth(std::span<const AuthPageMsg> pages);

Bytes encode_pack(const MessagePack& pack);  // 203 bytes authenticated, 103 plain
MessagePack decode_pack(std::span<const uint8_t> raw);

}  // namespace tbrd::odid
