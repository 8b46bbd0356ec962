#include "tbrd/odid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace tbrd::odid {

namespace {

uint8_t header_byte(MsgType t) {
  return static_cast<uint8_t>((static_cast<uint8_t>(t) << 4) | kProtocolVersion);
}

void check_id_string(const std::string& s, const char* what) {
  if (s.size() > 20) throw CodecError(std::string(what) + " longer than 20 bytes");
  for (char c : s) {
    if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) > 0x7e) {
      throw CodecError(std::string(what) + " must be printable ASCII");
    }
  }
}

void put_id_string(Frame& f, size_t off, const std::string& s) {
  std::memcpy(f.data() + off, s.data(), s.size());
}

std::string get_id_string(std::span<const uint8_t> raw, size_t off) {
  size_t len = 0;
  while (len < 20 && raw[off + len] != 0) ++len;
  return std::string(reinterpret_cast<const char*>(raw.data() + off), len);
}

int32_t quantize_deg(double deg) {
  return static_cast<int32_t>(std::llround(deg * 1e7));
}

// altitude: 0.5 m LSB with a +1000 m offset
uint16_t encode_alt(double alt_m) {
  if (alt_m < -1000.0 || alt_m > 31767.5) throw CodecError("altitude out of range");
  return static_cast<uint16_t>(std::llround((alt_m + 1000.0) * 2.0));
}
double decode_alt(uint16_t v) { return v / 2.0 - 1000.0; }

// speeds: 0.01 m/s LSB
uint16_t encode_speed(double mps) {
  if (mps < 0) throw CodecError("speed must be >= 0");
  int64_t q = std::llround(mps * 100.0);
  if (q > 0xffff) throw CodecError("speed out of range");
  return static_cast<uint16_t>(q);
}
int16_t encode_vspeed(double mps) {
  int64_t q = std::llround(mps * 100.0);
  if (q < INT16_MIN || q > INT16_MAX) throw CodecError("vertical speed out of range");
  return static_cast<int16_t>(q);
}

void put_u16(Frame& f, size_t off, uint16_t v) {
  f[off] = static_cast<uint8_t>(v & 0xff);
  f[off + 1] = static_cast<uint8_t>(v >> 8);
}
void put_i16(Frame& f, size_t off, int16_t v) { put_u16(f, off, static_cast<uint16_t>(v)); }
void put_i32(Frame& f, size_t off, int32_t v) {
  uint32_t u = static_cast<uint32_t>(v);
  for (int i = 0; i < 4; ++i) f[off + i] = static_cast<uint8_t>(u >> (8 * i));
}
void put_u32(Frame& f, size_t off, uint32_t v) {
  for (int i = 0; i < 4; ++i) f[off + i] = static_cast<uint8_t>(v >> (8 * i));
}

}  // namespace

Frame encode_frame(const BasicIdMsg& m) {
  check_id_string(m.uas_id, "uas_id");
  uint8_t id_type = static_cast<uint8_t>(m.id_type);
  uint8_t ua_type = static_cast<uint8_t>(m.ua_type);
  if (id_type != 1 && id_type != 2) throw CodecError("bad id_type");
  if (ua_type > 7) throw CodecError("bad ua_type");

  Frame f{};
  f[0] = header_byte(MsgType::basic_id);
  f[1] = static_cast<uint8_t>((id_type << 4) | ua_type);
  put_id_string(f, 2, m.uas_id);
  return f;
}

Frame encode_frame(const LocationMsg& m) {
  if (m.direction_deg > 359) throw CodecError("direction out of range");
  if (m.lat_deg < -90.0 || m.lat_deg > 90.0) throw CodecError("latitude out of range");
  if (m.lon_deg < -180.0 || m.lon_deg > 180.0) throw CodecError("longitude out of range");
  if (m.timestamp_ds > 35999) throw CodecError("timestamp out of range");
  uint8_t status = static_cast<uint8_t>(m.status);
  if (status > 1) throw CodecError("bad status");

  Frame f{};
  f[0] = header_byte(MsgType::location);
  f[1] = status;
  put_u16(f, 2, m.direction_deg);
  put_u16(f, 4, encode_speed(m.speed_mps));
  put_i16(f, 6, encode_vspeed(m.vspeed_mps));
  put_i32(f, 8, quantize_deg(m.lat_deg));
  put_i32(f, 12, quantize_deg(m.lon_deg));
  put_u16(f, 16, encode_alt(m.alt_m));
  put_u16(f, 18, m.timestamp_ds);
  // bytes 20..24 reserved
  return f;
}

Frame encode_frame(const SystemMsg& m) {
  if (m.operator_lat_deg < -90.0 || m.operator_lat_deg > 90.0)
    throw CodecError("operator latitude out of range");
  if (m.operator_lon_deg < -180.0 || m.operator_lon_deg > 180.0)
    throw CodecError("operator longitude out of range");
  uint8_t loc_type = static_cast<uint8_t>(m.operator_location_type);
  if (loc_type > 2) throw CodecError("bad operator location type");

  Frame f{};
  f[0] = header_byte(MsgType::system);
  f[1] = loc_type;
  put_i32(f, 2, quantize_deg(m.operator_lat_deg));
  put_i32(f, 6, quantize_deg(m.operator_lon_deg));
  return f;
}

Frame encode_frame(const OperatorIdMsg& m) {
  check_id_string(m.operator_id, "operator_id");
  Frame f{};
  f[0] = header_byte(MsgType::operator_id);
  f[1] = 0;  // operator id type: CAA-issued
  put_id_string(f, 2, m.operator_id);
  return f;
}

Frame encode_frame(const AuthPageMsg& m) {
  if (m.page_index > 3) throw CodecError("auth page index out of range");

  Frame f{};
  f[0] = header_byte(MsgType::auth_page);
  f[1] = static_cast<uint8_t>((kAuthType << 4) | m.page_index);
  if (m.page_index == 0) {
    if (m.data.size() != kPage0DataLen) throw CodecError("page 0 carries 17 bytes");
    f[2] = m.last_page_index;
    f[3] = m.auth_data_len;
    put_u32(f, 4, m.timestamp_s);
    std::memcpy(f.data() + 8, m.data.data(), kPage0DataLen);
  } else {
    if (m.data.size() != kPageNDataLen) throw CodecError("pages 1-3 carry 23 bytes");
    std::memcpy(f.data() + 2, m.data.data(), kPageNDataLen);
  }
  return f;
}

Frame encode_frame(const AnyMsg& m) {
  return std::visit([](const auto& v) { return encode_frame(v); }, m);
}

AnyMsg decode_frame(std::span<const uint8_t> raw) {
  if (raw.size() != kFrameLen) throw CodecError("frame must be 25 bytes");
  uint8_t version = raw[0] & 0x0f;
  if (version != kProtocolVersion) throw CodecError("unsupported protocol version");
  uint8_t type = raw[0] >> 4;

  switch (static_cast<MsgType>(type)) {
    case MsgType::basic_id: {
      BasicIdMsg m;
      uint8_t id_type = raw[1] >> 4;
      uint8_t ua_type = raw[1] & 0x0f;
      if (id_type != 1 && id_type != 2) throw CodecError("bad id_type");
      if (ua_type > 7) throw CodecError("bad ua_type");
      m.id_type = static_cast<IdType>(id_type);
      m.ua_type = static_cast<UaType>(ua_type);
      m.uas_id = get_id_string(raw, 2);
      return m;
    }
    case MsgType::location: {
      LocationMsg m;
      if (raw[1] > 1) throw CodecError("bad status");
      m.status = static_cast<OpStatus>(raw[1]);
      m.direction_deg = get_u16le(raw, 2);
      if (m.direction_deg > 359) throw CodecError("direction out of range");
      m.speed_mps = get_u16le(raw, 4) / 100.0;
      m.vspeed_mps = get_i16le(raw, 6) / 100.0;
      m.lat_deg = get_i32le(raw, 8) / 1e7;
      m.lon_deg = get_i32le(raw, 12) / 1e7;
      m.alt_m = decode_alt(get_u16le(raw, 16));
      m.timestamp_ds = get_u16le(raw, 18);
      if (m.timestamp_ds > 35999) throw CodecError("timestamp out of range");
      return m;
    }
    case MsgType::system: {
      SystemMsg m;
      if (raw[1] > 2) throw CodecError("bad operator location type");
      m.operator_location_type = static_cast<OperatorLocationType>(raw[1]);
      m.operator_lat_deg = get_i32le(raw, 2) / 1e7;
      m.operator_lon_deg = get_i32le(raw, 6) / 1e7;
      return m;
    }
    case MsgType::operator_id: {
      OperatorIdMsg m;
      m.operator_id = get_id_string(raw, 2);
      return m;
    }
    case MsgType::auth_page: {
      AuthPageMsg m;
      if ((raw[1] >> 4) != kAuthType) throw CodecError("unknown auth type");
      m.page_index = raw[1] & 0x0f;
      if (m.page_index > 3) throw CodecError("auth page index out of range");
      if (m.page_index == 0) {
        m.last_page_index = raw[2];
        m.auth_data_len = raw[3];
        m.timestamp_s = get_u32le(raw, 4);
        m.data.assign(raw.begin() + 8, raw.begin() + 8 + kPage0DataLen);
      } else {
        m.data.assign(raw.begin() + 2, raw.begin() + 2 + kPageNDataLen);
      }
      return m;
    }
    default:
      throw CodecError("unknown message type");
  }
}

Bytes serialize_bundle(const AuthBundle& b) {
  Bytes out;
  out.reserve(kAuthBundleLen);
  put_u32be(out, b.interval_counter);
  out.insert(out.end(), b.mac.begin(), b.mac.end());
  out.insert(out.end(), b.disclosed_key.begin(), b.disclosed_key.end());
  return out;
}

AuthBundle parse_bundle(std::span<const uint8_t> raw) {
  if (raw.size() != kAuthBundleLen) throw CodecError("auth bundle must be 68 bytes");
  AuthBundle b;
  b.interval_counter = get_u32be(raw, 0);
  std::copy(raw.begin() + 4, raw.begin() + 36, b.mac.begin());
  std::copy(raw.begin() + 36, raw.end(), b.disclosed_key.begin());
  return b;
}

Bytes build_auth_payload(uint32_t interval_counter, const BasicIdMsg& basic,
                         const LocationMsg& loc, const SystemMsg& sys,
                         const OperatorIdMsg& op) {
  if (interval_counter < 1) throw CodecError("interval counter must be >= 1");
  Bytes out;
  out.reserve(kAuthPayloadLen);
  put_u32be(out, interval_counter);
  for (const Frame& f :
       {encode_frame(basic), encode_frame(loc), encode_frame(sys), encode_frame(op)}) {
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

std::array<AuthPageMsg, kAuthPageCount> paginate_auth(const AuthBundle& bundle,
                                                      uint32_t timestamp_s) {
  Bytes raw = serialize_bundle(bundle);
  std::array<AuthPageMsg, kAuthPageCount> pages;

  pages[0].page_index = 0;
  pages[0].last_page_index = kAuthPageCount - 1;
  pages[0].auth_data_len = kAuthBundleLen;
  pages[0].timestamp_s = timestamp_s;
  pages[0].data.assign(raw.begin(), raw.begin() + kPage0DataLen);

  size_t off = kPage0DataLen;
  for (size_t p = 1; p < kAuthPageCount; ++p) {
    pages[p].page_index = static_cast<uint8_t>(p);
    size_t take = std::min(kPageNDataLen, raw.size() - off);
    pages[p].data.assign(raw.begin() + off, raw.begin() + off + take);
    pages[p].data.resize(kPageNDataLen, 0);  // last page zero-padded
    off += take;
  }
  return pages;
}

AuthBundle reassemble_auth(std::span<const AuthPageMsg> pages) {
  std::array<const AuthPageMsg*, kAuthPageCount> by_index{};
  for (const auto& p : pages) {
    if (p.page_index >= kAuthPageCount) throw CodecError("auth page index out of range");
    if (by_index[p.page_index]) throw CodecError("duplicate auth page");
    by_index[p.page_index] = &p;
  }
  for (size_t i = 0; i < kAuthPageCount; ++i) {
    if (!by_index[i]) throw CodecError("missing auth page " + std::to_string(i));
  }
  if (by_index[0]->auth_data_len != kAuthBundleLen) {
    throw CodecError("declared auth length mismatch");
  }
  if (by_index[0]->last_page_index != kAuthPageCount - 1) {
    throw CodecError("declared page count mismatch");
  }

  Bytes raw;
  raw.reserve(kAuthBundleLen);
  raw.insert(raw.end(), by_index[0]->data.begin(), by_index[0]->data.end());
  for (size_t i = 1; i < kAuthPageCount; ++i) {
    raw.insert(raw.end(), by_index[i]->data.begin(), by_index[i]->data.end());
  }
  raw.resize(kAuthBundleLen);
  return parse_bundle(raw);
}

Bytes encode_pack(const MessagePack& pack) {
  Bytes out;
  size_t count = pack.frame_count();
  out.reserve(3 + count * kFrameLen);
  out.push_back(header_byte(MsgType::message_pack));
  out.push_back(static_cast<uint8_t>(kFrameLen));
  out.push_back(static_cast<uint8_t>(count));

  auto append = [&out](const Frame& f) { out.insert(out.end(), f.begin(), f.end()); };
  append(encode_frame(pack.basic));
  append(encode_frame(pack.location));
  append(encode_frame(pack.system));
  append(encode_frame(pack.operator_id));
  if (pack.auth_pages) {
    for (const auto& page : *pack.auth_pages) append(encode_frame(page));
  }
  return out;
}

MessagePack decode_pack(std::span<const uint8_t> raw) {
  if (raw.size() < 3) throw CodecError("pack truncated");
  if (raw[0] != header_byte(MsgType::message_pack)) throw CodecError("not a message pack");
  if (raw[1] != kFrameLen) throw CodecError("unexpected inner message size");
  uint8_t count = raw[2];
  if (count != 4 && count != 8) throw CodecError("pack must hold 4 or 8 messages");
  if (raw.size() != 3 + static_cast<size_t>(count) * kFrameLen) {
    throw CodecError("pack length mismatch");
  }

  auto frame_at = [&raw](size_t idx) {
    return raw.subspan(3 + idx * kFrameLen, kFrameLen);
  };

  MessagePack pack;
  AnyMsg m0 = decode_frame(frame_at(0));
  AnyMsg m1 = decode_frame(frame_at(1));
  AnyMsg m2 = decode_frame(frame_at(2));
  AnyMsg m3 = decode_frame(frame_at(3));
  if (!std::holds_alternative<BasicIdMsg>(m0) || !std::holds_alternative<LocationMsg>(m1) ||
      !std::holds_alternative<SystemMsg>(m2) || !std::holds_alternative<OperatorIdMsg>(m3)) {
    throw CodecError("pack frames out of order");
  }
  pack.basic = std::get<BasicIdMsg>(m0);
  pack.location = std::get<LocationMsg>(m1);
  pack.system = std::get<SystemMsg>(m2);
  pack.operator_id = std::get<OperatorIdMsg>(m3);

  if (count == 8) {
    std::array<AuthPageMsg, kAuthPageCount> pages;
    for (size_t i = 0; i < kAuthPageCount; ++i) {
      AnyMsg m = decode_frame(frame_at(4 + i));
      auto* page = std::get_if<AuthPageMsg>(&m);
      if (!page) throw CodecError("pack frames out of order");
      if (page->page_index != i) throw CodecError("auth pages out of order");
      pages[i] = std::move(*page);
    }
    pack.auth_pages = std::move(pages);
  }
  return pack;
}

}  // namespace tbrd::odid
