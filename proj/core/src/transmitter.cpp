#include "tbrd/transmitter.hpp"

#include <algorithm>
#include <stdexcept>

#include "tbrd/tesla.hpp"

namespace tbrd::tx {

UdpSink::UdpSink(std::string host, uint16_t port)
    : socket_(net::udp_broadcast_socket()), host_(std::move(host)), port_(port) {}

bool UdpSink::send(std::span<const uint8_t> pack, int64_t) {
  try {
    net::udp_send(socket_, host_, port_, pack);
    return true;
  } catch (const net::NetError&) {
    return false;
  }
}

namespace {

odid::BasicIdMsg basic_from(const KeysFile& keys) {
  odid::BasicIdMsg m;
  m.id_type = odid::IdType::serial;
  m.ua_type = odid::UaType::multirotor;
  m.uas_id = keys.uas_id;
  return m;
}

odid::LocationMsg location_from(const TelemetrySample& t) {
  odid::LocationMsg m;
  m.status = t.alt_m > 0.5 ? odid::OpStatus::airborne : odid::OpStatus::ground;
  m.direction_deg = static_cast<uint16_t>(t.direction_deg % 360);
  m.speed_mps = t.speed_mps;
  m.vspeed_mps = t.vspeed_mps;
  m.lat_deg = t.lat_deg;
  m.lon_deg = t.lon_deg;
  m.alt_m = t.alt_m;
  m.timestamp_ds = static_cast<uint16_t>((t.t_ms / 100) % 36000);
  return m;
}

odid::SystemMsg system_from(const TelemetrySample& t) {
  odid::SystemMsg m;
  m.operator_location_type = odid::OperatorLocationType::takeoff;
  m.operator_lat_deg = t.operator_lat_deg;
  m.operator_lon_deg = t.operator_lon_deg;
  return m;
}

}  // namespace

odid::MessagePack build_beacon(int64_t i, const TelemetrySample& telemetry,
                               const KeysFile& keys, uint32_t auth_timestamp_s) {
  const int64_t n = keys.params.n;
  const int32_t d = keys.params.d;
  if (i < 1 || i > n - 1) throw std::out_of_range("interval key index out of range");
  if (i - d < 0) throw std::out_of_range("no key to disclose yet");

  odid::MessagePack pack;
  pack.basic = basic_from(keys);
  pack.location = location_from(telemetry);
  pack.system = system_from(telemetry);
  pack.operator_id.operator_id = keys.operator_id;

  Bytes payload = odid::build_auth_payload(static_cast<uint32_t>(i), pack.basic,
                                           pack.location, pack.system, pack.operator_id);

  const Key32& k_i = keys.keys[static_cast<size_t>(i)];
  odid::AuthBundle bundle;
  bundle.interval_counter = static_cast<uint32_t>(i);
  bundle.mac = tesla::compute_mac(tesla::derive_mac_key(k_i), payload);
  bundle.disclosed_key = keys.keys[static_cast<size_t>(i - d)];

  pack.auth_pages = odid::paginate_auth(bundle, auth_timestamp_s);
  return pack;
}

odid::MessagePack build_plain_beacon(const TelemetrySample& telemetry,
                                     const KeysFile& keys) {
  odid::MessagePack pack;
  pack.basic = basic_from(keys);
  pack.location = location_from(telemetry);
  pack.system = system_from(telemetry);
  pack.operator_id.operator_id = keys.operator_id;
  return pack;
}

TxResult run_transmitter(const KeysFile& keys, TelemetrySource& telemetry,
                         PacketSink& sink, Clock& clock, const TxOptions& options,
                         uss::UssClient* uss) {
  if (!keys.params.valid()) throw std::runtime_error("keys file has invalid parameters");
  if (static_cast<int64_t>(keys.keys.size()) != keys.params.n) {
    throw std::runtime_error("keys file must hold n keys");
  }

  TxResult result;
  result.t0_ms = clock.now_ms();

  tesla::ChainParams params = keys.params;
  params.t0_ms = result.t0_ms;

  if (uss && !options.uss_handle.empty()) {
    uss->report_start(options.uss_handle, result.t0_ms);
  }

  const int64_t t_int = params.t_int_ms;
  const int64_t guard = options.window.guard_ms;
  if (guard < 0 || guard >= t_int) throw std::runtime_error("window guard out of range");

  int64_t i = 1;
  while (options.max_intervals == 0 || i <= options.max_intervals) {
    const int64_t interval_start = result.t0_ms + (i - 1) * t_int;
    const int64_t interval_end = interval_start + t_int;
    clock.sleep_until_ms(interval_start);

    auto sample = telemetry.sample_at(clock.now_ms() - result.t0_ms);
    if (!sample) break;  // flight over

    TransmitLogEntry entry;
    entry.interval = i;

    bool can_auth = i <= params.n - 1 && i - params.d >= 0;
    odid::MessagePack pack;
    try {
      if (can_auth) {
        pack = build_beacon(i, *sample, keys,
                            static_cast<uint32_t>(interval_start / 1000));
        entry.authenticated = true;
      } else {
        pack = build_plain_beacon(*sample, keys);
        entry.note = "keys exhausted";
      }
    } catch (const std::exception& e) {
      entry.note = std::string("build failed: ") + e.what();
      entry.t_ms = clock.now_ms();
      result.log.push_back(entry);
      i = std::max(i + 1, tesla::interval_of(clock.now_ms(), params));
      continue;
    }

    // Permitted transmission window: a beacon that misses it is dropped,
    // never deferred into a later interval.
    const int64_t now = clock.now_ms();
    entry.t_ms = now;
    if (now >= interval_start && now < interval_end - guard) {
      Bytes raw = odid::encode_pack(pack);
      if (sink.send(raw, now)) {
        entry.transmitted = true;
      } else {
        entry.note = "channel failure";
      }
    } else {
      entry.note = "missed window";
    }
    result.log.push_back(entry);

    i = std::max(i + 1, tesla::interval_of(clock.now_ms(), params));
  }

  if (uss && !options.uss_handle.empty()) {
    uss->report_end(options.uss_handle, clock.now_ms());
  }
  return result;
}

}  // namespace tbrd::tx
