#include "tbrd/uss_client.hpp"

#include <charconv>

#include "json.hpp"
#include "tbrd/net.hpp"

namespace tbrd::uss {

using nlohmann::json;

std::optional<Ack> LocalUssClient::register_mission(const RegistrationRequest& req) {
  try {
    return Ack{true, reg_.register_mission(req), ""};
  } catch (const RegistryError& e) {
    return Ack{false, "", e.code};
  }
}

std::optional<Ack> LocalUssClient::report_start(const std::string& handle, int64_t t0_ms) {
  try {
    reg_.start(handle, t0_ms);
    return Ack{true, "", ""};
  } catch (const RegistryError& e) {
    return Ack{false, "", e.code};
  }
}

std::optional<Ack> LocalUssClient::report_end(const std::string& handle, int64_t t_end_ms) {
  try {
    reg_.end(handle, t_end_ms);
    return Ack{true, "", ""};
  } catch (const RegistryError& e) {
    return Ack{false, "", e.code};
  }
}

std::optional<Ack> LocalUssClient::revoke(const std::string& handle) {
  try {
    reg_.revoke(handle);
    return Ack{true, "", ""};
  } catch (const RegistryError& e) {
    return Ack{false, "", e.code};
  }
}

std::optional<QueryResponse> LocalUssClient::query(const ObserverQuery& q) {
  return reg_.query(q);
}

std::optional<std::string> TcpUssClient::round_trip(const std::string& request_json) {
  try {
    net::Socket conn = net::tcp_connect(host_, port_);
    net::write_frame(conn.fd(), request_json);
    std::string resp;
    if (!net::read_frame(conn.fd(), resp)) return std::nullopt;
    return resp;
  } catch (const net::NetError&) {
    return std::nullopt;
  }
}

static Ack parse_ack(const std::string& resp) {
  try {
    json j = json::parse(resp);
    Ack a;
    a.ok = j.value("ok", false);
    a.handle = j.value("handle", "");
    a.error = j.value("error", "");
    return a;
  } catch (const json::exception& e) {
    return Ack{false, "", std::string("protocol: ") + e.what()};
  }
}

std::optional<Ack> TcpUssClient::register_mission(const RegistrationRequest& req) {
  json j{{"type", "register"},
         {"operator_id", req.operator_id},
         {"uas_id", req.uas_id},
         {"window_start_ms", req.window_start_ms},
         {"window_end_ms", req.window_end_ms},
         {"k0", to_hex(req.k0)},
         {"t_int_ms", req.t_int_ms},
         {"d", req.d}};
  auto resp = round_trip(j.dump());
  if (!resp) return std::nullopt;
  return parse_ack(*resp);
}

std::optional<Ack> TcpUssClient::report_start(const std::string& handle, int64_t t0_ms) {
  auto resp = round_trip(json{{"type", "start"}, {"handle", handle}, {"t0_ms", t0_ms}}.dump());
  if (!resp) return std::nullopt;
  return parse_ack(*resp);
}

std::optional<Ack> TcpUssClient::report_end(const std::string& handle, int64_t t_end_ms) {
  auto resp =
      round_trip(json{{"type", "end"}, {"handle", handle}, {"t_end_ms", t_end_ms}}.dump());
  if (!resp) return std::nullopt;
  return parse_ack(*resp);
}

std::optional<Ack> TcpUssClient::revoke(const std::string& handle) {
  auto resp = round_trip(json{{"type", "revoke"}, {"handle", handle}}.dump());
  if (!resp) return std::nullopt;
  return parse_ack(*resp);
}

std::optional<QueryResponse> TcpUssClient::query(const ObserverQuery& q) {
  json j{{"type", "query"},
         {"observer_id", q.observer_id},
         {"uas_id", q.uas_id},
         {"t_obs_ms", q.t_obs_ms}};
  auto resp = round_trip(j.dump());
  if (!resp) return std::nullopt;
  try {
    json r = json::parse(*resp);
    QueryResponse out;
    std::string status = r.value("status", "");
    if (status == "found") {
      out.status = QueryStatus::found;
      out.k0 = key_from_hex(r.at("k0").get<std::string>());
      out.t0_ms = r.at("t0_ms").get<int64_t>();
      out.t_int_ms = r.at("t_int_ms").get<int64_t>();
      out.d = r.at("d").get<int32_t>();
      out.operator_id = r.value("operator_id", "");
    } else if (status == "revoked") {
      out.status = QueryStatus::revoked;
    } else if (status == "no_mission") {
      out.status = QueryStatus::no_mission;
    } else {
      return std::nullopt;  // protocol error; treat as unreachable and retry
    }
    return out;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::pair<std::string, uint16_t> parse_endpoint(const std::string& endpoint) {
  auto colon = endpoint.rfind(':');
  if (colon == std::string::npos || colon + 1 >= endpoint.size()) {
    throw std::invalid_argument("endpoint must be host:port");
  }
  uint16_t port = 0;
  auto sv = std::string_view(endpoint).substr(colon + 1);
  auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), port);
  if (ec != std::errc() || p != sv.data() + sv.size() || port == 0) {
    throw std::invalid_argument("bad port in endpoint");
  }
  return {endpoint.substr(0, colon), port};
}

}  // namespace tbrd::uss
