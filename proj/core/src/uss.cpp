#include "tbrd/uss.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tbrd::uss {

using nlohmann::json;

const char* to_string(MissionStatus s) {
  switch (s) {
    case MissionStatus::registered: return "registered";
    case MissionStatus::active: return "active";
    case MissionStatus::ended: return "ended";
    case MissionStatus::revoked: return "revoked";
  }
  return "?";
}

static MissionStatus status_from_string(const std::string& s) {
  if (s == "registered") return MissionStatus::registered;
  if (s == "active") return MissionStatus::active;
  if (s == "ended") return MissionStatus::ended;
  if (s == "revoked") return MissionStatus::revoked;
  throw RegistryError("snapshot_corrupt", "bad status " + s);
}

static bool windows_overlap(int64_t s1, int64_t e1, int64_t s2, int64_t e2) {
  return s1 <= e2 && s2 <= e1;
}

std::string Registry::register_mission(const RegistrationRequest& req) {
  if (req.operator_id.empty() || req.uas_id.empty()) {
    throw RegistryError("bad_request", "empty operator or uas id");
  }
  if (req.window_end_ms <= req.window_start_ms) {
    throw RegistryError("bad_request", "empty validity window");
  }
  if (req.t_int_ms <= 0 || req.d < 1) throw RegistryError("bad_request", "bad parameters");

  std::lock_guard lk(mu_);
  for (const auto& r : records_) {
    if (r.uas_id != req.uas_id || r.status == MissionStatus::revoked) continue;
    if (!windows_overlap(r.window_start_ms, r.window_end_ms, req.window_start_ms,
                         req.window_end_ms)) {
      continue;
    }
    if (r.operator_id == req.operator_id && r.window_start_ms == req.window_start_ms &&
        r.window_end_ms == req.window_end_ms) {
      throw RegistryError("duplicate");
    }
    throw RegistryError("overlap");
  }

  MissionRecord rec;
  rec.handle = "m-" + std::to_string(next_handle_++);
  rec.operator_id = req.operator_id;
  rec.uas_id = req.uas_id;
  rec.window_start_ms = req.window_start_ms;
  rec.window_end_ms = req.window_end_ms;
  rec.k0 = req.k0;
  rec.t_int_ms = req.t_int_ms;
  rec.d = req.d;
  records_.push_back(rec);
  persist_locked();
  return rec.handle;
}

MissionRecord* Registry::find_handle(const std::string& handle) {
  for (auto& r : records_) {
    if (r.handle == handle) return &r;
  }
  return nullptr;
}

void Registry::start(const std::string& handle, int64_t t0_ms) {
  std::lock_guard lk(mu_);
  MissionRecord* r = find_handle(handle);
  if (!r) throw RegistryError("unknown_handle");
  if (r->status != MissionStatus::registered) {
    throw RegistryError("illegal_transition",
                        std::string("start on ") + to_string(r->status) + " mission");
  }
  if (t0_ms < r->window_start_ms || t0_ms > r->window_end_ms) {
    throw RegistryError("start_outside_window");
  }
  r->t0_ms = t0_ms;
  r->status = MissionStatus::active;
  persist_locked();
}

void Registry::end(const std::string& handle, int64_t t_end_ms) {
  std::lock_guard lk(mu_);
  MissionRecord* r = find_handle(handle);
  if (!r) throw RegistryError("unknown_handle");
  if (r->status != MissionStatus::active) {
    throw RegistryError("illegal_transition",
                        std::string("end on ") + to_string(r->status) + " mission");
  }
  if (t_end_ms < r->t0_ms) throw RegistryError("end_before_start");
  r->t_end_ms = t_end_ms;
  r->status = MissionStatus::ended;
  persist_locked();
}

void Registry::revoke(const std::string& handle) {
  std::lock_guard lk(mu_);
  MissionRecord* r = find_handle(handle);
  if (!r) throw RegistryError("unknown_handle");
  r->status = MissionStatus::revoked;
  persist_locked();
}

QueryResponse Registry::query(const ObserverQuery& q) const {
  std::lock_guard lk(mu_);
  bool saw_revoked = false;
  for (const auto& r : records_) {
    if (r.uas_id != q.uas_id) continue;
    int64_t cover_start = r.t0_ms != 0 ? r.t0_ms : r.window_start_ms;
    int64_t cover_end = r.t_end_ms != 0 ? r.t_end_ms : r.window_end_ms;
    if (q.t_obs_ms < cover_start || q.t_obs_ms > cover_end) continue;

    if (r.status == MissionStatus::revoked) {
      saw_revoked = true;
      continue;
    }
    if (r.status != MissionStatus::active && r.status != MissionStatus::ended) continue;

    QueryResponse resp;
    resp.status = QueryStatus::found;
    resp.k0 = r.k0;
    resp.t0_ms = r.t0_ms;
    resp.t_int_ms = r.t_int_ms;
    resp.d = r.d;
    resp.operator_id = r.operator_id;
    return resp;
  }
  QueryResponse resp;
  resp.status = saw_revoked ? QueryStatus::revoked : QueryStatus::no_mission;
  return resp;
}

std::vector<MissionRecord> Registry::records() const {
  std::lock_guard lk(mu_);
  return records_;
}

static json record_to_json(const MissionRecord& r) {
  return json{{"handle", r.handle},
              {"operator_id", r.operator_id},
              {"uas_id", r.uas_id},
              {"window_start_ms", r.window_start_ms},
              {"window_end_ms", r.window_end_ms},
              {"k0", to_hex(r.k0)},
              {"t0_ms", r.t0_ms},
              {"t_end_ms", r.t_end_ms},
              {"status", to_string(r.status)},
              {"t_int_ms", r.t_int_ms},
              {"d", r.d}};
}

static MissionRecord record_from_json(const json& j) {
  MissionRecord r;
  r.handle = j.at("handle").get<std::string>();
  r.operator_id = j.at("operator_id").get<std::string>();
  r.uas_id = j.at("uas_id").get<std::string>();
  r.window_start_ms = j.at("window_start_ms").get<int64_t>();
  r.window_end_ms = j.at("window_end_ms").get<int64_t>();
  r.k0 = key_from_hex(j.at("k0").get<std::string>());
  r.t0_ms = j.at("t0_ms").get<int64_t>();
  r.t_end_ms = j.at("t_end_ms").get<int64_t>();
  r.status = status_from_string(j.at("status").get<std::string>());
  r.t_int_ms = j.at("t_int_ms").get<int64_t>();
  r.d = j.at("d").get<int32_t>();
  return r;
}

std::string Registry::snapshot_json_locked() const {
  json j;
  j["version"] = 1;
  j["next_handle"] = next_handle_;
  json missions = json::array();
  for (const auto& r : records_) missions.push_back(record_to_json(r));
  j["missions"] = std::move(missions);
  return j.dump(2);
}

void Registry::persist_locked() const {
  if (snapshot_path_.empty()) return;
  std::filesystem::path tmp = snapshot_path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write snapshot: " + tmp.string());
    out << snapshot_json_locked();
    if (!out.flush()) throw std::runtime_error("short write to snapshot");
  }
  std::filesystem::rename(tmp, snapshot_path_);
}

void Registry::snapshot(const std::filesystem::path& path) const {
  std::lock_guard lk(mu_);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write snapshot: " + tmp.string());
    out << snapshot_json_locked();
    if (!out.flush()) throw std::runtime_error("short write to snapshot");
  }
  std::filesystem::rename(tmp, path);
}

void Registry::restore(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RegistryError("snapshot_missing", path.string());
  std::stringstream buf;
  buf << in.rdbuf();

  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw RegistryError("snapshot_corrupt", e.what());
  }

  uint64_t next_handle = 1;
  std::vector<MissionRecord> records;
  try {
    if (j.at("version").get<int>() != 1) throw RegistryError("snapshot_corrupt", "version");
    next_handle = j.at("next_handle").get<uint64_t>();
    for (const auto& m : j.at("missions")) records.push_back(record_from_json(m));
  } catch (const json::exception& e) {
    throw RegistryError("snapshot_corrupt", e.what());
  }

  std::lock_guard lk(mu_);
  next_handle_ = next_handle;
  records_ = std::move(records);
}

void Registry::set_snapshot_path(std::filesystem::path path) {
  std::lock_guard lk(mu_);
  snapshot_path_ = std::move(path);
}

std::string handle_request(Registry& reg, const std::string& request_json) {
  json req;
  try {
    req = json::parse(request_json);
  } catch (const json::exception& e) {
    return json{{"ok", false}, {"error", std::string("protocol: ") + e.what()}}.dump();
  }

  try {
    const std::string type = req.at("type").get<std::string>();
    if (type == "register") {
      RegistrationRequest r;
      r.operator_id = req.at("operator_id").get<std::string>();
      r.uas_id = req.at("uas_id").get<std::string>();
      r.window_start_ms = req.at("window_start_ms").get<int64_t>();
      r.window_end_ms = req.at("window_end_ms").get<int64_t>();
      r.k0 = key_from_hex(req.at("k0").get<std::string>());
      r.t_int_ms = req.at("t_int_ms").get<int64_t>();
      r.d = req.at("d").get<int32_t>();
      std::string handle = reg.register_mission(r);
      return json{{"ok", true}, {"handle", handle}}.dump();
    }
    if (type == "start") {
      reg.start(req.at("handle").get<std::string>(), req.at("t0_ms").get<int64_t>());
      return json{{"ok", true}}.dump();
    }
    if (type == "end") {
      reg.end(req.at("handle").get<std::string>(), req.at("t_end_ms").get<int64_t>());
      return json{{"ok", true}}.dump();
    }
    if (type == "revoke") {
      reg.revoke(req.at("handle").get<std::string>());
      return json{{"ok", true}}.dump();
    }
    if (type == "query") {
      ObserverQuery q;
      q.observer_id = req.at("observer_id").get<std::string>();
      q.uas_id = req.at("uas_id").get<std::string>();
      q.t_obs_ms = req.at("t_obs_ms").get<int64_t>();
      QueryResponse resp = reg.query(q);
      switch (resp.status) {
        case QueryStatus::found:
          return json{{"status", "found"},
                      {"k0", to_hex(resp.k0)},
                      {"t0_ms", resp.t0_ms},
                      {"t_int_ms", resp.t_int_ms},
                      {"d", resp.d},
                      {"operator_id", resp.operator_id}}
              .dump();
        case QueryStatus::revoked:
          return json{{"status", "revoked"}}.dump();
        case QueryStatus::no_mission:
          return json{{"status", "no_mission"}}.dump();
      }
    }
    return json{{"ok", false}, {"error", "protocol: unknown type"}}.dump();
  } catch (const RegistryError& e) {
    return json{{"ok", false}, {"error", e.code}}.dump();
  } catch (const json::exception& e) {
    return json{{"ok", false}, {"error", std::string("protocol: ") + e.what()}}.dump();
  } catch (const std::exception& e) {
    return json{{"ok", false}, {"error", std::string("protocol: ") + e.what()}}.dump();
  }
}

}  // namespace tbrd::uss
