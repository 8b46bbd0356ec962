#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tbrd/bytes.hpp"

// The UAS Service Supplier: mission registrations keyed by handle, observer
// queries keyed by uas_id + observation time, whole-registry snapshots.
namespace tbrd::uss {

enum class MissionStatus { registered, active, ended, revoked };

const char* to_string(MissionStatus s);

struct MissionRecord {
  std::string handle;
  std::string operator_id;
  std::string uas_id;
  int64_t window_start_ms = 0;
  int64_t window_end_ms = 0;
  Key32 k0{};
  int64_t t0_ms = 0;     // declared start; 0 = not started
  int64_t t_end_ms = 0;  // 0 until ended
  MissionStatus status = MissionStatus::registered;
  int64_t t_int_ms = 1000;
  int32_t d = 1;
};

struct RegistrationRequest {
  std::string operator_id;
  std::string uas_id;
  int64_t window_start_ms = 0;
  int64_t window_end_ms = 0;
  Key32 k0{};
  int64_t t_int_ms = 1000;
  int32_t d = 1;
};

enum class QueryStatus { found, no_mission, revoked };

struct ObserverQuery {
  std::string observer_id;
  std::string uas_id;
  int64_t t_obs_ms = 0;
};

struct QueryResponse {
  QueryStatus status = QueryStatus::no_mission;
  // present iff status == found
  Key32 k0{};
  int64_t t0_ms = 0;
  int64_t t_int_ms = 0;
  int32_t d = 0;
  std::string operator_id;  // registered operator, for the mismatch check
};

// Rejections carry a short stable code ("duplicate", "overlap",
// "unknown_handle", ...) usable as a wire error string.
struct RegistryError : std::runtime_error {
  explicit RegistryError(std::string code_, std::string detail = "")
      : std::runtime_error(detail.empty() ? code_ : code_ + ": " + detail),
        code(std::move(code_)) {}
  std::string code;
};

// Serially consistent mission store. All mutations and queries take the
// registry lock, so every response reflects a complete record set.
class Registry {
 public:
  Registry() = default;

  std::string register_mission(const RegistrationRequest& req);
  void start(const std::string& handle, int64_t t0_ms);
  void end(const std::string& handle, int64_t t_end_ms);
  void revoke(const std::string& handle);  // idempotent

  QueryResponse query(const ObserverQuery& q) const;

  std::vector<MissionRecord> records() const;

  // Atomic whole-registry snapshot (temp file + rename).
  void snapshot(const std::filesystem::path& path) const;
  // Replaces this registry's state; throws RegistryError("snapshot_corrupt")
  // on a damaged file so a server refuses to start on bad state.
  void restore(const std::filesystem::path& path);

  // Snapshot automatically after every mutation.
  void set_snapshot_path(std::filesystem::path path);

 private:
  MissionRecord* find_handle(const std::string& handle);
  void persist_locked() const;
  std::string snapshot_json_locked() const;

  mutable std::mutex mu_;
  uint64_t next_handle_ = 1;
  std::vector<MissionRecord> records_;
  std::filesystem::path snapshot_path_;
};

// One framed request in, one framed response out, both UTF-8 JSON objects.
// Malformed requests yield {"ok":false,"error":"protocol: ..."}.
std::string handle_request(Registry& reg, const std::string& request_json);

}  // namespace tbrd::uss
