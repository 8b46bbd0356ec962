#include "doctest.h"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "tbrd/crypto.hpp"
#include "tbrd/uss.hpp"
#include "tbrd/uss_client.hpp"
#include "tbrd/uss_server.hpp"

using namespace tbrd;
using namespace tbrd::uss;

namespace {

RegistrationRequest request_for(const std::string& uas, int64_t start, int64_t end,
                                uint8_t key_fill = 0xaa) {
  RegistrationRequest r;
  r.operator_id = "OP-" + uas;
  r.uas_id = uas;
  r.window_start_ms = start;
  r.window_end_ms = end;
  r.k0.fill(key_fill);
  r.t_int_ms = 1000;
  r.d = 1;
  return r;
}

}  // namespace

TEST_CASE("legal lifecycle and illegal transitions") {
  Registry reg;
  std::string h = reg.register_mission(request_for("UAS-1", 1000, 61'000));
  reg.start(h, 2000);
  reg.end(h, 50'000);

  CHECK_THROWS_WITH_AS(reg.start(h, 3000), doctest::Contains("illegal_transition"),
                       RegistryError);

  std::string h2 = reg.register_mission(request_for("UAS-2", 1000, 61'000));
  CHECK_THROWS_AS(reg.start(h2, 500), RegistryError);       // before window
  CHECK_THROWS_AS(reg.start(h2, 70'000), RegistryError);    // after window
  reg.start(h2, 1000);
  CHECK_THROWS_AS(reg.end(h2, 999), RegistryError);         // end before start
}

TEST_CASE("same UAS, disjoint windows are both accepted") {
  Registry reg;
  reg.register_mission(request_for("UAS-1", 1000, 10'000));
  CHECK_NOTHROW(reg.register_mission(request_for("UAS-1", 20'000, 30'000)));
  CHECK_THROWS_AS(reg.register_mission(request_for("UAS-1", 9'000, 12'000)),
                  RegistryError);
}

TEST_CASE("observer queries: found, no_mission, revoked") {
  Registry reg;
  std::string h = reg.register_mission(request_for("UAS-1", 1000, 61'000, 0x17));
  reg.start(h, 1500);

  QueryResponse found = reg.query({"OBS", "UAS-1", 5000});
  CHECK(found.status == QueryStatus::found);
  CHECK(found.k0[0] == 0x17);
  CHECK(found.t0_ms == 1500);
  CHECK(found.t_int_ms == 1000);
  CHECK(found.d == 1);
  CHECK(found.operator_id == "OP-UAS-1");

  CHECK(reg.query({"OBS", "UAS-404", 5000}).status == QueryStatus::no_mission);
  CHECK(reg.query({"OBS", "UAS-1", 999}).status == QueryStatus::no_mission);

  reg.revoke(h);
  CHECK(reg.query({"OBS", "UAS-1", 5000}).status == QueryStatus::revoked);

  // registered-but-never-started missions are not observable
  reg.register_mission(request_for("UAS-2", 1000, 61'000));
  CHECK(reg.query({"OBS", "UAS-2", 5000}).status == QueryStatus::no_mission);
}

TEST_CASE("query responses never leak anything but K_0") {
  Registry reg;
  std::string h = reg.register_mission(request_for("UAS-1", 1000, 61'000, 0x42));
  reg.start(h, 1000);
  std::string resp = handle_request(reg, R"({"type":"query","observer_id":"OBS",)"
                                         R"("uas_id":"UAS-1","t_obs_ms":2000})");
  // exactly one 64-hex-char value in the response: the commitment
  size_t count = 0;
  for (size_t i = 0; i + 64 <= resp.size(); ++i) {
    bool hex64 = true;
    for (size_t j = i; j < i + 64; ++j) {
      if (!std::isxdigit(static_cast<unsigned char>(resp[j]))) {
        hex64 = false;
        break;
      }
    }
    if (hex64) {
      ++count;
      i += 63;
    }
  }
  CHECK(count == 1);
  CHECK(resp.find(std::string(64, '4')) == std::string::npos);
}

TEST_CASE("framed request golden exchanges") {
  Registry reg;

  std::string register_req =
      R"({"type":"register","operator_id":"OP-1","uas_id":"UAS-1",)"
      R"("window_start_ms":1000,"window_end_ms":61000,)"
      R"("k0":"1717171717171717171717171717171717171717171717171717171717171717",)"
      R"("t_int_ms":1000,"d":1})";
  std::string resp = handle_request(reg, register_req);
  CHECK(resp == R"({"handle":"m-1","ok":true})");

  CHECK(handle_request(reg, R"({"type":"start","handle":"m-1","t0_ms":1500})") ==
        R"({"ok":true})");

  CHECK(handle_request(reg, R"({"type":"query","observer_id":"OBS","uas_id":"UAS-1",)"
                            R"("t_obs_ms":2000})") ==
        R"({"d":1,"k0":"1717171717171717171717171717171717171717171717171717171717171717",)"
        R"("operator_id":"OP-1","status":"found","t0_ms":1500,"t_int_ms":1000})");

  CHECK(handle_request(reg, "this is not json").find("protocol:") != std::string::npos);
  CHECK(handle_request(reg, R"({"type":"warp"})") ==
        R"({"error":"protocol: unknown type","ok":false})");
}

TEST_CASE("snapshot and restore reproduce query behavior") {
  auto path = std::filesystem::temp_directory_path() / "tbrd_test_registry.json";

  Registry reg;
  std::string h1 = reg.register_mission(request_for("UAS-1", 1000, 61'000, 0x01));
  reg.start(h1, 1000);
  std::string h2 = reg.register_mission(request_for("UAS-2", 1000, 61'000, 0x02));
  reg.start(h2, 2000);
  reg.end(h2, 30'000);
  std::string h3 = reg.register_mission(request_for("UAS-3", 1000, 61'000, 0x03));
  reg.revoke(h3);
  reg.snapshot(path);

  Registry back;
  back.restore(path);

  std::vector<ObserverQuery> suite = {
      {"OBS", "UAS-1", 5000},  {"OBS", "UAS-2", 5000},  {"OBS", "UAS-2", 40'000},
      {"OBS", "UAS-3", 5000},  {"OBS", "UAS-9", 5000},  {"OBS", "UAS-1", 100'000},
  };
  for (const auto& q : suite) {
    QueryResponse a = reg.query(q);
    QueryResponse b = back.query(q);
    CHECK(a.status == b.status);
    CHECK(a.k0 == b.k0);
    CHECK(a.t0_ms == b.t0_ms);
    CHECK(a.operator_id == b.operator_id);
  }

  // registration continues with fresh handles after restore
  std::string h4 = back.register_mission(request_for("UAS-4", 1000, 61'000));
  CHECK(h4 != h1);
  CHECK(h4 != h3);

  // empty registry round-trip
  Registry empty;
  empty.snapshot(path);
  Registry empty_back;
  empty_back.restore(path);
  CHECK(empty_back.records().empty());

  // truncated snapshot refuses to load
  std::ofstream(path, std::ios::trunc) << "{\"version\":1,\"next_h";
  Registry corrupt;
  CHECK_THROWS_WITH_AS(corrupt.restore(path), doctest::Contains("snapshot_corrupt"),
                       RegistryError);
  std::filesystem::remove(path);
}

TEST_CASE("framed TCP server round-trips") {
  Registry reg;
  UssServer server(reg, "127.0.0.1", 0);
  TcpUssClient client("127.0.0.1", server.port());

  auto ack = client.register_mission(request_for("UAS-1", 1000, 61'000, 0x05));
  REQUIRE(ack.has_value());
  CHECK(ack->ok);
  CHECK(client.report_start(ack->handle, 1500)->ok);

  auto q = client.query({"OBS", "UAS-1", 2000});
  REQUIRE(q.has_value());
  CHECK(q->status == QueryStatus::found);
  CHECK(q->k0[0] == 0x05);

  auto missing = client.query({"OBS", "UAS-404", 2000});
  REQUIRE(missing.has_value());
  CHECK(missing->status == QueryStatus::no_mission);

  server.stop();
  CHECK_FALSE(client.query({"OBS", "UAS-1", 2000}).has_value());  // transport failure
}

TEST_CASE("concurrent register and query interleavings stay consistent") {
  Registry reg;
  constexpr int kWriters = 4;
  constexpr int kPerWriter = 25;
  std::atomic<bool> go{false};
  std::atomic<int> torn{0};

  std::vector<std::thread> threads;
  for (int w = 0; w < kWriters; ++w) {
    threads.emplace_back([&reg, &go, w] {
      while (!go.load()) {}
      for (int i = 0; i < kPerWriter; ++i) {
        std::string uas = "UAS-" + std::to_string(w) + "-" + std::to_string(i);
        auto req = request_for(uas, 1000, 61'000, static_cast<uint8_t>(w * 50 + i));
        std::string h = reg.register_mission(req);
        reg.start(h, 1500);
      }
    });
  }
  for (int r = 0; r < 3; ++r) {
    threads.emplace_back([&reg, &go, &torn] {
      while (!go.load()) {}
      for (int round = 0; round < 400; ++round) {
        int w = round % kWriters;
        int i = round % kPerWriter;
        std::string uas = "UAS-" + std::to_string(w) + "-" + std::to_string(i);
        QueryResponse resp = reg.query({"OBS", uas, 2000});
        // a record is either absent or fully applied: found implies the
        // exact key fill and start time written by the registering thread
        if (resp.status == QueryStatus::found) {
          if (resp.k0[0] != static_cast<uint8_t>(w * 50 + i) || resp.t0_ms != 1500) {
            torn.fetch_add(1);
          }
        }
      }
    });
  }

  go.store(true);
  for (auto& t : threads) t.join();
  CHECK(torn.load() == 0);

  // every registration is now visible
  for (int w = 0; w < kWriters; ++w) {
    for (int i = 0; i < kPerWriter; ++i) {
      std::string uas = "UAS-" + std::to_string(w) + "-" + std::to_string(i);
      CHECK(reg.query({"OBS", uas, 2000}).status == QueryStatus::found);
    }
  }
}
