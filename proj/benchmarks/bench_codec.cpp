#include <benchmark/benchmark.h>

#include "tbrd/odid.hpp"

using namespace tbrd;

namespace {

odid::MessagePack sample_pack() {
  odid::MessagePack p;
  p.basic = {odid::IdType::serial, odid::UaType::multirotor, "BENCH-UAS"};
  p.location.lat_deg = 42.3398;
  p.location.lon_deg = -71.0892;
  p.location.alt_m = 50;
  p.location.speed_mps = 12.5;
  p.operator_id.operator_id = "BENCH-OP";
  odid::AuthBundle b;
  b.interval_counter = 42;
  b.mac.fill(0x11);
  b.disclosed_key.fill(0x22);
  p.auth_pages = odid::paginate_auth(b, 0);
  return p;
}

}  // namespace

static void BM_EncodePack(benchmark::State& state) {
  odid::MessagePack p = sample_pack();
  for (auto _ : state) {
    benchmark::DoNotOptimize(odid::encode_pack(p));
  }
}
BENCHMARK(BM_EncodePack);

static void BM_DecodePack(benchmark::State& state) {
  Bytes raw = odid::encode_pack(sample_pack());
  for (auto _ : state) {
    benchmark::DoNotOptimize(odid::decode_pack(raw));
  }
}
BENCHMARK(BM_DecodePack);
