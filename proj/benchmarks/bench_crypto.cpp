// The two authentication routes over the 100-byte dynamic payload: the HMAC
// the protocol uses once per interval vs an equivalent-strength ECDSA
// signature. Run `tbrd_benchmarks` for per-op timings on this host.

#include <benchmark/benchmark.h>

#include "tbrd/bench.hpp"
#include "tbrd/crypto.hpp"
#include "tbrd/tesla.hpp"

using namespace tbrd;

static void BM_HmacSha256_100B(benchmark::State& state) {
  Bytes payload(100, 0xa5);
  Key32 key{};
  for (auto _ : state) {
    benchmark::DoNotOptimize(crypto::hmac_sha256(key, payload));
  }
}
BENCHMARK(BM_HmacSha256_100B);

static void BM_ChainGeneration(benchmark::State& state) {
  tesla::ChainParams params;
  params.n = state.range(0);
  Key32 seed{};
  for (auto _ : state) {
    benchmark::DoNotOptimize(tesla::generate_chain(seed, params));
  }
}
BENCHMARK(BM_ChainGeneration)->Arg(60)->Arg(300)->Arg(3600);

static void BM_CommitmentVerify(benchmark::State& state) {
  tesla::ChainParams params;
  params.n = state.range(0);
  Key32 seed{};
  tesla::KeyChain chain = tesla::generate_chain(seed, params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        tesla::verify_commitment(chain.key(params.n), params.n, chain.commitment()));
  }
}
BENCHMARK(BM_CommitmentVerify)->Arg(60)->Arg(300);

// One-shot comparison identical to the acceptance measurement.
static void BM_EcdsaVsHmacRatio(benchmark::State& state) {
  for (auto _ : state) {
    auto r = bench::bench_hmac_vs_ecdsa(100, 200);
    state.counters["ratio"] = r.ratio;
    state.counters["hmac_us"] = r.hmac_mean_us;
    state.counters["sig_us"] = r.sig_mean_us;
  }
}
BENCHMARK(BM_EcdsaVsHmacRatio)->Iterations(1)->Unit(benchmark::kMillisecond);
