#include <benchmark/benchmark.h>

#include "cdb/comm/message.hpp"

namespace {

using namespace cdb::comm;

void BM_EncodeDecodeFrameReply(benchmark::State& state) {
  Message m = FrameReply{0x3ff000, 0, 0x80000004, 0x49499895, 17};
  for (auto _ : state) {
    auto frame = encode(m);
    benchmark::DoNotOptimize(decode(frame));
  }
}
BENCHMARK(BM_EncodeDecodeFrameReply);

void BM_EncodeDecodeFetchReply(benchmark::State& state) {
  Message m = FetchReply{cdb::Bytes(static_cast<std::size_t>(state.range(0)), std::byte{0x5a})};
  for (auto _ : state) {
    auto frame = encode(m);
    benchmark::DoNotOptimize(decode(frame));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncodeDecodeFetchReply)->Range(8, 64 << 10);

}  // namespace
