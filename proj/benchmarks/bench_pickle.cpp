#include <benchmark/benchmark.h>

#include "cdb/sym/pickle.hpp"
#include "testkit.hpp"

namespace {

const cdb::sym::Module& wf_module() {
  static const auto program = testkit::build({testkit::fixture_source("wf.c"), testkit::fixture_source("lookup.c")});
  static const auto modules = program.modules();
  return modules[0];
}

void BM_Pickle(benchmark::State& state) {
  const auto& m = wf_module();
  std::size_t bytes = 0;
  for (auto _ : state) {
    auto out = cdb::sym::pickle(m);
    bytes += out.size();
    benchmark::DoNotOptimize(out);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_Pickle);

void BM_Unpickle(benchmark::State& state) {
  auto bytes = cdb::sym::pickle(wf_module());
  for (auto _ : state) benchmark::DoNotOptimize(cdb::sym::unpickle(bytes));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK(BM_Unpickle);

}  // namespace
