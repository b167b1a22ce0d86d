#include <benchmark/benchmark.h>

#include "testkit.hpp"

namespace {

// Cost of the stopping-point checks when no breakpoint is armed.
void BM_Sieve(benchmark::State& state) {
  bool instrument = state.range(0) != 0;
  auto p = testkit::build({testkit::fixture_source("corpus/sieve.c")}, instrument);
  std::uint64_t steps = 0;
  for (auto _ : state) {
    cdb::vm::MachineOptions opts;
    opts.args = {"sieve"};
    cdb::vm::Machine m(p.image, opts);
    m.resume();
    steps = m.steps();
  }
  state.counters["steps"] = static_cast<double>(steps);
  state.SetLabel(instrument ? "instrumented" : "plain");
}
BENCHMARK(BM_Sieve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// Round trip through the nub for a breakpoint hit on every call to getword.
void BM_BreakpointHits(benchmark::State& state) {
  auto p = testkit::build({testkit::fixture_source("wf.c"), testkit::fixture_source("lookup.c")});
  auto at = testkit::spoint_coord(p, "wf.c", 17);
  std::string words;
  for (int i = 0; i < 200; ++i) words += "w ";
  std::int64_t hits = 0;
  for (auto _ : state) {
    testkit::Debuggee d(p, words);
    d.nub->init([&](const cdb::nub::NubState&) { d.nub->set(at, [&](const cdb::nub::NubState&) { ++hits; }); }, {});
  }
  state.SetItemsProcessed(hits);
}
BENCHMARK(BM_BreakpointHits)->Unit(benchmark::kMillisecond);

}  // namespace
