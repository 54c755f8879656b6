#include <benchmark/benchmark.h>

#include <vector>

#include "ncrsim/config.hpp"
#include "ncrsim/engine.hpp"
#include "ncrsim/kernels.hpp"

using namespace ncrsim;

namespace {

// Scenario B advanced to a loaded DL slot.
Simulator& loaded_sim() {
  static Simulator* sim = [] {
    RunConfig c;
    c.scenario_id = ScenarioId::B;
    c.seed = 1;
    c.total_slots = 1000;
    c.warmup_slots = 0;
    finalize(c);
    auto* s = new Simulator(c);
    while (s->slot() < 400) s->step();
    return s;
  }();
  return *sim;
}

void BM_SinrSerial(benchmark::State& state) {
  const SlotContext& ctx = loaded_sim().last_context();
  std::vector<SinrComponents> out(ctx.alloc->grants.size());
  for (auto _ : state) {
    sinr_batch_serial(ctx, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["grants"] = static_cast<double>(out.size());
}
BENCHMARK(BM_SinrSerial);

void BM_SinrOmp(benchmark::State& state) {
  set_worker_threads(static_cast<int>(state.range(0)));
  const SlotContext& ctx = loaded_sim().last_context();
  std::vector<SinrComponents> out(ctx.alloc->grants.size());
  for (auto _ : state) {
    sinr_batch_omp(ctx, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["grants"] = static_cast<double>(out.size());
}
BENCHMARK(BM_SinrOmp)->Arg(1)->Arg(2)->Arg(4);

void BM_Slot(benchmark::State& state) {
  RunConfig c;
  c.scenario_id = ScenarioId::B;
  c.seed = 2;
  c.total_slots = 1 << 30;
  c.warmup_slots = 0;
  c.kernel = state.range(0) ? KernelKind::omp : KernelKind::serial;
  finalize(c);
  Simulator sim(c);
  for (auto _ : state) sim.step();
}
BENCHMARK(BM_Slot)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
