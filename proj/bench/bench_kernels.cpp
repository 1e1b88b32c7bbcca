// Serial reference vs OpenMP kernels. Run with --benchmark_filter to pick one.
#include <benchmark/benchmark.h>

#include "polarpark/scenario_file.hpp"
#include "polarpark/simulator.hpp"
#include "polarpark/sweep.hpp"

namespace {

using namespace polarpark;

const ControllerSpec kGloFo = ControllerSpec::glofo(UnicycleGains(1.0, 3.0, 2.0));

std::vector<PolarState> states(std::size_t n) { return sample_states(7, n, StateBox{}); }

void BM_ClfSweepSerial(benchmark::State& st) {
  const auto s = states(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(clf_sweep_serial(kGloFo, s));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_ClfSweepOmp(benchmark::State& st) {
  const auto s = states(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(clf_sweep(kGloFo, s));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

std::vector<Scenario> fig3_batch() {
  std::vector<Scenario> out;
  for (const char* name : {"fig3-red", "fig3-blue", "fig3-cyan"}) {
    for (auto& s : preset(name)) {
      s.t_max = 5.0;
      out.push_back(s);
    }
  }
  return out;
}

void BM_BatchSerial(benchmark::State& st) {
  const auto scns = fig3_batch();
  for (auto _ : st) benchmark::DoNotOptimize(batch_run_serial(scns));
}

void BM_BatchOmp(benchmark::State& st) {
  const auto scns = fig3_batch();
  for (auto _ : st) benchmark::DoNotOptimize(batch_run(scns));
}

}  // namespace

BENCHMARK(BM_ClfSweepSerial)->Arg(1000)->Arg(10000);
BENCHMARK(BM_ClfSweepOmp)->Arg(1000)->Arg(10000);
BENCHMARK(BM_BatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchOmp)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
