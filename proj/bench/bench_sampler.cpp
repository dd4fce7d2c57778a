// Serial reference loop versus the OpenMP batch over paths.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "srn/mlmc.hpp"
#include "srn/sampler.hpp"

namespace {

srn::SampleRequest request(std::size_t level, std::size_t count) {
  srn::SampleRequest req;
  req.level = level;
  req.fine = {srn::uniform_mesh(0.5, std::size_t{1} << (level + 3)), 1e-3};
  if (level > 0) req.coarse = srn::LevelSpec{srn::uniform_mesh(0.5, std::size_t{1} << (level + 2)), 1e-3};
  req.seed = 42;
  req.purpose = 9;
  req.count = count;
  return req;
}

void run(benchmark::State& state, srn::Execution mode) {
  const auto model = srn::decay_model();
  const auto machine = srn::reference_constants();
  const auto req = request(static_cast<std::size_t>(state.range(0)), 256);
  for (auto _ : state) benchmark::DoNotOptimize(srn::sample_batch(model, req, machine, mode));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(req.count));
  state.counters["threads"] = mode == srn::Execution::Parallel ? omp_get_max_threads() : 1;
}

void BM_SerialBatch(benchmark::State& state) { run(state, srn::Execution::Serial); }
void BM_ParallelBatch(benchmark::State& state) { run(state, srn::Execution::Parallel); }

}  // namespace

BENCHMARK(BM_SerialBatch)->Arg(0)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParallelBatch)->Arg(0)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
