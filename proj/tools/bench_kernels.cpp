// Serial reference vs OpenMP kernels on medium problem sizes.

#include <benchmark/benchmark.h>

#include "slesim/fractal.hpp"
#include "slesim/hcap.hpp"
#include "slesim/observables.hpp"
#include "slesim/sampler.hpp"

namespace {

using namespace sle;

SamplerConfig bench_cfg() {
  SamplerConfig cfg;
  cfg.kappa = 8.0 / 3.0;
  cfg.dt = 5e-4;
  cfg.t_max = 1.0;
  cfg.seed = 77;
  return cfg;
}

const DrivingPath& bench_driving() {
  static const DrivingPath d = sample_chordal_driving(bench_cfg());
  return d;
}

const Trace& bench_trace() {
  static const Trace tr = compute_trace(bench_driving());
  return tr;
}

void BM_TraceTips(benchmark::State& state) {
  const DrivingPath& d = bench_driving();
  const int workers = int(state.range(0));
  std::vector<Cpx> out(d.times.size());
  std::vector<std::uint8_t> deg(d.times.size());
  for (auto _ : state) {
    if (workers == 1) {
      trace_tips_serial(d, 0.1, out, deg);
    } else {
      trace_tips_parallel(d, 0.1, out, deg, workers);
    }
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_TraceTips)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_UpsilonLimits(benchmark::State& state) {
  SamplerConfig cfg = bench_cfg();
  cfg.t_max = 8.0;
  cfg.dt = 1e-3;
  StabilizeOptions opts;
  opts.workers = int(state.range(0));
  for (auto _ : state) {
    auto lims = upsilon_limits({0.0, 1.0}, 256, cfg, opts);
    benchmark::DoNotOptimize(lims.values.data());
  }
}
BENCHMARK(BM_UpsilonLimits)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_MinkowskiCells(benchmark::State& state) {
  const Trace& tr = bench_trace();
  const Rect box = tr.bounding_box();
  const double eps = 0.02 * std::max(box.width(), box.height());
  const int workers = int(state.range(0));
  for (auto _ : state) {
    const std::uint64_t cells = workers == 1
                                    ? minkowski_cells_serial(tr.points, box, eps)
                                    : minkowski_cells_parallel(tr.points, box, eps, workers);
    benchmark::DoNotOptimize(cells);
  }
}
BENCHMARK(BM_MinkowskiCells)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_HcapWalkers(benchmark::State& state) {
  const Trace& tr = bench_trace();
  HcapOptions opts;
  opts.workers = int(state.range(0));
  for (auto _ : state) {
    auto est = hcap_mc(tr, 1.0, 2000, opts);
    benchmark::DoNotOptimize(est.value);
  }
}
BENCHMARK(BM_HcapWalkers)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
