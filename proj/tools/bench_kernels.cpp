// Serial reference vs OpenMP kernels on reference-rig frames.

#include <benchmark/benchmark.h>

#include "slt/detect.hpp"
#include "slt/synth.hpp"

namespace {

struct Fixture {
  slt::RigConfig rig;
  slt::NoiseParams noise{40.0, 10.0, 7};
  slt::IntensityModel im;
  slt::DetectParams params;
  slt::Frame frame;
  slt::Calibration cal;

  Fixture() {
    cal = slt::calibrate(slt::render(rig, {}, noise, im, -1));
    slt::SceneState s;
    s.user = slt::WorldPosition{10.0, 220.0};
    frame = slt::render(rig, s, noise, im, 0);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_DetectReference(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(slt::reference::detect_feet(f.frame, f.cal, f.params));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DetectReference);

void BM_DetectParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(slt::detect_feet(f.frame, f.cal, f.params));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DetectParallel);

void BM_RowSumsReference(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(slt::reference::row_sums(f.frame));
}
BENCHMARK(BM_RowSumsReference);

void BM_RowSumsParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(slt::row_sums(f.frame));
}
BENCHMARK(BM_RowSumsParallel);

void BM_Render(benchmark::State& state) {
  const auto& f = fixture();
  slt::SceneState s;
  s.user = slt::WorldPosition{0.0, 200.0};
  std::int64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(slt::render(f.rig, s, f.noise, f.im, i++));
  }
}
BENCHMARK(BM_Render);

}  // namespace

BENCHMARK_MAIN();
