#include <benchmark/benchmark.h>

#include "flatgrasp/agent.hpp"
#include "flatgrasp/decoder.hpp"
#include "flatgrasp/env.hpp"
#include "flatgrasp/world.hpp"

namespace flatgrasp {
namespace {

Scene bench_scene(Family family) {
  const ObjectModel obj = generate_object(family, 7);
  return {obj, sample_pose(obj, 7)};
}

void BM_Rasterize(benchmark::State& state) {
  const Scene s = bench_scene(static_cast<Family>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rasterize(s));
}
BENCHMARK(BM_Rasterize)
    ->Arg(static_cast<int>(Family::kTrainingSquare))
    ->Arg(static_cast<int>(Family::kBeveledOval))
    ->Arg(static_cast<int>(Family::kIrregularE));

void BM_Decode(benchmark::State& state) {
  const Scene s = bench_scene(Family::kIrregularE);
  const Observation o = rasterize(s);
  const SideMetadata meta = side_metadata(s);
  const Cell px = world_to_pixel(s.center_of_mass());
  const Cell fc{px.row / kFeatureStride, px.col / kFeatureStride};
  for (auto _ : state) benchmark::DoNotOptimize(decode(fc, o.mask, o.depth, &meta));
}
BENCHMARK(BM_Decode)->Unit(benchmark::kMicrosecond);

void BM_ExtractContour(benchmark::State& state) {
  const Observation o = rasterize(bench_scene(Family::kBeveledHexagon));
  for (auto _ : state) benchmark::DoNotOptimize(extract_contour(o.mask));
}
BENCHMARK(BM_ExtractContour)->Unit(benchmark::kMicrosecond);

void BM_BackboneForward(benchmark::State& state) {
  const Observation o = rasterize(bench_scene(Family::kTrainingCircle));
  const Backbone<float> backbone{BackboneConfig{}};
  for (auto _ : state) benchmark::DoNotOptimize(backbone.extract(o.color));
}
BENCHMARK(BM_BackboneForward)->Unit(benchmark::kMillisecond);

void BM_PolicyForward(benchmark::State& state) {
  const Observation o = rasterize(bench_scene(Family::kTrainingCircle));
  const Backbone<float> backbone{BackboneConfig{}};
  PolicyConfig pc;
  pc.ac_mode = state.range(0) ? AcMode::kIndependent : AcMode::kShared;
  const PolicyNetwork<float> policy{pc};
  const nn::Volume<float> features = backbone.extract(o.color);
  for (auto _ : state) benchmark::DoNotOptimize(policy.forward(features));
}
BENCHMARK(BM_PolicyForward)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Episode(benchmark::State& state) {
  Agent agent(BackboneConfig{}, PolicyConfig{}, PPOConfig{});
  const auto snap = agent.snapshot();
  const InferenceModel model(*snap);
  const GraspSource source(EnvConfig{});
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(source.run(model, episode_seed(3, i), i++, false));
}
BENCHMARK(BM_Episode)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace flatgrasp

BENCHMARK_MAIN();
