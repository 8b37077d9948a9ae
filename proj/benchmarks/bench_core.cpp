/* Copyright 2026 The FLIM Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <benchmark/benchmark.h>

#include <random>

#include "flim/decoder.hpp"
#include "flim/detection.hpp"
#include "flim/encoder.hpp"
#include "flim/kmeans.hpp"
#include "flim/metrics.hpp"
#include "flim/pipeline.hpp"
#include "flim/synthetic.hpp"

namespace {

using namespace flim;

ImageTensor noise(int h, int w, int c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  ImageTensor t(h, w, c);
  for (float& x : t.data()) x = u(rng);
  return t;
}

std::vector<Kernel> bank(int count, int size, int channels) {
  std::mt19937_64 rng(7);
  std::normal_distribution<float> n;
  std::vector<Kernel> out;
  for (int k = 0; k < count; ++k) {
    std::vector<float> w(static_cast<std::size_t>(size) * size * channels);
    for (float& x : w) x = n(rng);
    out.emplace_back(size, channels, std::move(w));
  }
  return out;
}

void BM_Convolve(benchmark::State& state) {
  const int channels = static_cast<int>(state.range(0));
  const int kernels = static_cast<int>(state.range(1));
  const ImageTensor image = noise(128, 128, channels, 1);
  const auto b = bank(kernels, 3, channels);
  for (auto _ : state) benchmark::DoNotOptimize(convolve(image, b, 2));
  state.SetItemsProcessed(state.iterations() * 128 * 128 * kernels);
}
BENCHMARK(BM_Convolve)->Args({1, 32})->Args({32, 64})->Unit(benchmark::kMillisecond);

void BM_MaxPool(benchmark::State& state) {
  const ImageTensor image = noise(128, 128, 32, 2);
  for (auto _ : state) benchmark::DoNotOptimize(pool(image, PoolKind::kMax, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_MaxPool)->Arg(3)->Arg(5)->Unit(benchmark::kMicrosecond);

void BM_KMeans(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  PointSet points;
  points.dims = 27;
  points.values.resize(static_cast<std::size_t>(state.range(0)) * points.dims);
  for (double& x : points.values) x = n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(points, 32, 11));
}
BENCHMARK(BM_KMeans)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Decode(benchmark::State& state) {
  const ImageTensor acts = noise(128, 128, 64, 4);
  for (auto _ : state) benchmark::DoNotOptimize(decode_activations(acts, Heuristic::kParasite));
}
BENCHMARK(BM_Decode)->Unit(benchmark::kMicrosecond);

void BM_Otsu(benchmark::State& state) {
  const SaliencyMap map(noise(128, 128, 1, 5));
  for (auto _ : state) benchmark::DoNotOptimize(otsu_threshold(map));
}
BENCHMARK(BM_Otsu)->Unit(benchmark::kMicrosecond);

void BM_ConnectedComponents(benchmark::State& state) {
  const ImageTensor values = noise(256, 256, 1, 6);
  BinaryMask mask{256, 256, {}};
  for (float v : values.data()) mask.bits.push_back(v > 0.6f);
  for (auto _ : state) benchmark::DoNotOptimize(connected_components(mask));
}
BENCHMARK(BM_ConnectedComponents)->Unit(benchmark::kMicrosecond);

void BM_MeanAp(benchmark::State& state) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> pos(0, 100), side(5, 27);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::vector<DetectionSet> preds;
  std::vector<GroundTruth> gts;
  for (int i = 0; i < 100; ++i) {
    GroundTruth g{"i" + std::to_string(i), {}};
    DetectionSet d{g.image_id, {}};
    for (int k = 0; k < 5; ++k) {
      const int x = pos(rng), y = pos(rng);
      g.boxes.push_back({x, y, x + side(rng), y + side(rng), 0.0});
      d.boxes.push_back({x + 1, y, x + side(rng), y + side(rng), score(rng)});
    }
    sort_detections(d.boxes);
    gts.push_back(std::move(g));
    preds.push_back(std::move(d));
  }
  for (auto _ : state) benchmark::DoNotOptimize(mean_average_precision(preds, gts));
}
BENCHMARK(BM_MeanAp)->Unit(benchmark::kMillisecond);

struct TrainedFixture {
  std::vector<SyntheticSample> samples = make_synthetic_dataset(6, 5);
  FlimModel model;
  TrainedFixture() {
    TrainingSet data;
    for (int i = 0; i < 5; ++i) {
      data.ids.push_back(samples[i].id);
      data.images.push_back(samples[i].image);
      data.markers.push_back(samples[i].markers);
    }
    ArchConfig arch;
    arch.layers.push_back({LayerSpec{3, 1, 5, 32, {PoolKind::kMax, 3}}, std::nullopt});
    arch.layers.push_back({LayerSpec{3, 2, 5, 64, {PoolKind::kMax, 3}}, std::nullopt});
    model = train_model(data, arch, 1);
  }
};

const TrainedFixture& trained() {
  static const TrainedFixture fixture;
  return fixture;
}

void BM_DetectObjects(benchmark::State& state) {
  FlimModel model = trained().model;
  model.truncate(static_cast<int>(state.range(0)));
  const ImageTensor& image = trained().samples[5].image;
  for (auto _ : state) benchmark::DoNotOptimize(detect_objects(image, model));
}
BENCHMARK(BM_DetectObjects)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_BuildLayer(benchmark::State& state) {
  std::vector<ImageTensor> images;
  std::vector<MarkerSet> markers;
  for (int i = 0; i < 5; ++i) {
    images.push_back(trained().samples[i].image);
    markers.push_back(trained().samples[i].markers);
  }
  for (auto _ : state) benchmark::DoNotOptimize(build_layer(images, markers, LayerSpec{}, {1, kDefaultEpsilon, 0}));
}
BENCHMARK(BM_BuildLayer)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
