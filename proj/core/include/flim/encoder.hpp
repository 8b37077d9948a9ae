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
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flim/image.hpp"
#include "flim/kmeans.hpp"
#include "flim/markers.hpp"
#include "flim/model.hpp"

namespace flim {

inline constexpr float kDefaultEpsilon = 1e-4f;

struct MarkerRef {
  std::size_t image_index = 0;
  std::string image_id;
  int marker_id = 0;
  bool operator==(const MarkerRef&) const = default;
};

struct PatchSample {
  Patch patch;
  MarkerRef marker;
};

/// Patches centred on every marker pixel of the training images, taken from
/// one layer's (normalized) input.
struct PatchDataset {
  std::vector<PatchSample> patches;
  int layer_index = 0;
};

/// Per-channel mean and population standard deviation over the union of
/// marker pixels of all training images. Throws DomainError when there are
/// no marker pixels.
NormStats compute_norm_stats(std::span<const ImageTensor> layer_inputs,
                             std::span<const MarkerSet> markers, float epsilon = kDefaultEpsilon);

/// (x - mean) / (stddev + epsilon) per channel.
ImageTensor apply_norm(const ImageTensor& image, const NormStats& stats);

PatchDataset build_patch_dataset(std::span<const ImageTensor> layer_inputs,
                                 std::span<const MarkerSet> markers, const LayerSpec& spec,
                                 int layer_index = 0);

struct KernelEstimationTrace {
  std::vector<KMeansResult> per_marker;  // first stage, in marker order
  KMeansResult reduction;                // second stage
};

/// Two-stage k-means: up to kernels_per_marker centers per marker, then up
/// to kernels_total centers over their union. Final centers are scaled to
/// unit norm; zero and duplicate centers are dropped, so the bank can hold
/// fewer than kernels_total kernels.
KernelBank estimate_kernels(const PatchDataset& dataset, const LayerSpec& spec, std::uint64_t seed,
                            KernelEstimationTrace* trace = nullptr);

/// normalize -> convolve (selected kernels) -> ReLU -> pool.
ImageTensor run_layer(const ImageTensor& input, const Layer& layer);

/// Runs layers [0, up_to_layer) of the model; up_to_layer is 1-based and
/// must lie in [1, depth].
ImageTensor run_encoder(const ImageTensor& image, const FlimModel& model, int up_to_layer);

struct LayerBuildOptions {
  std::uint64_t seed = 0;
  float epsilon = kDefaultEpsilon;
  int layer_index = 0;
};

/// Estimates a new layer from its inputs (the previous layer's outputs on the
/// training images). The returned layer selects every kernel.
Layer build_layer(std::span<const ImageTensor> layer_inputs, std::span<const MarkerSet> markers,
                  const LayerSpec& spec, const LayerBuildOptions& options);

/// Derives independent per-stage seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace flim
