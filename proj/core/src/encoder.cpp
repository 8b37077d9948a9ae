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
#include "flim/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "flim/error.hpp"

namespace flim {
namespace {

void check_pairing(std::span<const ImageTensor> inputs, std::span<const MarkerSet> markers) {
  if (inputs.size() != markers.size()) {
    throw DomainError("got " + std::to_string(inputs.size()) + " images but " +
                      std::to_string(markers.size()) + " marker sets");
  }
  for (std::size_t i = 1; i < inputs.size(); ++i) {
    if (inputs[i].channels() != inputs[0].channels()) {
      throw DomainError("training inputs disagree on channel count");
    }
  }
}

void check_marker_bounds(const ImageTensor& image, const MarkerSet& markers) {
  for (const Marker& m : markers.markers) {
    for (const Pixel& p : m.pixels) {
      if (!image.contains(p.row, p.col)) {
        throw DomainError("marker " + std::to_string(m.marker_id) + " of image '" +
                          markers.image_id + "' has pixel (" + std::to_string(p.row) + ", " +
                          std::to_string(p.col) + ") outside the image");
      }
    }
  }
}

// Marker pixels of one image as a set: a pixel drawn by two markers counts once.
std::vector<std::size_t> unique_marker_pixels(const ImageTensor& image, const MarkerSet& markers) {
  std::vector<std::size_t> flat;
  for (const Marker& m : markers.markers) {
    for (const Pixel& p : m.pixels) {
      flat.push_back(static_cast<std::size_t>(p.row) * image.width() + p.col);
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  return flat;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

NormStats compute_norm_stats(std::span<const ImageTensor> layer_inputs,
                             std::span<const MarkerSet> markers, float epsilon) {
  check_pairing(layer_inputs, markers);
  if (!(epsilon > 0.0f)) throw DomainError("epsilon must be positive");
  if (layer_inputs.empty()) throw DomainError("no training images");
  const int c = layer_inputs[0].channels();

  std::vector<std::vector<std::size_t>> pixels(layer_inputs.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < layer_inputs.size(); ++i) {
    check_marker_bounds(layer_inputs[i], markers[i]);
    pixels[i] = unique_marker_pixels(layer_inputs[i], markers[i]);
    total += pixels[i].size();
  }
  if (total == 0) throw DomainError("no marker pixels to compute normalization statistics");

  std::vector<double> sum(c, 0.0);
  for (std::size_t i = 0; i < layer_inputs.size(); ++i) {
    auto data = layer_inputs[i].data();
    for (std::size_t p : pixels[i]) {
      for (int b = 0; b < c; ++b) sum[b] += data[p * c + b];
    }
  }
  std::vector<double> mean(c);
  for (int b = 0; b < c; ++b) mean[b] = sum[b] / static_cast<double>(total);

  std::vector<double> sq(c, 0.0);
  for (std::size_t i = 0; i < layer_inputs.size(); ++i) {
    auto data = layer_inputs[i].data();
    for (std::size_t p : pixels[i]) {
      for (int b = 0; b < c; ++b) {
        const double d = data[p * c + b] - mean[b];
        sq[b] += d * d;
      }
    }
  }

  NormStats stats;
  stats.epsilon = epsilon;
  stats.mean.resize(c);
  stats.stddev.resize(c);
  for (int b = 0; b < c; ++b) {
    stats.mean[b] = static_cast<float>(mean[b]);
    stats.stddev[b] = static_cast<float>(std::sqrt(sq[b] / static_cast<double>(total)));
  }
  return stats;
}

ImageTensor apply_norm(const ImageTensor& image, const NormStats& stats) {
  const int c = image.channels();
  if (stats.channels() != c || stats.stddev.size() != stats.mean.size()) {
    throw DomainError("normalization has " + std::to_string(stats.channels()) +
                      " channels but the image has " + std::to_string(c));
  }
  std::vector<double> scale(c);
  for (int b = 0; b < c; ++b) {
    scale[b] = 1.0 / (static_cast<double>(stats.stddev[b]) + static_cast<double>(stats.epsilon));
  }
  ImageTensor out(image.height(), image.width(), c);
  auto src = image.data();
  auto dst = out.data();
  for (std::size_t p = 0; p < image.pixel_count(); ++p) {
    for (int b = 0; b < c; ++b) {
      const std::size_t i = p * c + b;
      dst[i] = static_cast<float>((static_cast<double>(src[i]) - stats.mean[b]) * scale[b]);
    }
  }
  return out;
}

PatchDataset build_patch_dataset(std::span<const ImageTensor> layer_inputs,
                                 std::span<const MarkerSet> markers, const LayerSpec& spec,
                                 int layer_index) {
  check_pairing(layer_inputs, markers);
  spec.validate();
  PatchDataset dataset;
  dataset.layer_index = layer_index;
  for (std::size_t i = 0; i < layer_inputs.size(); ++i) {
    check_marker_bounds(layer_inputs[i], markers[i]);
    for (const Marker& m : markers[i].markers) {
      const MarkerRef ref{i, markers[i].image_id, m.marker_id};
      for (const Pixel& p : m.pixels) {
        dataset.patches.push_back(
            {extract_patch(layer_inputs[i], p.row, p.col, spec.kernel_size, spec.dilation), ref});
      }
    }
  }
  return dataset;
}

KernelBank estimate_kernels(const PatchDataset& dataset, const LayerSpec& spec, std::uint64_t seed,
                            KernelEstimationTrace* trace) {
  spec.validate();
  if (dataset.patches.empty()) throw DomainError("patch dataset is empty");
  const Patch& first = dataset.patches.front().patch;
  const std::size_t dims = first.length();
  for (const PatchSample& s : dataset.patches) {
    if (s.patch.length() != dims || s.patch.size != first.size || s.patch.channels != first.channels) {
      throw DomainError("patches in a dataset must share one shape");
    }
  }

  // Group patches by marker, keeping first-appearance order.
  std::vector<MarkerRef> groups;
  std::map<std::pair<std::size_t, int>, std::size_t> group_of;
  std::vector<PointSet> group_points;
  for (const PatchSample& s : dataset.patches) {
    const auto key = std::make_pair(s.marker.image_index, s.marker.marker_id);
    auto [it, inserted] = group_of.try_emplace(key, groups.size());
    if (inserted) {
      groups.push_back(s.marker);
      group_points.push_back(PointSet{{}, dims});
    }
    auto& values = group_points[it->second].values;
    values.insert(values.end(), s.patch.values.begin(), s.patch.values.end());
  }

  PointSet stage1{{}, dims};
  std::vector<std::size_t> stage1_group;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const int k = std::min<int>(spec.kernels_per_marker, static_cast<int>(group_points[g].count()));
    KMeansResult r = kmeans(group_points[g], k, mix_seed(seed, g));
    stage1.values.insert(stage1.values.end(), r.centers.values.begin(), r.centers.values.end());
    stage1_group.insert(stage1_group.end(), r.centers.count(), g);
    if (trace != nullptr) trace->per_marker.push_back(std::move(r));
  }

  const int k2 = std::min<int>(spec.kernels_total, static_cast<int>(stage1.count()));
  KMeansResult reduced = kmeans(stage1, k2, mix_seed(seed, 0xFFFFFFFFULL));

  KernelBank bank;
  const std::size_t final_count = reduced.centers.count();
  for (std::size_t c = 0; c < final_count; ++c) {
    auto row = reduced.centers.row(c);
    std::vector<float> weights(row.begin(), row.end());
    Kernel raw(first.size, first.channels, std::move(weights));
    if (raw.norm() == 0.0) continue;
    Kernel unit = raw.normalized();
    if (std::find(bank.kernels.begin(), bank.kernels.end(), unit) != bank.kernels.end()) continue;

    // Provenance: the marker contributing most first-stage centers.
    std::vector<int> votes(groups.size(), 0);
    int members = 0;
    for (std::size_t i = 0; i < reduced.labels.size(); ++i) {
      if (reduced.labels[i] == static_cast<int>(c)) {
        ++votes[stage1_group[i]];
        ++members;
      }
    }
    const auto best = static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    bank.kernels.push_back(std::move(unit));
    bank.provenance.push_back({groups[best].image_id, groups[best].marker_id, members});
  }
  if (trace != nullptr) trace->reduction = std::move(reduced);
  if (bank.empty()) throw DomainError("every estimated kernel was zero; markers carry no contrast");
  return bank;
}

ImageTensor run_layer(const ImageTensor& input, const Layer& layer) {
  if (layer.selected.empty()) throw DomainError("layer has an empty kernel selection");
  const ImageTensor normalized = apply_norm(input, layer.norm);
  const std::vector<Kernel> kernels = layer.selected_kernels();
  ImageTensor activations = relu(convolve(normalized, kernels, layer.spec.dilation));
  return pool(activations, layer.spec.pooling.kind, layer.spec.pooling.window);
}

ImageTensor run_encoder(const ImageTensor& image, const FlimModel& model, int up_to_layer) {
  if (up_to_layer < 1 || up_to_layer > model.depth()) {
    throw DomainError("layer " + std::to_string(up_to_layer) + " outside [1, " +
                      std::to_string(model.depth()) + "]");
  }
  ImageTensor current = run_layer(image, model.layer(0));
  for (int i = 1; i < up_to_layer; ++i) current = run_layer(current, model.layer(i));
  return current;
}

Layer build_layer(std::span<const ImageTensor> layer_inputs, std::span<const MarkerSet> markers,
                  const LayerSpec& spec, const LayerBuildOptions& options) {
  spec.validate();
  Layer layer;
  layer.spec = spec;
  layer.norm = compute_norm_stats(layer_inputs, markers, options.epsilon);

  std::vector<ImageTensor> normalized;
  normalized.reserve(layer_inputs.size());
  for (const ImageTensor& input : layer_inputs) normalized.push_back(apply_norm(input, layer.norm));

  const PatchDataset dataset = build_patch_dataset(normalized, markers, spec, options.layer_index);
  layer.bank = estimate_kernels(dataset, spec, mix_seed(options.seed, 1000 + options.layer_index));
  layer.selected.resize(layer.bank.size());
  std::iota(layer.selected.begin(), layer.selected.end(), 0);
  return layer;
}

}  // namespace flim
