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
#include <string>
#include <vector>

#include "flim/image.hpp"

namespace flim {

struct PoolSpec {
  PoolKind kind = PoolKind::kMax;
  int window = 3;
  bool operator==(const PoolSpec&) const = default;
};

/// Architecture hyperparameters of one encoder layer.
struct LayerSpec {
  int kernel_size = 3;
  int dilation = 1;
  int kernels_per_marker = 5;
  int kernels_total = 32;
  PoolSpec pooling;

  /// Throws DomainError naming the first invalid field.
  void validate() const;
  bool operator==(const LayerSpec&) const = default;
};

/// Per-channel marker statistics used for z-score normalization.
struct NormStats {
  std::vector<float> mean;
  std::vector<float> stddev;
  float epsilon = 1e-4f;

  int channels() const noexcept { return static_cast<int>(mean.size()); }
  bool operator==(const NormStats&) const = default;
};

/// Where an estimated kernel came from: the marker that contributed most of
/// the first-stage cluster centers merged into it.
struct KernelOrigin {
  std::string image_id;
  int marker_id = 0;
  int members = 0;  // first-stage centers merged into this kernel
  bool operator==(const KernelOrigin&) const = default;
};

struct KernelBank {
  std::vector<Kernel> kernels;
  std::vector<KernelOrigin> provenance;  // parallel to kernels

  std::size_t size() const noexcept { return kernels.size(); }
  bool empty() const noexcept { return kernels.empty(); }
  bool operator==(const KernelBank&) const = default;
};

struct Layer {
  LayerSpec spec;
  NormStats norm;
  KernelBank bank;
  std::vector<int> selected;  // indices into bank, ascending

  int input_channels() const noexcept { return norm.channels(); }
  int output_channels() const noexcept { return static_cast<int>(selected.size()); }
  std::vector<Kernel> selected_kernels() const;
  bool operator==(const Layer&) const = default;
};

/// Decoder sign heuristic. kParasite thresholds each channel mean at 0.5;
/// kShip uses a band around the mean of channel means plus a neutral rule.
enum class Heuristic { kParasite, kShip };

const char* to_string(Heuristic heuristic);
Heuristic heuristic_from_string(const std::string& name);

struct PostProcessing {
  double box_expand_fraction = 0.10;
  int min_area_px = 100;
  bool operator==(const PostProcessing&) const = default;
};

/// Ordered encoder layers plus decoder and post-processing configuration.
/// Layers are appended while building; freeze() makes the model read-only.
class FlimModel {
 public:
  FlimModel() = default;
  FlimModel(Heuristic heuristic, PostProcessing postproc)
      : heuristic_(heuristic), postproc_(postproc) {}

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  const Layer& layer(int index) const;  // 0-based
  int depth() const noexcept { return static_cast<int>(layers_.size()); }
  bool empty() const noexcept { return layers_.empty(); }

  Heuristic heuristic() const noexcept { return heuristic_; }
  const PostProcessing& postproc() const noexcept { return postproc_; }
  bool frozen() const noexcept { return frozen_; }

  /// Appends a layer after checking shape consistency with the prefix.
  void append_layer(Layer layer);
  /// Keeps only the first `depth` layers.
  void truncate(int depth);
  /// Replaces the selection of layer `index` and drops every later layer,
  /// since their inputs change.
  void set_selection(int index, std::vector<int> selected);
  void set_heuristic(Heuristic heuristic);
  void set_postproc(PostProcessing postproc);
  void freeze() noexcept { frozen_ = true; }

  /// Structural checks: selections valid and non-empty, channel counts chain.
  void validate() const;

  bool operator==(const FlimModel&) const = default;

 private:
  void require_mutable() const;

  std::vector<Layer> layers_;
  Heuristic heuristic_ = Heuristic::kParasite;
  PostProcessing postproc_;
  bool frozen_ = false;
};

/// Weights in the encoder: sum over layers of m * k * k * c_in, where m is
/// the selected kernel count (or the whole bank when selected_only is false).
std::int64_t count_parameters(const FlimModel& model, bool selected_only);

/// Sorted, de-duplicated, range-checked copy of `selected`. Throws
/// DomainError on empty lists or indices outside [0, bank_size).
std::vector<int> normalize_selection(std::vector<int> selected, int bank_size);

}  // namespace flim
