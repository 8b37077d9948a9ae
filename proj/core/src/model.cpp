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
#include "flim/model.hpp"

#include <algorithm>

#include "flim/error.hpp"

namespace flim {

void LayerSpec::validate() const {
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw DomainError("kernel_size must be odd and >= 1, got " + std::to_string(kernel_size));
  }
  if (dilation < 1) throw DomainError("dilation must be >= 1, got " + std::to_string(dilation));
  if (kernels_per_marker < 1) {
    throw DomainError("kernels_per_marker must be >= 1, got " + std::to_string(kernels_per_marker));
  }
  if (kernels_total < 1) {
    throw DomainError("kernels_total must be >= 1, got " + std::to_string(kernels_total));
  }
  if (pooling.window < 1) {
    throw DomainError("pooling window must be >= 1, got " + std::to_string(pooling.window));
  }
}

std::vector<Kernel> Layer::selected_kernels() const {
  std::vector<Kernel> out;
  out.reserve(selected.size());
  for (int i : selected) out.push_back(bank.kernels.at(static_cast<std::size_t>(i)));
  return out;
}

const char* to_string(Heuristic heuristic) {
  return heuristic == Heuristic::kParasite ? "parasite" : "ship";
}

Heuristic heuristic_from_string(const std::string& name) {
  if (name == "parasite" || name == "hp") return Heuristic::kParasite;
  if (name == "ship" || name == "hs") return Heuristic::kShip;
  throw DomainError("unknown heuristic '" + name + "' (expected parasite or ship)");
}

std::vector<int> normalize_selection(std::vector<int> selected, int bank_size) {
  if (selected.empty()) throw DomainError("kernel selection must not be empty");
  std::sort(selected.begin(), selected.end());
  selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
  if (selected.front() < 0 || selected.back() >= bank_size) {
    throw DomainError("kernel index out of range [0, " + std::to_string(bank_size) + ")");
  }
  return selected;
}

const Layer& FlimModel::layer(int index) const {
  if (index < 0 || index >= depth()) {
    throw DomainError("layer index " + std::to_string(index) + " out of range [0, " +
                      std::to_string(depth()) + ")");
  }
  return layers_[static_cast<std::size_t>(index)];
}

void FlimModel::require_mutable() const {
  if (frozen_) throw DomainError("model is frozen");
}

void FlimModel::append_layer(Layer layer) {
  require_mutable();
  layer.spec.validate();
  if (layer.bank.empty()) throw DomainError("cannot append a layer with an empty kernel bank");
  layer.selected = normalize_selection(std::move(layer.selected), static_cast<int>(layer.bank.size()));
  const int expected_in = layers_.empty() ? layer.input_channels() : layers_.back().output_channels();
  if (layer.input_channels() != expected_in || expected_in < 1) {
    throw DomainError("layer expects " + std::to_string(layer.input_channels()) +
                      " input channels but the previous layer emits " + std::to_string(expected_in));
  }
  if (layer.norm.stddev.size() != layer.norm.mean.size()) {
    throw DomainError("normalization mean/stddev lengths differ");
  }
  for (const Kernel& k : layer.bank.kernels) {
    if (k.size() != layer.spec.kernel_size || k.channels() != layer.input_channels()) {
      throw DomainError("kernel shape does not match the layer spec");
    }
  }
  layers_.push_back(std::move(layer));
}

void FlimModel::truncate(int depth) {
  require_mutable();
  if (depth < 0) throw DomainError("negative depth");
  if (depth < this->depth()) layers_.resize(static_cast<std::size_t>(depth));
}

void FlimModel::set_selection(int index, std::vector<int> selected) {
  require_mutable();
  const Layer& current = layer(index);
  auto normalized = normalize_selection(std::move(selected), static_cast<int>(current.bank.size()));
  layers_[static_cast<std::size_t>(index)].selected = std::move(normalized);
  layers_.resize(static_cast<std::size_t>(index) + 1);
}

void FlimModel::set_heuristic(Heuristic heuristic) {
  require_mutable();
  heuristic_ = heuristic;
}

void FlimModel::set_postproc(PostProcessing postproc) {
  require_mutable();
  postproc_ = postproc;
}

void FlimModel::validate() const {
  int channels = -1;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    l.spec.validate();
    if (l.selected.empty()) throw DomainError("layer " + std::to_string(i + 1) + " has no selection");
    for (int s : l.selected) {
      if (s < 0 || s >= static_cast<int>(l.bank.size())) {
        throw DomainError("layer " + std::to_string(i + 1) + " selects a missing kernel");
      }
    }
    if (channels >= 0 && l.input_channels() != channels) {
      throw DomainError("layer " + std::to_string(i + 1) + " channel count breaks the chain");
    }
    channels = l.output_channels();
  }
}

std::int64_t count_parameters(const FlimModel& model, bool selected_only) {
  if (model.empty()) throw DomainError("model has no layers");
  std::int64_t total = 0;
  for (const Layer& l : model.layers()) {
    const std::int64_t m = selected_only ? static_cast<std::int64_t>(l.selected.size())
                                         : static_cast<std::int64_t>(l.bank.size());
    total += m * l.spec.kernel_size * l.spec.kernel_size * l.input_channels();
  }
  return total;
}

}  // namespace flim
