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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "flim/detection.hpp"
#include "flim/encoder.hpp"
#include "flim/project.hpp"

namespace flim {

struct LayerConfig {
  LayerSpec spec;
  std::optional<std::vector<int>> selection;  // all kernels when absent
};

/// Non-interactive build recipe, read from an arch JSON file:
/// {"heuristic": "parasite", "postproc": {...}, "epsilon": 1e-4,
///  "layers": [{"kernel_size": 3, ..., "selection": [0, 4]}]}
struct ArchConfig {
  Heuristic heuristic = Heuristic::kParasite;
  PostProcessing postproc;
  float epsilon = kDefaultEpsilon;
  std::vector<LayerConfig> layers;
};

ArchConfig arch_from_json(const nlohmann::json& j);
nlohmann::json arch_to_json(const ArchConfig& arch);
/// Throws FormatError (kIo, kMalformed) or DomainError for invalid specs.
ArchConfig load_arch(const std::filesystem::path& path);

/// Marked images of a project, decoded, with their markers; parallel vectors
/// in image id order.
struct TrainingSet {
  std::vector<std::string> ids;
  std::vector<ImageTensor> images;
  std::vector<MarkerSet> markers;
};

TrainingSet load_training_set(const Project& project);

/// run_layer over every tensor.
std::vector<ImageTensor> forward_layer(std::span<const ImageTensor> inputs, const Layer& layer);

/// Builds every layer of `arch` in turn, each from the previous layer's
/// outputs on the training images. Selection lists are honoured unless
/// `apply_selection` is false.
FlimModel train_model(const TrainingSet& data, const ArchConfig& arch, std::uint64_t seed,
                      bool apply_selection = true);

}  // namespace flim
