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
#include "flim/pipeline.hpp"

#include "flim/png_io.hpp"
#include "flim/serialization.hpp"

namespace flim {

ArchConfig arch_from_json(const Json& j) {
  ArchConfig arch;
  arch.heuristic = heuristic_from_string(j.value("heuristic", std::string("parasite")));
  if (j.contains("postproc")) arch.postproc = j.at("postproc").get<PostProcessing>();
  arch.epsilon = j.value("epsilon", kDefaultEpsilon);
  for (const Json& l : j.at("layers")) {
    LayerConfig layer{l.get<LayerSpec>(), std::nullopt};
    layer.spec.validate();
    if (l.contains("selection")) layer.selection = l.at("selection").get<std::vector<int>>();
    arch.layers.push_back(std::move(layer));
  }
  if (arch.layers.empty()) throw DomainError("architecture has no layers");
  if (!(arch.epsilon > 0.0f)) throw DomainError("epsilon must be positive");
  return arch;
}

Json arch_to_json(const ArchConfig& arch) {
  Json layers = Json::array();
  for (const LayerConfig& l : arch.layers) {
    Json j = l.spec;
    if (l.selection) j["selection"] = *l.selection;
    layers.push_back(std::move(j));
  }
  return Json{{"heuristic", to_string(arch.heuristic)},
              {"postproc", arch.postproc},
              {"epsilon", arch.epsilon},
              {"layers", layers}};
}

ArchConfig load_arch(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw FormatError(FormatCode::kIo, "no such file: " + path.string());
  const Json j = read_json_file(path);
  try {
    return arch_from_json(j);
  } catch (const DomainError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(FormatCode::kMalformed, path.string() + ": " + e.what());
  }
}

TrainingSet load_training_set(const Project& project) {
  TrainingSet data;
  for (const std::string& id : project.training_image_ids()) {
    data.ids.push_back(id);
    data.images.push_back(load_png(project.find_image(id)->path));
    data.markers.push_back(project.markers_for(id));
  }
  return data;
}

std::vector<ImageTensor> forward_layer(std::span<const ImageTensor> inputs, const Layer& layer) {
  std::vector<ImageTensor> out;
  out.reserve(inputs.size());
  for (const ImageTensor& x : inputs) out.push_back(run_layer(x, layer));
  return out;
}

FlimModel train_model(const TrainingSet& data, const ArchConfig& arch, std::uint64_t seed,
                      bool apply_selection) {
  if (data.images.empty()) throw DomainError("no marked training images");
  FlimModel model(arch.heuristic, arch.postproc);
  std::vector<ImageTensor> inputs = data.images;
  for (std::size_t l = 0; l < arch.layers.size(); ++l) {
    const LayerConfig& config = arch.layers[l];
    Layer layer = build_layer(inputs, data.markers, config.spec,
                              {seed, arch.epsilon, static_cast<int>(l)});
    if (apply_selection && config.selection) {
      layer.selected = normalize_selection(*config.selection, static_cast<int>(layer.bank.size()));
    }
    if (l + 1 < arch.layers.size()) inputs = forward_layer(inputs, layer);
    model.append_layer(std::move(layer));
  }
  return model;
}

}  // namespace flim
