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

#include "flim/decoder.hpp"
#include "flim/markers.hpp"
#include "flim/model.hpp"

namespace flim {

inline constexpr int kOtsuBins = 256;

/// Histogram bin of a saliency value: min(255, floor(v * 256)), v clamped to [0, 1].
int saliency_bin(float value) noexcept;

/// Otsu split on the 256-bin histogram. Pixels whose bin is >= first_foreground_bin
/// are foreground; `value` is that bin's lower boundary (bin / 256). When all
/// pixels fall in one bin there is no split: first_foreground_bin is 256 and
/// `value` is the map's maximum, so the foreground is empty.
struct OtsuThreshold {
  int first_foreground_bin = kOtsuBins;
  double value = 0.0;
};

OtsuThreshold otsu_threshold(const SaliencyMap& map);

/// Row-major h x w foreground mask.
struct BinaryMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> bits;

  bool at(int row, int col) const noexcept {
    return bits[static_cast<std::size_t>(row) * width + col] != 0;
  }
};

BinaryMask binarize(const SaliencyMap& map, const OtsuThreshold& threshold);

/// Pixels of one 8-connected component, in raster order.
struct Component {
  std::vector<Pixel> pixels;
};

/// 8-connected foreground components, ordered by their first pixel in raster order.
std::vector<Component> connected_components(const BinaryMask& mask);

/// Sorted by descending score; ties ordered by (y1, x1).
struct DetectionSet {
  std::string image_id;
  std::vector<BoundingBox> boxes;
  bool operator==(const DetectionSet&) const = default;
};

/// Smallest half-open box covering the component.
BoundingBox tight_box(const Component& component);

/// Grows a box by `fraction` of its width and height, split evenly between
/// opposite sides, rounding outward, then clamps it to the image.
BoundingBox expand_box(const BoundingBox& box, double fraction, int height, int width);

/// Tight boxes of components with at least min_area_px pixels, expanded and
/// scored by their mean saliency.
DetectionSet boxes_from_components(const std::vector<Component>& components, const SaliencyMap& map,
                                   double expand_fraction, int min_area_px);

void sort_detections(std::vector<BoundingBox>& boxes);

/// Otsu -> components -> boxes with the model's post-processing settings.
DetectionSet detect_from_saliency(const SaliencyMap& map, const PostProcessing& postproc,
                                  std::string image_id = {});

/// Full pipeline on the model's last layer.
DetectionSet detect_objects(const ImageTensor& image, const FlimModel& model, std::string image_id = {});

}  // namespace flim
