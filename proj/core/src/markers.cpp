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
#include "flim/markers.hpp"

#include <algorithm>
#include <set>

namespace flim {

std::size_t MarkerSet::pixel_count() const noexcept {
  std::size_t n = 0;
  for (const Marker& m : markers) n += m.pixels.size();
  return n;
}

std::vector<Diagnostic> validate_markers(const MarkerSet& markers, int height, int width) {
  std::vector<Diagnostic> problems;
  std::set<int> ids;
  for (const Marker& marker : markers.markers) {
    const std::string name = "marker " + std::to_string(marker.marker_id);
    if (!ids.insert(marker.marker_id).second) {
      problems.push_back({"", ValidationCode::kDuplicateMarker, "duplicate " + name});
    }
    if (marker.pixels.empty()) {
      problems.push_back({"", ValidationCode::kEmptyMarker, name + " has no pixels"});
      continue;
    }
    std::set<Pixel> seen;
    for (const Pixel& p : marker.pixels) {
      if (p.row < 0 || p.col < 0 || p.row >= height || p.col >= width) {
        problems.push_back({"", ValidationCode::kOutOfBounds,
                            name + " pixel (" + std::to_string(p.row) + ", " +
                                std::to_string(p.col) + ") outside " + std::to_string(height) +
                                "x" + std::to_string(width) + " image"});
        break;
      }
      if (!seen.insert(p).second) {
        problems.push_back({"", ValidationCode::kDuplicatePixel,
                            name + " repeats pixel (" + std::to_string(p.row) + ", " +
                                std::to_string(p.col) + ")"});
        break;
      }
    }
  }
  return problems;
}

MarkerSet canonicalize(MarkerSet markers) {
  std::sort(markers.markers.begin(), markers.markers.end(),
            [](const Marker& a, const Marker& b) { return a.marker_id < b.marker_id; });
  for (Marker& m : markers.markers) std::sort(m.pixels.begin(), m.pixels.end());
  return markers;
}

std::vector<Diagnostic> validate_ground_truth(const GroundTruth& gt, int height, int width) {
  std::vector<Diagnostic> problems;
  for (std::size_t i = 0; i < gt.boxes.size(); ++i) {
    const BoundingBox& b = gt.boxes[i];
    if (!b.valid()) {
      problems.push_back({"", ValidationCode::kInvalidBox, "box " + std::to_string(i) + " is empty or inverted"});
    } else if (b.x1 < 0 || b.y1 < 0 || b.x2 > width || b.y2 > height) {
      problems.push_back({"", ValidationCode::kOutOfBounds,
                          "box " + std::to_string(i) + " exceeds " + std::to_string(height) + "x" +
                              std::to_string(width) + " image"});
    }
  }
  return problems;
}

}  // namespace flim
