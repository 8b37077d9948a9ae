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

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "flim/error.hpp"

namespace flim {

struct Pixel {
  int row = 0;
  int col = 0;
  auto operator<=>(const Pixel&) const = default;
};

/// One user scribble: a labelled set of distinct pixels.
struct Marker {
  int marker_id = 0;
  std::vector<Pixel> pixels;
  bool operator==(const Marker&) const = default;
};

/// All scribbles drawn on one image.
struct MarkerSet {
  std::string image_id;
  std::vector<Marker> markers;

  std::size_t pixel_count() const noexcept;
  bool empty() const noexcept { return pixel_count() == 0; }
  bool operator==(const MarkerSet&) const = default;
};

/// Returns problems (empty when valid): pixels out of a height x width image,
/// duplicate marker ids, empty markers, duplicate pixels inside a marker.
/// Diagnostic::file is left empty for the caller to fill in.
std::vector<Diagnostic> validate_markers(const MarkerSet& markers, int height, int width);

/// Sorts markers by id and each marker's pixels in raster order.
MarkerSet canonicalize(MarkerSet markers);

/// Axis-aligned box on the pixel grid, half-open: [x1, x2) x [y1, y2).
/// x is the column axis, y the row axis.
struct BoundingBox {
  int x1 = 0;
  int y1 = 0;
  int x2 = 0;
  int y2 = 0;
  double score = 0.0;

  int width() const noexcept { return x2 - x1; }
  int height() const noexcept { return y2 - y1; }
  long long area() const noexcept { return static_cast<long long>(width()) * height(); }
  bool valid() const noexcept { return x2 > x1 && y2 > y1; }
  bool contains(const BoundingBox& other) const noexcept {
    return x1 <= other.x1 && y1 <= other.y1 && x2 >= other.x2 && y2 >= other.y2;
  }
  bool operator==(const BoundingBox&) const = default;
};

struct GroundTruth {
  std::string image_id;
  std::vector<BoundingBox> boxes;
  bool operator==(const GroundTruth&) const = default;
};

std::vector<Diagnostic> validate_ground_truth(const GroundTruth& gt, int height, int width);

}  // namespace flim
