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

// Independent reference implementations used to check the library.

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flim/decoder.hpp"
#include "flim/detection.hpp"
#include "flim/image.hpp"
#include "flim/markers.hpp"

namespace flim::testing {

using Rng = std::mt19937_64;

ImageTensor random_image(Rng& rng, int h, int w, int c, float lo = -1.0f, float hi = 1.0f);
Kernel random_kernel(Rng& rng, int size, int channels);
BinaryMask random_mask(Rng& rng, int h, int w, double density);
BoundingBox random_box(Rng& rng, int extent);

// Direct loop over output pixel, kernel, tap row, tap col, channel.
ImageTensor naive_convolve(const ImageTensor& image, std::span<const Kernel> bank, int dilation);

// Enumerates all window offsets per pixel.
ImageTensor naive_pool(const ImageTensor& image, PoolKind kind, int window);

// Scans every split of the 256-bin histogram and compares between-class
// variances as exact rationals. Returns 256 when no split exists.
int exhaustive_otsu_bin(const SaliencyMap& map);

using PixelSet = std::set<std::pair<int, int>>;
// Breadth-first flood fill with 8-connectivity, components sorted by their
// smallest pixel.
std::vector<PixelSet> flood_fill_components(const BinaryMask& mask);

// Counts pixels of both boxes on a raster.
double raster_iou(const BoundingBox& a, const BoundingBox& b);

// AP at one threshold from scratch: global ranking, greedy matching per
// image, then the precision envelope summed over recall steps.
double reference_ap(std::span<const DetectionSet> preds, std::span<const GroundTruth> gts, double tau);

// Population mean and standard deviation.
std::pair<double, double> moments(std::span<const double> values);

class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "flim-test");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace flim::testing
