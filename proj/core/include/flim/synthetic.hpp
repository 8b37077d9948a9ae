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

// Generator for the dark-ellipse test fixture.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "flim/image.hpp"
#include "flim/markers.hpp"

namespace flim {

struct SyntheticOptions {
  int size = 128;
  int min_objects = 2;
  int max_objects = 4;
  double min_area = 150.0;
  double max_area = 600.0;
  float background = 0.80f;
  float foreground = 0.22f;
  float texture = 0.06f;  // amplitude of the background texture
  float noise = 0.03f;
};

struct Ellipse {
  double cy = 0.0;
  double cx = 0.0;
  double ry = 0.0;
  double rx = 0.0;
  bool contains(double row, double col) const noexcept;
};

struct SyntheticSample {
  std::string id;
  ImageTensor image;  // single channel, [0, 1]
  std::vector<Ellipse> objects;
  GroundTruth truth;  // tight boxes of the rasterized ellipses
  MarkerSet markers;  // one scribble per ellipse, then two background scribbles
};

SyntheticSample make_synthetic_sample(const std::string& id, std::uint64_t seed,
                                      const SyntheticOptions& options = {});

/// Samples named img_00, img_01, ... with seeds derived from `seed`.
std::vector<SyntheticSample> make_synthetic_dataset(int count, std::uint64_t seed,
                                                    const SyntheticOptions& options = {});

/// Writes a project directory: every image and ground truth, markers only
/// for the first `marked` samples.
void write_synthetic_project(const std::filesystem::path& root,
                             const std::vector<SyntheticSample>& samples, int marked);

}  // namespace flim
