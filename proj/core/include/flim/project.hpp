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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flim/markers.hpp"
#include "flim/model.hpp"

namespace flim {

struct ImageEntry {
  std::string id;  // file stem of images/<id>.png
  std::filesystem::path path;
  int height = 0;
  int width = 0;
  int channels = 0;
  bool operator==(const ImageEntry&) const = default;
};

/// A project directory:
///   project.json            name, heuristic, postproc
///   images/<id>.png
///   markers/<id>.json       MarkerSet
///   gt/<id>.json            GroundTruth
///   model/meta.json, model/weights.bin
struct Project {
  std::filesystem::path root;
  std::string name;
  Heuristic heuristic = Heuristic::kParasite;
  PostProcessing postproc;
  std::vector<ImageEntry> images;  // sorted by id
  std::map<std::string, MarkerSet> markers;
  std::map<std::string, GroundTruth> ground_truth;

  const ImageEntry* find_image(const std::string& id) const;
  /// Ids of images carrying at least one marker pixel, in id order.
  std::vector<std::string> training_image_ids() const;
  /// Markers of `id`, or an empty set with that image id.
  MarkerSet markers_for(const std::string& id) const;

  std::filesystem::path model_dir() const { return root / "model"; }
};

/// Reads and validates a project. Every problem is collected into a single
/// ValidationError with one diagnostic per offending file. A missing
/// project.json yields defaults named after the directory.
Project load_project(const std::filesystem::path& root);

/// Writes project.json, markers/ and gt/ in canonical form (markers sorted by
/// id, pixels in raster order). Images are copied when `root` differs from
/// the project's own root. Stale marker and gt files are removed.
void save_project(const Project& project, const std::filesystem::path& root);

/// Validates and writes one marker file; throws ValidationError.
void save_markers(const Project& project, const MarkerSet& markers);

void validate_marker_set(const Project& project, const MarkerSet& markers);

}  // namespace flim
