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

// JSON mappings for the on-disk and on-wire formats.

#include <filesystem>
#include <string>

#include "json.hpp"

#include "flim/detection.hpp"
#include "flim/markers.hpp"
#include "flim/metrics.hpp"
#include "flim/model.hpp"

namespace flim {

using Json = nlohmann::json;

// {"marker_id": 1, "pixels": [[row, col], ...]}
void to_json(Json& j, const Marker& m);
void from_json(const Json& j, Marker& m);
// {"image_id": "...", "markers": [...]}
void to_json(Json& j, const MarkerSet& m);
void from_json(const Json& j, MarkerSet& m);

// {"x1", "y1", "x2", "y2"} plus "score" when `with_score`.
Json box_to_json(const BoundingBox& b, bool with_score);
BoundingBox box_from_json(const Json& j);

// {"image_id": "...", "boxes": [{x1, y1, x2, y2}]}
void to_json(Json& j, const GroundTruth& gt);
void from_json(const Json& j, GroundTruth& gt);

// {"image_id": "...", "boxes": [{x1, y1, x2, y2, score}]}
void to_json(Json& j, const DetectionSet& d);
void from_json(const Json& j, DetectionSet& d);

void to_json(Json& j, const PoolSpec& p);
void from_json(const Json& j, PoolSpec& p);
// Missing fields fall back to LayerSpec defaults.
void to_json(Json& j, const LayerSpec& s);
void from_json(const Json& j, LayerSpec& s);
void to_json(Json& j, const PostProcessing& p);
void from_json(const Json& j, PostProcessing& p);
void to_json(Json& j, const KernelOrigin& o);
void from_json(const Json& j, KernelOrigin& o);

// {"F2_50", "AP_50", "F2_75", "AP_75", "muAP"}
Json metrics_to_json(const EvaluationReport& report);

Json read_json_file(const std::filesystem::path& path);
// Pretty-printed with two-space indentation and a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& value);

}  // namespace flim
