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
#include "flim/serialization.hpp"

#include <array>
#include <fstream>

#include "flim/error.hpp"

namespace flim {

void to_json(Json& j, const Marker& m) {
  Json pixels = Json::array();
  for (const Pixel& p : m.pixels) pixels.push_back({p.row, p.col});
  j = Json{{"marker_id", m.marker_id}, {"pixels", std::move(pixels)}};
}

void from_json(const Json& j, Marker& m) {
  m.marker_id = j.at("marker_id").get<int>();
  m.pixels.clear();
  for (const Json& p : j.at("pixels")) {
    const auto rc = p.get<std::array<int, 2>>();
    m.pixels.push_back({rc[0], rc[1]});
  }
}

void to_json(Json& j, const MarkerSet& m) {
  j = Json{{"image_id", m.image_id}, {"markers", m.markers}};
}

void from_json(const Json& j, MarkerSet& m) {
  m.image_id = j.value("image_id", std::string{});
  m.markers = j.at("markers").get<std::vector<Marker>>();
}

Json box_to_json(const BoundingBox& b, bool with_score) {
  Json j{{"x1", b.x1}, {"y1", b.y1}, {"x2", b.x2}, {"y2", b.y2}};
  if (with_score) j["score"] = b.score;
  return j;
}

BoundingBox box_from_json(const Json& j) {
  BoundingBox b;
  b.x1 = j.at("x1").get<int>();
  b.y1 = j.at("y1").get<int>();
  b.x2 = j.at("x2").get<int>();
  b.y2 = j.at("y2").get<int>();
  b.score = j.value("score", 0.0);
  return b;
}

void to_json(Json& j, const GroundTruth& gt) {
  Json boxes = Json::array();
  for (const BoundingBox& b : gt.boxes) boxes.push_back(box_to_json(b, false));
  j = Json{{"image_id", gt.image_id}, {"boxes", std::move(boxes)}};
}

void from_json(const Json& j, GroundTruth& gt) {
  gt.image_id = j.value("image_id", std::string{});
  gt.boxes.clear();
  for (const Json& b : j.at("boxes")) gt.boxes.push_back(box_from_json(b));
}

void to_json(Json& j, const DetectionSet& d) {
  Json boxes = Json::array();
  for (const BoundingBox& b : d.boxes) boxes.push_back(box_to_json(b, true));
  j = Json{{"image_id", d.image_id}, {"boxes", std::move(boxes)}};
}

void from_json(const Json& j, DetectionSet& d) {
  d.image_id = j.at("image_id").get<std::string>();
  d.boxes.clear();
  for (const Json& b : j.at("boxes")) d.boxes.push_back(box_from_json(b));
}

void to_json(Json& j, const PoolSpec& p) {
  j = Json{{"kind", to_string(p.kind)}, {"window", p.window}};
}

void from_json(const Json& j, PoolSpec& p) {
  p.kind = pool_kind_from_string(j.value("kind", std::string("max")).c_str());
  p.window = j.value("window", 3);
}

void to_json(Json& j, const LayerSpec& s) {
  j = Json{{"kernel_size", s.kernel_size},
           {"dilation", s.dilation},
           {"kernels_per_marker", s.kernels_per_marker},
           {"kernels_total", s.kernels_total},
           {"pooling", s.pooling}};
}

void from_json(const Json& j, LayerSpec& s) {
  const LayerSpec defaults;
  s.kernel_size = j.value("kernel_size", defaults.kernel_size);
  s.dilation = j.value("dilation", defaults.dilation);
  s.kernels_per_marker = j.value("kernels_per_marker", defaults.kernels_per_marker);
  s.kernels_total = j.value("kernels_total", defaults.kernels_total);
  s.pooling = j.contains("pooling") ? j.at("pooling").get<PoolSpec>() : defaults.pooling;
}

void to_json(Json& j, const PostProcessing& p) {
  j = Json{{"box_expand_fraction", p.box_expand_fraction}, {"min_area_px", p.min_area_px}};
}

void from_json(const Json& j, PostProcessing& p) {
  const PostProcessing defaults;
  p.box_expand_fraction = j.value("box_expand_fraction", defaults.box_expand_fraction);
  p.min_area_px = j.value("min_area_px", defaults.min_area_px);
}

void to_json(Json& j, const KernelOrigin& o) {
  j = Json{{"image_id", o.image_id}, {"marker_id", o.marker_id}, {"members", o.members}};
}

void from_json(const Json& j, KernelOrigin& o) {
  o.image_id = j.at("image_id").get<std::string>();
  o.marker_id = j.at("marker_id").get<int>();
  o.members = j.value("members", 0);
}

Json metrics_to_json(const EvaluationReport& report) {
  return Json{{"F2_50", report.f2_50},
              {"AP_50", report.ap_50},
              {"F2_75", report.f2_75},
              {"AP_75", report.ap_75},
              {"muAP", report.mu_ap}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(FormatCode::kIo, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw FormatError(FormatCode::kMalformed, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& value) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError(FormatCode::kIo, "cannot write " + path.string());
  out << value.dump(2) << '\n';
  if (!out) throw FormatError(FormatCode::kIo, "short write to " + path.string());
}

}  // namespace flim
