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
#include "flim/project.hpp"

#include <algorithm>
#include <set>

#include "flim/png_io.hpp"
#include "flim/serialization.hpp"

namespace fs = std::filesystem;

namespace flim {
namespace {

std::vector<fs::path> files_with_extension(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string relative_name(const fs::path& root, const fs::path& file) {
  return file.lexically_relative(root).generic_string();
}

void add_file(std::vector<Diagnostic>& sink, std::vector<Diagnostic> problems, const std::string& file) {
  for (Diagnostic& d : problems) {
    d.file = file;
    sink.push_back(std::move(d));
  }
}

Json project_json(const Project& project) {
  return Json{{"name", project.name},
              {"heuristic", to_string(project.heuristic)},
              {"postproc", project.postproc}};
}

void remove_stale(const fs::path& dir, const std::set<std::string>& keep) {
  for (const fs::path& file : files_with_extension(dir, ".json")) {
    if (keep.count(file.stem().string()) == 0) fs::remove(file);
  }
}

}  // namespace

const ImageEntry* Project::find_image(const std::string& id) const {
  auto it = std::lower_bound(images.begin(), images.end(), id,
                             [](const ImageEntry& e, const std::string& key) { return e.id < key; });
  return it != images.end() && it->id == id ? &*it : nullptr;
}

std::vector<std::string> Project::training_image_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, set] : markers) {
    if (!set.empty() && find_image(id) != nullptr) ids.push_back(id);
  }
  return ids;
}

MarkerSet Project::markers_for(const std::string& id) const {
  auto it = markers.find(id);
  if (it != markers.end()) return it->second;
  return MarkerSet{id, {}};
}

Project load_project(const fs::path& root) {
  std::vector<Diagnostic> problems;
  Project project;
  project.root = root;
  project.name = root.filename().string();
  if (project.name.empty()) project.name = root.parent_path().filename().string();

  if (!fs::is_directory(root / "images")) {
    throw ValidationError({{relative_name(root, root / "images"), ValidationCode::kMissingFile,
                            "project has no images/ directory"}});
  }

  const fs::path meta = root / "project.json";
  if (fs::exists(meta)) {
    try {
      const Json j = read_json_file(meta);
      project.name = j.value("name", project.name);
      project.heuristic = heuristic_from_string(j.value("heuristic", std::string("parasite")));
      if (j.contains("postproc")) project.postproc = j.at("postproc").get<PostProcessing>();
    } catch (const std::exception& e) {
      problems.push_back({"project.json", ValidationCode::kMalformedJson, e.what()});
    }
  }

  for (const fs::path& file : files_with_extension(root / "images", ".png")) {
    try {
      const PngInfo info = read_png_info(file);
      project.images.push_back({file.stem().string(), file, info.height, info.width, info.channels});
    } catch (const std::exception& e) {
      problems.push_back({relative_name(root, file), ValidationCode::kUnreadableImage, e.what()});
    }
  }
  std::sort(project.images.begin(), project.images.end(),
            [](const ImageEntry& a, const ImageEntry& b) { return a.id < b.id; });

  for (const fs::path& file : files_with_extension(root / "markers", ".json")) {
    const std::string name = relative_name(root, file);
    const std::string id = file.stem().string();
    MarkerSet set;
    try {
      set = read_json_file(file).get<MarkerSet>();
    } catch (const std::exception& e) {
      problems.push_back({name, ValidationCode::kMalformedJson, e.what()});
      continue;
    }
    if (set.image_id.empty()) set.image_id = id;
    const ImageEntry* image = project.find_image(id);
    if (image == nullptr || set.image_id != id) {
      problems.push_back({name, ValidationCode::kDanglingImage,
                          "markers reference image '" + set.image_id + "' which is not in images/"});
      continue;
    }
    add_file(problems, validate_markers(set, image->height, image->width), name);
    project.markers.emplace(id, std::move(set));
  }

  for (const fs::path& file : files_with_extension(root / "gt", ".json")) {
    const std::string name = relative_name(root, file);
    const std::string id = file.stem().string();
    GroundTruth gt;
    try {
      gt = read_json_file(file).get<GroundTruth>();
    } catch (const std::exception& e) {
      problems.push_back({name, ValidationCode::kMalformedJson, e.what()});
      continue;
    }
    if (gt.image_id.empty()) gt.image_id = id;
    const ImageEntry* image = project.find_image(id);
    if (image == nullptr || gt.image_id != id) {
      problems.push_back({name, ValidationCode::kDanglingImage,
                          "ground truth references image '" + gt.image_id + "' which is not in images/"});
      continue;
    }
    add_file(problems, validate_ground_truth(gt, image->height, image->width), name);
    project.ground_truth.emplace(id, std::move(gt));
  }

  if (!problems.empty()) throw ValidationError(std::move(problems));
  return project;
}

void validate_marker_set(const Project& project, const MarkerSet& markers) {
  const std::string file = "markers/" + markers.image_id + ".json";
  const ImageEntry* image = project.find_image(markers.image_id);
  if (image == nullptr) {
    throw ValidationError({{file, ValidationCode::kDanglingImage,
                            "image '" + markers.image_id + "' is not part of the project"}});
  }
  auto problems = validate_markers(markers, image->height, image->width);
  if (!problems.empty()) {
    for (Diagnostic& d : problems) d.file = file;
    throw ValidationError(std::move(problems));
  }
}

void save_markers(const Project& project, const MarkerSet& markers) {
  validate_marker_set(project, markers);
  fs::create_directories(project.root / "markers");
  write_json_file(project.root / "markers" / (markers.image_id + ".json"), Json(canonicalize(markers)));
}

void save_project(const Project& project, const fs::path& root) {
  fs::create_directories(root / "images");
  fs::create_directories(root / "markers");
  fs::create_directories(root / "gt");

  for (const ImageEntry& image : project.images) {
    const fs::path target = root / "images" / (image.id + ".png");
    if (!fs::exists(target) || !fs::equivalent(image.path, target)) {
      fs::copy_file(image.path, target, fs::copy_options::overwrite_existing);
    }
  }

  write_json_file(root / "project.json", project_json(project));

  std::set<std::string> marker_ids;
  for (const auto& [id, set] : project.markers) {
    MarkerSet canonical = canonicalize(set);
    canonical.image_id = id;
    write_json_file(root / "markers" / (id + ".json"), Json(canonical));
    marker_ids.insert(id);
  }
  remove_stale(root / "markers", marker_ids);

  std::set<std::string> gt_ids;
  for (const auto& [id, gt] : project.ground_truth) {
    GroundTruth copy = gt;
    copy.image_id = id;
    write_json_file(root / "gt" / (id + ".json"), Json(copy));
    gt_ids.insert(id);
  }
  remove_stale(root / "gt", gt_ids);
}

}  // namespace flim
