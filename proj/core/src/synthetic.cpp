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
#include "flim/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "flim/encoder.hpp"
#include "flim/png_io.hpp"
#include "flim/project.hpp"
#include "flim/serialization.hpp"

namespace fs = std::filesystem;

namespace flim {
namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(engine_() >> 11) * 0x1.0p-53);
  }
  int integer(int lo, int hi) {  // inclusive
    return std::min(hi, lo + static_cast<int>(uniform(0.0, hi - lo + 1)));
  }

 private:
  std::mt19937_64 engine_;
};

struct Rect {
  int x1, y1, x2, y2;
  bool overlaps(const Rect& o, int gap) const {
    return x1 < o.x2 + gap && o.x1 < x2 + gap && y1 < o.y2 + gap && o.y1 < y2 + gap;
  }
};

Rect raster_box(const Ellipse& e, int size) {
  Rect r{size, size, 0, 0};
  for (int row = 0; row < size; ++row) {
    for (int col = 0; col < size; ++col) {
      if (!e.contains(row, col)) continue;
      r.x1 = std::min(r.x1, col);
      r.y1 = std::min(r.y1, row);
      r.x2 = std::max(r.x2, col + 1);
      r.y2 = std::max(r.y2, row + 1);
    }
  }
  return r;
}

int raster_area(const Ellipse& e, int size) {
  int n = 0;
  for (int row = 0; row < size; ++row)
    for (int col = 0; col < size; ++col) n += e.contains(row, col) ? 1 : 0;
  return n;
}

}  // namespace

bool Ellipse::contains(double row, double col) const noexcept {
  const double dy = (row - cy) / ry;
  const double dx = (col - cx) / rx;
  return dy * dy + dx * dx <= 1.0;
}

SyntheticSample make_synthetic_sample(const std::string& id, std::uint64_t seed,
                                      const SyntheticOptions& opt) {
  Rng rng(seed);
  const int size = opt.size;
  SyntheticSample s{id, ImageTensor(size, size, 1), {}, {id, {}}, {id, {}}};

  const int wanted = rng.integer(opt.min_objects, opt.max_objects);
  std::vector<Rect> boxes;
  for (int attempt = 0; attempt < 1000 && static_cast<int>(s.objects.size()) < wanted; ++attempt) {
    const double area = rng.uniform(opt.min_area * 1.05, opt.max_area * 0.95);
    const double ratio = rng.uniform(0.55, 1.0);
    double ry = std::sqrt(area / std::numbers::pi * ratio);
    double rx = area / (std::numbers::pi * ry);
    if (rng.uniform(0.0, 1.0) < 0.5) std::swap(rx, ry);
    const double margin = 6.0;
    Ellipse e{rng.uniform(ry + margin, size - ry - margin), rng.uniform(rx + margin, size - rx - margin), ry, rx};
    const int pixels = raster_area(e, size);
    if (pixels < opt.min_area || pixels > opt.max_area) continue;
    const Rect box = raster_box(e, size);
    if (std::any_of(boxes.begin(), boxes.end(), [&](const Rect& b) { return b.overlaps(box, 10); })) continue;
    s.objects.push_back(e);
    boxes.push_back(box);
  }

  const double fx = rng.uniform(11.0, 23.0);
  const double fy = rng.uniform(11.0, 23.0);
  const double px = rng.uniform(0.0, 2 * std::numbers::pi);
  const double py = rng.uniform(0.0, 2 * std::numbers::pi);
  for (int row = 0; row < size; ++row) {
    for (int col = 0; col < size; ++col) {
      bool inside = false;
      for (const Ellipse& e : s.objects) inside = inside || e.contains(row, col);
      double v;
      if (inside) {
        v = opt.foreground;
      } else {
        v = opt.background +
            opt.texture * std::sin(2 * std::numbers::pi * col / fx + px) * std::sin(2 * std::numbers::pi * row / fy + py);
      }
      v += opt.noise * rng.uniform(-1.0, 1.0);
      v = std::clamp(v, 0.0, 1.0);
      s.image.at(row, col, 0) = static_cast<float>(std::round(v * 255.0) / 255.0);
    }
  }

  int marker_id = 1;
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const Ellipse& e = s.objects[i];
    std::set<Pixel> pixels;
    const int r0 = static_cast<int>(std::lround(e.cy));
    const int c0 = static_cast<int>(std::lround(e.cx));
    for (int dc = -static_cast<int>(0.6 * e.rx); dc <= static_cast<int>(0.6 * e.rx); ++dc) {
      if (e.contains(r0, c0 + dc)) pixels.insert({r0, c0 + dc});
    }
    for (int dr = -static_cast<int>(0.6 * e.ry); dr <= static_cast<int>(0.6 * e.ry); ++dr) {
      if (e.contains(r0 + dr, c0)) pixels.insert({r0 + dr, c0});
    }
    s.markers.markers.push_back({marker_id++, {pixels.begin(), pixels.end()}});
    s.truth.boxes.push_back({boxes[i].x1, boxes[i].y1, boxes[i].x2, boxes[i].y2, 0.0});
  }

  const int stroke = 16;
  for (int placed = 0, attempt = 0; placed < 2 && attempt < 2000; ++attempt) {
    const int row = rng.integer(3, size - 4);
    const int col = rng.integer(3, size - 4 - stroke);
    const Rect r{col, row, col + stroke, row + 1};
    if (std::any_of(boxes.begin(), boxes.end(), [&](const Rect& b) { return b.overlaps(r, 5); })) continue;
    std::vector<Pixel> pixels;
    for (int c = col; c < col + stroke; ++c) pixels.push_back({row, c});
    s.markers.markers.push_back({marker_id++, std::move(pixels)});
    boxes.push_back(r);
    ++placed;
  }
  return s;
}

std::vector<SyntheticSample> make_synthetic_dataset(int count, std::uint64_t seed, const SyntheticOptions& options) {
  std::vector<SyntheticSample> samples;
  for (int i = 0; i < count; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "img_%02d", i);
    samples.push_back(make_synthetic_sample(id, mix_seed(seed, static_cast<std::uint64_t>(i)), options));
  }
  return samples;
}

void write_synthetic_project(const fs::path& root, const std::vector<SyntheticSample>& samples, int marked) {
  fs::create_directories(root / "images");
  Project project;
  project.root = root;
  project.name = root.filename().string();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const SyntheticSample& s = samples[i];
    const fs::path path = root / "images" / (s.id + ".png");
    save_png(s.image, path);
    project.images.push_back({s.id, path, s.image.height(), s.image.width(), 1});
    project.ground_truth[s.id] = s.truth;
    if (static_cast<int>(i) < marked) project.markers[s.id] = s.markers;
  }
  std::sort(project.images.begin(), project.images.end(),
            [](const ImageEntry& a, const ImageEntry& b) { return a.id < b.id; });
  save_project(project, root);
}

}  // namespace flim
