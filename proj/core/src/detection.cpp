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
#include "flim/detection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "flim/error.hpp"

namespace flim {
namespace {

// Between-class variance of a split, up to the constant factor 1/N^2:
// (N*s0 - n0*S)^2 / (n0 * n1). Kept as numerator and denominator so that
// candidates compare exactly.
struct SplitScore {
  std::int64_t diff = 0;  // N*s0 - n0*S
  std::int64_t denom = 1; // n0 * n1
};

// a > b, exact while the 128-bit cross products cannot overflow.
bool better(const SplitScore& a, const SplitScore& b, std::int64_t total) {
  using u128 = unsigned __int128;
  if (total <= 500000) {
    const u128 da = static_cast<u128>(a.diff < 0 ? -a.diff : a.diff);
    const u128 db = static_cast<u128>(b.diff < 0 ? -b.diff : b.diff);
    return da * da * static_cast<u128>(b.denom) > db * db * static_cast<u128>(a.denom);
  }
  const long double va = static_cast<long double>(a.diff) * a.diff / a.denom;
  const long double vb = static_cast<long double>(b.diff) * b.diff / b.denom;
  return va > vb;
}

class DisjointSet {
 public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

int saliency_bin(float value) noexcept {
  const double v = std::clamp(static_cast<double>(value), 0.0, 1.0);
  return std::min(kOtsuBins - 1, static_cast<int>(std::floor(v * kOtsuBins)));
}

OtsuThreshold otsu_threshold(const SaliencyMap& map) {
  std::array<std::int64_t, kOtsuBins> hist{};
  float max_value = 0.0f;
  bool first = true;
  for (float v : map.data()) {
    ++hist[static_cast<std::size_t>(saliency_bin(v))];
    max_value = first ? v : std::max(max_value, v);
    first = false;
  }
  const std::int64_t total = static_cast<std::int64_t>(map.data().size());
  std::int64_t weighted_total = 0;
  for (int b = 0; b < kOtsuBins; ++b) weighted_total += hist[b] * b;

  OtsuThreshold result;
  result.first_foreground_bin = kOtsuBins;
  result.value = max_value;

  SplitScore best;
  bool found = false;
  std::int64_t n0 = 0;
  std::int64_t s0 = 0;
  for (int k = 1; k < kOtsuBins; ++k) {
    n0 += hist[k - 1];
    s0 += hist[k - 1] * (k - 1);
    const std::int64_t n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    const SplitScore score{total * s0 - n0 * weighted_total, n0 * n1};
    if (!found || better(score, best, total)) {
      best = score;
      found = true;
      result.first_foreground_bin = k;
      result.value = static_cast<double>(k) / kOtsuBins;
    }
  }
  return result;
}

BinaryMask binarize(const SaliencyMap& map, const OtsuThreshold& threshold) {
  BinaryMask mask{map.height(), map.width(), std::vector<std::uint8_t>(map.data().size(), 0)};
  auto data = map.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    mask.bits[i] = saliency_bin(data[i]) >= threshold.first_foreground_bin ? 1 : 0;
  }
  return mask;
}

std::vector<Component> connected_components(const BinaryMask& mask) {
  const int h = mask.height;
  const int w = mask.width;
  if (mask.bits.size() != static_cast<std::size_t>(h) * w) throw DomainError("mask size mismatch");

  // First pass: provisional labels from the already-visited 8-neighbours
  // (W, NW, N, NE), merging equivalences.
  std::vector<int> labels(mask.bits.size(), -1);
  DisjointSet sets;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.at(r, c)) continue;
      int label = -1;
      const std::array<std::pair<int, int>, 4> neighbours{{{r, c - 1}, {r - 1, c - 1}, {r - 1, c}, {r - 1, c + 1}}};
      for (auto [nr, nc] : neighbours) {
        if (nr < 0 || nc < 0 || nc >= w) continue;
        const int other = labels[static_cast<std::size_t>(nr) * w + nc];
        if (other < 0) continue;
        if (label < 0) {
          label = other;
        } else {
          sets.unite(label, other);
        }
      }
      labels[static_cast<std::size_t>(r) * w + c] = label >= 0 ? label : sets.make();
    }
  }

  // Second pass: resolve roots, numbering components by first appearance.
  std::vector<int> component_of_root;
  std::vector<Component> components;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int label = labels[static_cast<std::size_t>(r) * w + c];
      if (label < 0) continue;
      const int root = sets.find(label);
      if (static_cast<std::size_t>(root) >= component_of_root.size()) {
        component_of_root.resize(static_cast<std::size_t>(root) + 1, -1);
      }
      int& index = component_of_root[static_cast<std::size_t>(root)];
      if (index < 0) {
        index = static_cast<int>(components.size());
        components.emplace_back();
      }
      components[static_cast<std::size_t>(index)].pixels.push_back({r, c});
    }
  }
  return components;
}

BoundingBox tight_box(const Component& component) {
  if (component.pixels.empty()) throw DomainError("empty component has no box");
  BoundingBox box{component.pixels[0].col, component.pixels[0].row, component.pixels[0].col + 1,
                  component.pixels[0].row + 1, 0.0};
  for (const Pixel& p : component.pixels) {
    box.x1 = std::min(box.x1, p.col);
    box.y1 = std::min(box.y1, p.row);
    box.x2 = std::max(box.x2, p.col + 1);
    box.y2 = std::max(box.y2, p.row + 1);
  }
  return box;
}

BoundingBox expand_box(const BoundingBox& box, double fraction, int height, int width) {
  if (fraction < 0.0) throw DomainError("expansion fraction must be >= 0");
  // Slack absorbs rounding error so integral bounds are not pushed out a pixel.
  constexpr double kSlack = 1e-9;
  const double dx = box.width() * fraction / 2.0;
  const double dy = box.height() * fraction / 2.0;
  BoundingBox out = box;
  out.x1 = std::max(0, static_cast<int>(std::floor(box.x1 - dx + kSlack)));
  out.y1 = std::max(0, static_cast<int>(std::floor(box.y1 - dy + kSlack)));
  out.x2 = std::min(width, static_cast<int>(std::ceil(box.x2 + dx - kSlack)));
  out.y2 = std::min(height, static_cast<int>(std::ceil(box.y2 + dy - kSlack)));
  return out;
}

void sort_detections(std::vector<BoundingBox>& boxes) {
  std::stable_sort(boxes.begin(), boxes.end(), [](const BoundingBox& a, const BoundingBox& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.y1 != b.y1) return a.y1 < b.y1;
    return a.x1 < b.x1;
  });
}

DetectionSet boxes_from_components(const std::vector<Component>& components, const SaliencyMap& map,
                                   double expand_fraction, int min_area_px) {
  if (expand_fraction < 0.0) throw DomainError("expansion fraction must be >= 0");
  DetectionSet set;
  for (const Component& component : components) {
    if (static_cast<long long>(component.pixels.size()) < min_area_px) continue;
    BoundingBox box = expand_box(tight_box(component), expand_fraction, map.height(), map.width());
    double sum = 0.0;
    for (int r = box.y1; r < box.y2; ++r) {
      for (int c = box.x1; c < box.x2; ++c) sum += map.at(r, c);
    }
    box.score = std::clamp(sum / static_cast<double>(box.area()), 0.0, 1.0);
    set.boxes.push_back(box);
  }
  sort_detections(set.boxes);
  return set;
}

DetectionSet detect_from_saliency(const SaliencyMap& map, const PostProcessing& postproc,
                                  std::string image_id) {
  const BinaryMask mask = binarize(map, otsu_threshold(map));
  DetectionSet set = boxes_from_components(connected_components(mask), map,
                                           postproc.box_expand_fraction, postproc.min_area_px);
  set.image_id = std::move(image_id);
  return set;
}

DetectionSet detect_objects(const ImageTensor& image, const FlimModel& model, std::string image_id) {
  if (model.empty()) throw DomainError("model has no layers");
  const SaliencyMap map = decode_image(image, model, model.depth());
  return detect_from_saliency(map, model.postproc(), std::move(image_id));
}

}  // namespace flim
