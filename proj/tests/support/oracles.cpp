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
#include "oracles.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <deque>
#include <map>

namespace flim::testing {

using boost::multiprecision::cpp_rational;

ImageTensor random_image(Rng& rng, int h, int w, int c, float lo, float hi) {
  std::uniform_real_distribution<float> u(lo, hi);
  std::vector<float> data(static_cast<std::size_t>(h) * w * c);
  for (float& v : data) v = u(rng);
  return ImageTensor(h, w, c, std::move(data));
}

Kernel random_kernel(Rng& rng, int size, int channels) {
  std::normal_distribution<float> n(0.0f, 1.0f);
  std::vector<float> w(static_cast<std::size_t>(size) * size * channels);
  for (float& v : w) v = n(rng);
  return Kernel(size, channels, std::move(w));
}

BinaryMask random_mask(Rng& rng, int h, int w, double density) {
  std::bernoulli_distribution on(density);
  BinaryMask mask{h, w, std::vector<std::uint8_t>(static_cast<std::size_t>(h) * w)};
  for (auto& b : mask.bits) b = on(rng) ? 1 : 0;
  return mask;
}

BoundingBox random_box(Rng& rng, int extent) {
  std::uniform_int_distribution<int> pos(0, extent - 2);
  const int x1 = pos(rng);
  const int y1 = pos(rng);
  std::uniform_int_distribution<int> wx(1, extent - x1);
  std::uniform_int_distribution<int> wy(1, extent - y1);
  return {x1, y1, x1 + wx(rng), y1 + wy(rng), 0.0};
}

ImageTensor naive_convolve(const ImageTensor& image, std::span<const Kernel> bank, int dilation) {
  const int m = static_cast<int>(bank.size());
  ImageTensor out(image.height(), image.width(), m);
  for (int i = 0; i < image.height(); ++i) {
    for (int j = 0; j < image.width(); ++j) {
      for (int b = 0; b < m; ++b) {
        const Kernel& k = bank[b];
        const int half = k.size() / 2;
        double sum = 0.0;
        for (int u = 0; u < k.size(); ++u) {
          for (int v = 0; v < k.size(); ++v) {
            const int r = i + (u - half) * dilation;
            const int c = j + (v - half) * dilation;
            if (r < 0 || c < 0 || r >= image.height() || c >= image.width()) continue;
            for (int ch = 0; ch < image.channels(); ++ch) {
              sum += static_cast<double>(image.at(r, c, ch)) *
                     k.weights()[(static_cast<std::size_t>(u) * k.size() + v) * image.channels() + ch];
            }
          }
        }
        out.at(i, j, b) = static_cast<float>(sum);
      }
    }
  }
  return out;
}

ImageTensor naive_pool(const ImageTensor& image, PoolKind kind, int window) {
  ImageTensor out(image.height(), image.width(), image.channels());
  const int lo = -(window - 1) / 2;
  const int hi = window / 2;
  for (int i = 0; i < image.height(); ++i) {
    for (int j = 0; j < image.width(); ++j) {
      for (int ch = 0; ch < image.channels(); ++ch) {
        double acc = kind == PoolKind::kMax ? -INFINITY : 0.0;
        int n = 0;
        for (int di = lo; di <= hi; ++di) {
          for (int dj = lo; dj <= hi; ++dj) {
            if (!image.contains(i + di, j + dj)) continue;
            const double v = image.at(i + di, j + dj, ch);
            acc = kind == PoolKind::kMax ? std::max(acc, v) : acc + v;
            ++n;
          }
        }
        out.at(i, j, ch) = static_cast<float>(kind == PoolKind::kMax ? acc : acc / n);
      }
    }
  }
  return out;
}

int exhaustive_otsu_bin(const SaliencyMap& map) {
  std::array<long long, 256> hist{};
  for (float v : map.data()) {
    const double x = std::clamp(static_cast<double>(v), 0.0, 1.0);
    ++hist[std::min(255, static_cast<int>(x * 256.0))];
  }
  const long long total = static_cast<long long>(map.data().size());
  int best_bin = 256;
  cpp_rational best = -1;
  for (int t = 1; t < 256; ++t) {
    long long n0 = 0, n1 = 0;
    cpp_rational s0 = 0, s1 = 0;
    for (int b = 0; b < 256; ++b) {
      if (b < t) {
        n0 += hist[b];
        s0 += cpp_rational(hist[b] * b);
      } else {
        n1 += hist[b];
        s1 += cpp_rational(hist[b] * b);
      }
    }
    if (n0 == 0 || n1 == 0) continue;
    const cpp_rational w0(n0, total);
    const cpp_rational w1(n1, total);
    const cpp_rational diff = s0 / n0 - s1 / n1;
    const cpp_rational var = w0 * w1 * diff * diff;
    if (var > best) {
      best = var;
      best_bin = t;
    }
  }
  return best_bin;
}

std::vector<PixelSet> flood_fill_components(const BinaryMask& mask) {
  std::vector<std::uint8_t> seen(mask.bits.size(), 0);
  std::vector<PixelSet> out;
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * mask.width + c;
      if (!mask.bits[idx] || seen[idx]) continue;
      PixelSet comp;
      std::deque<std::pair<int, int>> queue{{r, c}};
      seen[idx] = 1;
      while (!queue.empty()) {
        auto [y, x] = queue.front();
        queue.pop_front();
        comp.insert({y, x});
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int ny = y + dy, nx = x + dx;
            if (ny < 0 || nx < 0 || ny >= mask.height || nx >= mask.width) continue;
            const std::size_t n = static_cast<std::size_t>(ny) * mask.width + nx;
            if (mask.bits[n] && !seen[n]) {
              seen[n] = 1;
              queue.push_back({ny, nx});
            }
          }
        }
      }
      out.push_back(std::move(comp));
    }
  }
  std::sort(out.begin(), out.end(), [](const PixelSet& a, const PixelSet& b) { return *a.begin() < *b.begin(); });
  return out;
}

double raster_iou(const BoundingBox& a, const BoundingBox& b) {
  const int x_max = std::max(a.x2, b.x2);
  const int y_max = std::max(a.y2, b.y2);
  long long inter = 0, uni = 0;
  for (int y = std::min(a.y1, b.y1); y < y_max; ++y) {
    for (int x = std::min(a.x1, b.x1); x < x_max; ++x) {
      const bool in_a = x >= a.x1 && x < a.x2 && y >= a.y1 && y < a.y2;
      const bool in_b = x >= b.x1 && x < b.x2 && y >= b.y1 && y < b.y2;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double reference_ap(std::span<const DetectionSet> preds, std::span<const GroundTruth> gts, double tau) {
  struct Ranked {
    double score;
    std::size_t order;
    std::string image;
    BoundingBox box;
  };
  std::vector<Ranked> ranked;
  for (const DetectionSet& d : preds)
    for (const BoundingBox& b : d.boxes) ranked.push_back({b.score, ranked.size(), d.image_id, b});
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) { return a.score > b.score; });

  std::map<std::string, std::vector<BoundingBox>> truth;
  std::map<std::string, std::vector<bool>> used;
  int total = 0;
  for (const GroundTruth& g : gts) {
    truth[g.image_id] = g.boxes;
    used[g.image_id].assign(g.boxes.size(), false);
    total += static_cast<int>(g.boxes.size());
  }
  // Per-image greedy matching follows each image's own score order, which is
  // the global order restricted to that image.
  std::vector<bool> hit(ranked.size(), false);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    auto& boxes = truth[ranked[i].image];
    auto& taken = used[ranked[i].image];
    int best = -1;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < boxes.size(); ++g) {
      if (taken[g]) continue;
      const double v = raster_iou(ranked[i].box, boxes[g]);
      if (v > best_iou) {
        best_iou = v;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0 && best_iou > tau) {
      taken[best] = true;
      hit[i] = true;
    }
  }
  std::vector<double> precision, recall;
  int tp = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    tp += hit[i];
    precision.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
    recall.push_back(static_cast<double>(tp) / total);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (!hit[i]) continue;
    double env = 0.0;
    for (std::size_t j = i; j < ranked.size(); ++j) env = std::max(env, precision[j]);
    ap += (recall[i] - prev_recall) * env;
    prev_recall = recall[i];
  }
  return ap;
}

std::pair<double, double> moments(std::span<const double> values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

TempDir::TempDir(const std::string& prefix) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          (prefix + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace flim::testing
