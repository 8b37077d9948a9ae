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
#include "flim/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "flim/error.hpp"

namespace flim {
namespace {

void check_shape(int height, int width, int channels) {
  if (height < 1 || width < 1 || channels < 1) {
    throw DomainError("image shape must be at least 1x1x1, got " + std::to_string(height) + "x" +
                      std::to_string(width) + "x" + std::to_string(channels));
  }
}

void check_window(int size, int dilation) {
  if (size < 1 || size % 2 == 0) {
    throw DomainError("patch size must be odd and positive, got " + std::to_string(size));
  }
  if (dilation < 1) {
    throw DomainError("dilation must be >= 1, got " + std::to_string(dilation));
  }
}

}  // namespace

ImageTensor::ImageTensor(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  check_shape(height, width, channels);
  if (!std::isfinite(fill)) throw DomainError("fill value must be finite");
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

ImageTensor::ImageTensor(int height, int width, int channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  check_shape(height, width, channels);
  if (data_.size() != static_cast<std::size_t>(height) * width * channels) {
    throw DomainError("image data length " + std::to_string(data_.size()) + " does not match " +
                      std::to_string(height) + "x" + std::to_string(width) + "x" +
                      std::to_string(channels));
  }
  if (!std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); })) {
    throw DomainError("image data contains non-finite values");
  }
}

ImageTensor ImageTensor::channel(int channel) const {
  if (channel < 0 || channel >= channels_) {
    throw DomainError("channel " + std::to_string(channel) + " out of range");
  }
  ImageTensor out(height_, width_, 1);
  const std::size_t n = pixel_count();
  for (std::size_t p = 0; p < n; ++p) {
    out.data_[p] = data_[p * channels_ + channel];
  }
  return out;
}

Kernel::Kernel(int size, int channels, std::vector<float> weights)
    : size_(size), channels_(channels), weights_(std::move(weights)) {
  check_window(size, 1);
  if (channels < 1) throw DomainError("kernel needs at least one channel");
  if (weights_.size() != static_cast<std::size_t>(size) * size * channels) {
    throw DomainError("kernel weight count does not match its shape");
  }
  double sum = 0.0;
  for (float w : weights_) sum += static_cast<double>(w) * w;
  norm_ = std::sqrt(sum);
}

Kernel Kernel::normalized() const {
  if (norm_ == 0.0) throw DomainError("cannot normalize a zero kernel");
  std::vector<float> scaled(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    scaled[i] = static_cast<float>(weights_[i] / norm_);
  }
  return Kernel(size_, channels_, std::move(scaled));
}

const char* to_string(PoolKind kind) {
  return kind == PoolKind::kMax ? "max" : "average";
}

PoolKind pool_kind_from_string(const char* name) {
  const std::string s(name);
  if (s == "max") return PoolKind::kMax;
  if (s == "average" || s == "avg") return PoolKind::kAverage;
  throw DomainError("unknown pooling kind '" + s + "'");
}

WindowExtent pool_window_extent(int window) noexcept {
  return {(window - 1) / 2, window / 2};
}

void extract_patch_into(const ImageTensor& image, int row, int col, int size, int dilation,
                        std::span<float> out) {
  check_window(size, dilation);
  if (!image.contains(row, col)) {
    throw DomainError("patch center (" + std::to_string(row) + ", " + std::to_string(col) +
                      ") outside image");
  }
  const int c = image.channels();
  if (out.size() != static_cast<std::size_t>(size) * size * c) {
    throw DomainError("patch buffer has wrong length");
  }
  const int half = (size - 1) / 2;
  float* dst = out.data();
  for (int dr = -half; dr <= half; ++dr) {
    const int r = row + dr * dilation;
    for (int dc = -half; dc <= half; ++dc, dst += c) {
      const int cc = col + dc * dilation;
      if (image.contains(r, cc)) {
        std::memcpy(dst, image.pixel(r, cc).data(), sizeof(float) * c);
      } else {
        std::fill_n(dst, c, 0.0f);
      }
    }
  }
}

Patch extract_patch(const ImageTensor& image, int row, int col, int size, int dilation) {
  Patch patch;
  patch.size = size;
  patch.channels = image.channels();
  patch.dilation = dilation;
  check_window(size, dilation);
  patch.values.resize(static_cast<std::size_t>(size) * size * image.channels());
  extract_patch_into(image, row, col, size, dilation, patch.values);
  return patch;
}

ImageTensor convolve(const ImageTensor& image, std::span<const Kernel> bank, int dilation) {
  if (bank.empty()) throw DomainError("convolution needs at least one kernel");
  const int size = bank.front().size();
  const int c = image.channels();
  check_window(size, dilation);
  for (const Kernel& k : bank) {
    if (k.size() != size || k.channels() != bank.front().channels()) {
      throw DomainError("all kernels in a bank must share one shape");
    }
  }
  if (bank.front().channels() != c) {
    throw DomainError("kernel channels (" + std::to_string(bank.front().channels()) +
                      ") do not match image channels (" + std::to_string(c) + ")");
  }

  const int m = static_cast<int>(bank.size());
  const std::size_t d = static_cast<std::size_t>(size) * size * c;

  // Weights transposed to [tap][kernel] so the inner loop runs over kernels
  // and each kernel's sum is still accumulated in tap order.
  std::vector<double> transposed(d * m);
  for (int b = 0; b < m; ++b) {
    auto w = bank[b].weights();
    for (std::size_t t = 0; t < d; ++t) transposed[t * m + b] = w[t];
  }

  ImageTensor out(image.height(), image.width(), m);
  std::vector<float> patch(d);
  std::vector<double> acc(m);
  const int half = (size - 1) / 2;
  for (int row = 0; row < image.height(); ++row) {
    for (int col = 0; col < image.width(); ++col) {
      extract_patch_into(image, row, col, size, dilation, patch);
      std::fill(acc.begin(), acc.end(), 0.0);
      // Skip whole padding taps at the border; their contribution is zero.
      const bool interior = row - half * dilation >= 0 && col - half * dilation >= 0 &&
                            row + half * dilation < image.height() &&
                            col + half * dilation < image.width();
      for (std::size_t t = 0; t < d; ++t) {
        const double p = patch[t];
        if (!interior && p == 0.0) continue;
        const double* w = transposed.data() + t * m;
        for (int b = 0; b < m; ++b) acc[b] += p * w[b];
      }
      float* dst = out.pixel(row, col).data();
      for (int b = 0; b < m; ++b) dst[b] = static_cast<float>(acc[b]);
    }
  }
  return out;
}

ImageTensor relu(const ImageTensor& image) {
  ImageTensor out = image;
  for (float& v : out.data()) v = std::max(v, 0.0f);
  return out;
}

ImageTensor pool(const ImageTensor& image, PoolKind kind, int window) {
  if (window < 1) throw DomainError("pooling window must be >= 1");
  if (window == 1) return image;
  const int h = image.height();
  const int w = image.width();
  const int c = image.channels();
  const auto [before, after] = pool_window_extent(window);

  // Rectangular windows clipped to the image are separable for both max and
  // sum, and the valid-sample count factors into row count times column count.
  std::vector<double> horizontal(image.size());
  for (int r = 0; r < h; ++r) {
    for (int col = 0; col < w; ++col) {
      const int c0 = std::max(0, col - before);
      const int c1 = std::min(w - 1, col + after);
      for (int ch = 0; ch < c; ++ch) {
        double v = kind == PoolKind::kMax ? -std::numeric_limits<double>::infinity() : 0.0;
        for (int x = c0; x <= c1; ++x) {
          const double s = image.at(r, x, ch);
          v = kind == PoolKind::kMax ? std::max(v, s) : v + s;
        }
        horizontal[image.index(r, col, ch)] = v;
      }
    }
  }

  ImageTensor out(h, w, c);
  for (int r = 0; r < h; ++r) {
    const int r0 = std::max(0, r - before);
    const int r1 = std::min(h - 1, r + after);
    for (int col = 0; col < w; ++col) {
      const int c0 = std::max(0, col - before);
      const int c1 = std::min(w - 1, col + after);
      const double count = static_cast<double>(r1 - r0 + 1) * (c1 - c0 + 1);
      for (int ch = 0; ch < c; ++ch) {
        double v = kind == PoolKind::kMax ? -std::numeric_limits<double>::infinity() : 0.0;
        for (int y = r0; y <= r1; ++y) {
          const double s = horizontal[image.index(y, col, ch)];
          v = kind == PoolKind::kMax ? std::max(v, s) : v + s;
        }
        out.at(r, col, ch) = static_cast<float>(kind == PoolKind::kMax ? v : v / count);
      }
    }
  }
  return out;
}

ImageTensor minmax_normalize_channels(const ImageTensor& image) {
  const int c = image.channels();
  const std::size_t n = image.pixel_count();
  auto src = image.data();
  std::vector<float> lo(c, std::numeric_limits<float>::max());
  std::vector<float> hi(c, std::numeric_limits<float>::lowest());
  for (std::size_t p = 0; p < n; ++p) {
    for (int ch = 0; ch < c; ++ch) {
      const float v = src[p * c + ch];
      lo[ch] = std::min(lo[ch], v);
      hi[ch] = std::max(hi[ch], v);
    }
  }
  ImageTensor out(image.height(), image.width(), c);
  auto dst = out.data();
  for (std::size_t p = 0; p < n; ++p) {
    for (int ch = 0; ch < c; ++ch) {
      const double range = static_cast<double>(hi[ch]) - lo[ch];
      dst[p * c + ch] =
          range > 0.0 ? static_cast<float>((static_cast<double>(src[p * c + ch]) - lo[ch]) / range)
                      : 0.0f;
    }
  }
  return out;
}

}  // namespace flim
