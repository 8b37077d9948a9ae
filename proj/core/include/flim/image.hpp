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

#include <cstddef>
#include <span>
#include <vector>

namespace flim {

/// Dense h x w x c raster of 32-bit reals stored row-major as
/// [row][col][channel]. Every layer consumes and produces one of these.
class ImageTensor {
 public:
  ImageTensor() = default;
  ImageTensor(int height, int width, int channels, float fill = 0.0f);
  ImageTensor(int height, int width, int channels, std::vector<float> data);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool contains(int row, int col) const noexcept {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }

  std::size_t index(int row, int col, int channel = 0) const noexcept {
    return (static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(col)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(channel);
  }
  float at(int row, int col, int channel = 0) const noexcept { return data_[index(row, col, channel)]; }
  float& at(int row, int col, int channel = 0) noexcept { return data_[index(row, col, channel)]; }

  std::span<const float> pixel(int row, int col) const noexcept {
    return {data_.data() + index(row, col), static_cast<std::size_t>(channels_)};
  }
  std::span<float> pixel(int row, int col) noexcept {
    return {data_.data() + index(row, col), static_cast<std::size_t>(channels_)};
  }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  /// Copies channel `channel` into a new single-channel tensor.
  ImageTensor channel(int channel) const;

  bool operator==(const ImageTensor&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

/// Flattened k x k x c neighbourhood around a pixel, sampled with dilation.
struct Patch {
  int size = 0;
  int channels = 0;
  int dilation = 1;
  std::vector<float> values;  // [row][col][channel]

  std::size_t length() const noexcept { return values.size(); }
};

/// A convolution filter with the same layout as a Patch.
class Kernel {
 public:
  Kernel() = default;
  Kernel(int size, int channels, std::vector<float> weights);

  int size() const noexcept { return size_; }
  int channels() const noexcept { return channels_; }
  std::span<const float> weights() const noexcept { return weights_; }
  std::size_t length() const noexcept { return weights_.size(); }
  double norm() const noexcept { return norm_; }

  /// Returns a copy scaled to unit Euclidean norm. Throws DomainError for a
  /// zero kernel.
  Kernel normalized() const;

  bool operator==(const Kernel& other) const {
    return size_ == other.size_ && channels_ == other.channels_ && weights_ == other.weights_;
  }

 private:
  int size_ = 0;
  int channels_ = 0;
  std::vector<float> weights_;
  double norm_ = 0.0;
};

enum class PoolKind { kMax, kAverage };

const char* to_string(PoolKind kind);
PoolKind pool_kind_from_string(const char* name);

Patch extract_patch(const ImageTensor& image, int row, int col, int size, int dilation);

/// Writes the patch values into `out` (length size*size*channels) without
/// allocating. Same sampling contract as extract_patch.
void extract_patch_into(const ImageTensor& image, int row, int col, int size, int dilation,
                        std::span<float> out);

/// Zero-padded, stride-free convolution; output channel b holds the dot
/// product of every dilated patch with kernel b.
ImageTensor convolve(const ImageTensor& image, std::span<const Kernel> bank, int dilation);

ImageTensor relu(const ImageTensor& image);

/// Stride-free pooling over an s x s window. Samples outside the image are
/// ignored; the average divides by the number of in-image samples.
ImageTensor pool(const ImageTensor& image, PoolKind kind, int window);

/// Maps each channel to [0, 1] by (v - min) / (max - min). Constant channels
/// become all zero.
ImageTensor minmax_normalize_channels(const ImageTensor& image);

/// Offsets covered by a pooling window of the given size: [-(s-1)/2, s/2].
struct WindowExtent {
  int before;
  int after;
};
WindowExtent pool_window_extent(int window) noexcept;

}  // namespace flim
