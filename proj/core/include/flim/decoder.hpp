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

#include <cstdint>
#include <span>
#include <vector>

#include "flim/image.hpp"
#include "flim/model.hpp"

namespace flim {

/// Global statistics of min-max normalized activation channels.
struct ChannelStats {
  std::vector<double> mean;    // per channel, in [0, 1]
  std::vector<double> stddev;  // per channel, population
  double mean_of_means = 0.0;
  double std_of_means = 0.0;   // population std over the channel means

  int channels() const noexcept { return static_cast<int>(mean.size()); }
};

/// Point-wise decoder weights, each in {-1, 0, +1}.
struct WeightVector {
  std::vector<std::int8_t> alpha;

  int size() const noexcept { return static_cast<int>(alpha.size()); }
  WeightVector negated() const;
  bool operator==(const WeightVector&) const = default;
};

/// Single-channel object saliency map.
class SaliencyMap {
 public:
  SaliencyMap() = default;
  explicit SaliencyMap(ImageTensor values);

  int height() const noexcept { return values_.height(); }
  int width() const noexcept { return values_.width(); }
  float at(int row, int col) const noexcept { return values_.at(row, col); }
  std::span<const float> data() const noexcept { return values_.data(); }
  const ImageTensor& tensor() const noexcept { return values_; }

 private:
  ImageTensor values_;
};

inline constexpr double kParasiteThreshold = 0.5;

struct NeutralBand {
  double low = 0.25;
  double high = 0.75;
  double max_stddev = 0.1;
};

ChannelStats channel_stats(const ImageTensor& activations);

/// +1 when the channel mean is <= threshold, otherwise -1.
WeightVector adapt_weights_hp(const ChannelStats& stats, double threshold = kParasiteThreshold);

/// +1 at or below mean_of_means - std_of_means, -1 at or above
/// mean_of_means + std_of_means, 0 in between. Channels whose mean lies in the
/// neutral band with a small spread are then forced to 0.
WeightVector adapt_weights_hs(const ChannelStats& stats, const NeutralBand& neutral = {});

WeightVector adapt_weights(const ChannelStats& stats, Heuristic heuristic);

/// relu(sum_b alpha_b * A_b) before the final rescaling.
ImageTensor combine_channels(const ImageTensor& activations, const WeightVector& alpha);

/// combine_channels followed by min-max scaling to [0, 1].
SaliencyMap decode(const ImageTensor& activations, const WeightVector& alpha);

/// Intermediate products of decoding one image at one layer.
struct DecodeTrace {
  ImageTensor activations;  // min-max normalized
  ChannelStats stats;
  WeightVector alpha;
};

/// Runs the encoder up to `layer` (1-based), normalizes the activations and
/// decodes them with weights adapted to this image.
SaliencyMap decode_image(const ImageTensor& image, const FlimModel& model, int layer,
                         DecodeTrace* trace = nullptr);

/// Same as decode_image but starting from raw encoder output.
SaliencyMap decode_activations(const ImageTensor& encoder_output, Heuristic heuristic,
                               DecodeTrace* trace = nullptr);

}  // namespace flim
