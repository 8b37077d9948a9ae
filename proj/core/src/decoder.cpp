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
#include "flim/decoder.hpp"

#include <cmath>

#include "flim/encoder.hpp"
#include "flim/error.hpp"

namespace flim {

WeightVector WeightVector::negated() const {
  WeightVector out = *this;
  for (auto& a : out.alpha) a = static_cast<std::int8_t>(-a);
  return out;
}

SaliencyMap::SaliencyMap(ImageTensor values) : values_(std::move(values)) {
  if (values_.channels() != 1) throw DomainError("saliency map must have exactly one channel");
}

ChannelStats channel_stats(const ImageTensor& activations) {
  const int c = activations.channels();
  const std::size_t n = activations.pixel_count();
  auto data = activations.data();

  ChannelStats stats;
  stats.mean.assign(c, 0.0);
  stats.stddev.assign(c, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    for (int b = 0; b < c; ++b) stats.mean[b] += data[p * c + b];
  }
  for (int b = 0; b < c; ++b) stats.mean[b] /= static_cast<double>(n);
  for (std::size_t p = 0; p < n; ++p) {
    for (int b = 0; b < c; ++b) {
      const double d = data[p * c + b] - stats.mean[b];
      stats.stddev[b] += d * d;
    }
  }
  for (int b = 0; b < c; ++b) stats.stddev[b] = std::sqrt(stats.stddev[b] / static_cast<double>(n));

  double sum = 0.0;
  for (double m : stats.mean) sum += m;
  stats.mean_of_means = sum / c;
  double var = 0.0;
  for (double m : stats.mean) var += (m - stats.mean_of_means) * (m - stats.mean_of_means);
  stats.std_of_means = std::sqrt(var / c);
  return stats;
}

WeightVector adapt_weights_hp(const ChannelStats& stats, double threshold) {
  WeightVector w;
  w.alpha.reserve(stats.mean.size());
  for (double m : stats.mean) w.alpha.push_back(m <= threshold ? 1 : -1);
  return w;
}

WeightVector adapt_weights_hs(const ChannelStats& stats, const NeutralBand& neutral) {
  const double low = stats.mean_of_means - stats.std_of_means;
  const double high = stats.mean_of_means + stats.std_of_means;
  WeightVector w;
  w.alpha.reserve(stats.mean.size());
  for (std::size_t b = 0; b < stats.mean.size(); ++b) {
    const double m = stats.mean[b];
    std::int8_t a = 0;
    if (m <= low) {
      a = 1;
    } else if (m >= high) {
      a = -1;
    }
    if (m >= neutral.low && m <= neutral.high && stats.stddev[b] < neutral.max_stddev) a = 0;
    w.alpha.push_back(a);
  }
  return w;
}

WeightVector adapt_weights(const ChannelStats& stats, Heuristic heuristic) {
  return heuristic == Heuristic::kParasite ? adapt_weights_hp(stats) : adapt_weights_hs(stats);
}

ImageTensor combine_channels(const ImageTensor& activations, const WeightVector& alpha) {
  const int c = activations.channels();
  if (alpha.size() != c) {
    throw DomainError("weight vector has " + std::to_string(alpha.size()) + " entries for " +
                      std::to_string(c) + " channels");
  }
  ImageTensor out(activations.height(), activations.width(), 1);
  auto src = activations.data();
  auto dst = out.data();
  for (std::size_t p = 0; p < activations.pixel_count(); ++p) {
    double s = 0.0;
    for (int b = 0; b < c; ++b) s += alpha.alpha[b] * static_cast<double>(src[p * c + b]);
    dst[p] = static_cast<float>(std::max(s, 0.0));
  }
  return out;
}

SaliencyMap decode(const ImageTensor& activations, const WeightVector& alpha) {
  return SaliencyMap(minmax_normalize_channels(combine_channels(activations, alpha)));
}

SaliencyMap decode_activations(const ImageTensor& encoder_output, Heuristic heuristic,
                               DecodeTrace* trace) {
  ImageTensor normalized = minmax_normalize_channels(encoder_output);
  ChannelStats stats = channel_stats(normalized);
  WeightVector alpha = adapt_weights(stats, heuristic);
  SaliencyMap map = decode(normalized, alpha);
  if (trace != nullptr) {
    trace->activations = std::move(normalized);
    trace->stats = std::move(stats);
    trace->alpha = std::move(alpha);
  }
  return map;
}

SaliencyMap decode_image(const ImageTensor& image, const FlimModel& model, int layer,
                         DecodeTrace* trace) {
  return decode_activations(run_encoder(image, model, layer), model.heuristic(), trace);
}

}  // namespace flim
