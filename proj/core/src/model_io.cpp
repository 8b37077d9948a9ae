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
#include "flim/model_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <numeric>

#include "flim/png_io.hpp"
#include "flim/serialization.hpp"

namespace fs = std::filesystem;

namespace flim {
namespace {

constexpr char kMagic[4] = {'F', 'L', 'I', 'M'};
constexpr const char* kFormatName = "flim-model";

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

Json norm_to_json(const NormStats& n) {
  return Json{{"mean", n.mean}, {"stddev", n.stddev}, {"epsilon", n.epsilon}};
}

NormStats norm_from_json(const Json& j) {
  NormStats n;
  n.mean = j.at("mean").get<std::vector<float>>();
  n.stddev = j.at("stddev").get<std::vector<float>>();
  n.epsilon = j.at("epsilon").get<float>();
  if (n.mean.size() != n.stddev.size() || n.mean.empty()) {
    throw FormatError(FormatCode::kMalformed, "norm stats have inconsistent channel counts");
  }
  return n;
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  const std::uint8_t* p = bytes.data();
  std::size_t left = bytes.size();
  while (left > 0) {
    const uInt chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    crc = ::crc32(crc, p, chunk);
    p += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode_weights(const FlimModel& model) {
  std::size_t kernels = 0;
  std::size_t floats = 0;
  for (const Layer& layer : model.layers()) {
    kernels += layer.bank.size();
    for (const Kernel& k : layer.bank.kernels) floats += k.length();
  }
  std::vector<std::uint8_t> out;
  out.reserve(kWeightsHeaderBytes + 4 * floats + kWeightsTrailerBytes);
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, kModelFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(kernels));
  put_u32(out, 0);
  for (const Layer& layer : model.layers()) {
    for (const Kernel& k : layer.bank.kernels) {
      for (float w : k.weights()) put_u32(out, std::bit_cast<std::uint32_t>(w));
    }
  }
  put_u32(out, crc32(out));
  return out;
}

std::vector<std::vector<float>> decode_weights(std::span<const std::uint8_t> bytes,
                                               std::span<const std::size_t> floats_per_layer) {
  if (bytes.size() < kWeightsHeaderBytes + kWeightsTrailerBytes) {
    throw FormatError(FormatCode::kTruncated, "weights file shorter than its header");
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError(FormatCode::kMalformed, "weights file has no FLIM magic");
  }
  const std::uint32_t version = get_u32(bytes.data() + 4);
  if (version != kModelFormatVersion) {
    throw FormatError(FormatCode::kVersionMismatch,
                      "weights version " + std::to_string(version) + ", expected " +
                          std::to_string(kModelFormatVersion));
  }
  const std::size_t total = std::accumulate(floats_per_layer.begin(), floats_per_layer.end(), std::size_t{0});
  const std::size_t expected = kWeightsHeaderBytes + 4 * total + kWeightsTrailerBytes;
  if (bytes.size() != expected) {
    throw FormatError(bytes.size() < expected ? FormatCode::kTruncated : FormatCode::kMalformed,
                      "weights file is " + std::to_string(bytes.size()) + " bytes, expected " +
                          std::to_string(expected));
  }
  const std::size_t body = bytes.size() - kWeightsTrailerBytes;
  if (crc32(bytes.first(body)) != get_u32(bytes.data() + body)) {
    throw FormatError(FormatCode::kChecksum, "weights checksum mismatch");
  }
  std::vector<std::vector<float>> layers;
  const std::uint8_t* p = bytes.data() + kWeightsHeaderBytes;
  for (std::size_t n : floats_per_layer) {
    std::vector<float>& values = layers.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i, p += 4) values[i] = std::bit_cast<float>(get_u32(p));
  }
  return layers;
}

void save_model(const FlimModel& model, const fs::path& dir) {
  model.validate();
  fs::create_directories(dir);
  const std::vector<std::uint8_t> weights = encode_weights(model);

  Json layers = Json::array();
  std::size_t kernel_count = 0;
  for (const Layer& layer : model.layers()) {
    layers.push_back(Json{{"spec", layer.spec},
                          {"input_channels", layer.input_channels()},
                          {"norm", norm_to_json(layer.norm)},
                          {"kernel_count", layer.bank.size()},
                          {"selected", layer.selected},
                          {"provenance", layer.bank.provenance}});
    kernel_count += layer.bank.size();
  }
  const Json meta{{"format", kFormatName},
                  {"version", kModelFormatVersion},
                  {"heuristic", to_string(model.heuristic())},
                  {"postproc", model.postproc()},
                  {"frozen", model.frozen()},
                  {"weights",
                   {{"file", "weights.bin"},
                    {"kernel_count", kernel_count},
                    {"bytes", weights.size()},
                    {"crc32", get_u32(weights.data() + weights.size() - 4)}}},
                  {"layers", layers}};
  write_file_bytes(dir / "weights.bin", weights);
  write_json_file(dir / "meta.json", meta);
}

FlimModel load_model(const fs::path& dir) {
  if (!fs::exists(dir / "meta.json")) {
    throw FormatError(FormatCode::kIo, "no model at " + dir.string());
  }
  const Json meta = read_json_file(dir / "meta.json");
  try {
    if (meta.at("format").get<std::string>() != kFormatName) {
      throw FormatError(FormatCode::kMalformed, "meta.json is not a FLIM model");
    }
    const auto version = meta.at("version").get<std::uint32_t>();
    if (version != kModelFormatVersion) {
      throw FormatError(FormatCode::kVersionMismatch,
                        "model version " + std::to_string(version) + ", expected " +
                            std::to_string(kModelFormatVersion));
    }

    struct Pending {
      LayerSpec spec;
      NormStats norm;
      std::size_t kernels;
      std::vector<int> selected;
      std::vector<KernelOrigin> provenance;
    };
    std::vector<Pending> pending;
    std::vector<std::size_t> floats;
    for (const Json& j : meta.at("layers")) {
      Pending p{j.at("spec").get<LayerSpec>(), norm_from_json(j.at("norm")),
                j.at("kernel_count").get<std::size_t>(), j.at("selected").get<std::vector<int>>(),
                j.value("provenance", std::vector<KernelOrigin>{})};
      if (j.at("input_channels").get<int>() != p.norm.channels()) {
        throw FormatError(FormatCode::kMalformed, "layer input channels disagree with norm stats");
      }
      const std::size_t k = static_cast<std::size_t>(p.spec.kernel_size);
      floats.push_back(p.kernels * k * k * static_cast<std::size_t>(p.norm.channels()));
      pending.push_back(std::move(p));
    }

    std::vector<std::uint8_t> bytes;
    try {
      bytes = read_file_bytes(dir / "weights.bin");
    } catch (const std::exception& e) {
      throw FormatError(FormatCode::kIo, e.what());
    }
    const auto blocks = decode_weights(bytes, floats);
    if (get_u32(bytes.data() + 8) != meta.at("weights").at("kernel_count").get<std::uint32_t>()) {
      throw FormatError(FormatCode::kMalformed, "kernel count disagrees with meta.json");
    }

    FlimModel model(heuristic_from_string(meta.at("heuristic").get<std::string>()),
                    meta.at("postproc").get<PostProcessing>());
    for (std::size_t l = 0; l < pending.size(); ++l) {
      Pending& p = pending[l];
      Layer layer;
      layer.spec = p.spec;
      layer.norm = std::move(p.norm);
      const std::size_t per_kernel = p.kernels == 0 ? 0 : blocks[l].size() / p.kernels;
      for (std::size_t i = 0; i < p.kernels; ++i) {
        auto first = blocks[l].begin() + static_cast<std::ptrdiff_t>(i * per_kernel);
        layer.bank.kernels.emplace_back(p.spec.kernel_size, layer.norm.channels(),
                                        std::vector<float>(first, first + static_cast<std::ptrdiff_t>(per_kernel)));
      }
      layer.bank.provenance = std::move(p.provenance);
      layer.bank.provenance.resize(p.kernels);
      layer.selected = std::move(p.selected);
      model.append_layer(std::move(layer));
    }
    model.validate();
    if (meta.value("frozen", false)) model.freeze();
    return model;
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(FormatCode::kMalformed, std::string("meta.json: ") + e.what());
  }
}

}  // namespace flim
