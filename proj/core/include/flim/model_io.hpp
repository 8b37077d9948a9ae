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
#include <filesystem>
#include <span>
#include <vector>

#include "flim/model.hpp"

namespace flim {

inline constexpr std::uint32_t kModelFormatVersion = 1;
inline constexpr std::size_t kWeightsHeaderBytes = 16;
inline constexpr std::size_t kWeightsTrailerBytes = 4;

/// weights.bin layout:
///   "FLIM" | version u32 | kernel count u32 | reserved u32
///   float32 weights of every bank kernel, layer by layer,
///   each kernel as [row][col][channel]
///   CRC32 of everything before it
/// All integers and floats little-endian.
std::vector<std::uint8_t> encode_weights(const FlimModel& model);

/// Splits a weights file into per-layer float blocks of the given sizes.
std::vector<std::vector<float>> decode_weights(std::span<const std::uint8_t> bytes,
                                               std::span<const std::size_t> floats_per_layer);

/// Writes dir/meta.json and dir/weights.bin.
void save_model(const FlimModel& model, const std::filesystem::path& dir);

/// Throws FormatError: kVersionMismatch, kChecksum, kTruncated, kMalformed
/// or kIo.
FlimModel load_model(const std::filesystem::path& dir);

std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept;

}  // namespace flim
