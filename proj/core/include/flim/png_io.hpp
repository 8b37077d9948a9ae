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

#include "flim/image.hpp"

namespace flim {

struct PngInfo {
  int height = 0;
  int width = 0;
  int channels = 0;  // 1 for grayscale, 3 for RGB
};

bool is_png(std::span<const std::uint8_t> bytes) noexcept;

// Decoded as 8-bit gray or RGB and scaled to [0, 1]. Alpha is composited onto
// black; palettes and 16-bit samples are reduced to 8-bit. Throws FormatError.
ImageTensor decode_png(std::span<const std::uint8_t> bytes);
ImageTensor load_png(const std::filesystem::path& path);
PngInfo read_png_info(const std::filesystem::path& path);

// Quantizes values with round(255 * clamp(v, 0, 1)). Accepts 1 or 3 channels.
std::vector<std::uint8_t> encode_png(const ImageTensor& image);
void save_png(const ImageTensor& image, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace flim
