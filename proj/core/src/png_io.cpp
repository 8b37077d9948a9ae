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
#include "flim/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "flim/error.hpp"

namespace flim {
namespace {

// Releases a simplified-API control structure on scope exit.
struct ImageGuard {
  png_image* image;
  ~ImageGuard() { png_image_free(image); }
};

png_image make_control() {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  return image;
}

PngInfo info_from(const png_image& image) {
  PngInfo info;
  info.height = static_cast<int>(image.height);
  info.width = static_cast<int>(image.width);
  info.channels = (image.format & PNG_FORMAT_FLAG_COLOR) != 0 ? 3 : 1;
  return info;
}

}  // namespace

bool is_png(std::span<const std::uint8_t> bytes) noexcept {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

ImageTensor decode_png(std::span<const std::uint8_t> bytes) {
  if (!is_png(bytes)) throw FormatError(FormatCode::kMalformed, "not a PNG stream");
  png_image image = make_control();
  ImageGuard guard{&image};
  if (png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()) == 0) {
    throw FormatError(FormatCode::kMalformed, std::string("PNG: ") + image.message);
  }
  const PngInfo info = info_from(image);
  image.format = info.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> raw(PNG_IMAGE_SIZE(image));
  // Alpha, if present, is composited onto black.
  if (png_image_finish_read(&image, nullptr, raw.data(), 0, nullptr) == 0) {
    throw FormatError(FormatCode::kMalformed, std::string("PNG: ") + image.message);
  }
  std::vector<float> values(raw.size());
  std::transform(raw.begin(), raw.end(), values.begin(),
                 [](png_byte v) { return static_cast<float>(v) / 255.0f; });
  return ImageTensor(info.height, info.width, info.channels, std::move(values));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError(FormatCode::kIo, "short write to " + path.string());
}

ImageTensor load_png(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_png(bytes);
  } catch (const FormatError& e) {
    throw FormatError(e.code(), path.string() + ": " + e.what());
  }
}

PngInfo read_png_info(const std::filesystem::path& path) {
  png_image image = make_control();
  ImageGuard guard{&image};
  if (png_image_begin_read_from_file(&image, path.c_str()) == 0) {
    throw FormatError(FormatCode::kMalformed, path.string() + ": PNG: " + image.message);
  }
  return info_from(image);
}

std::vector<std::uint8_t> encode_png(const ImageTensor& image) {
  const int c = image.channels();
  if (c != 1 && c != 3) throw DomainError("PNG export supports 1 or 3 channels");
  std::vector<png_byte> raw(image.size());
  auto src = image.data();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = static_cast<png_byte>(std::lround(255.0f * std::clamp(src[i], 0.0f, 1.0f)));
  }

  png_image control = make_control();
  ImageGuard guard{&control};
  control.width = static_cast<png_uint_32>(image.width());
  control.height = static_cast<png_uint_32>(image.height());
  control.format = c == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

  png_alloc_size_t size = 0;
  if (png_image_write_to_memory(&control, nullptr, &size, 0, raw.data(), 0, nullptr) == 0) {
    throw FormatError(FormatCode::kIo, std::string("PNG: ") + control.message);
  }
  std::vector<std::uint8_t> out(size);
  if (png_image_write_to_memory(&control, out.data(), &size, 0, raw.data(), 0, nullptr) == 0) {
    throw FormatError(FormatCode::kIo, std::string("PNG: ") + control.message);
  }
  out.resize(size);
  return out;
}

void save_png(const ImageTensor& image, const std::filesystem::path& path) {
  write_file_bytes(path, encode_png(image));
}

}  // namespace flim
