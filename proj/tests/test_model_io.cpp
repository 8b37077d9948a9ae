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
#include <gtest/gtest.h>

#include <cstring>
#include <limits>

#include "flim/detection.hpp"
#include "flim/model_io.hpp"
#include "flim/pipeline.hpp"
#include "flim/png_io.hpp"
#include "flim/serialization.hpp"
#include "flim/synthetic.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace flim {
namespace {

using testing::TempDir;

FlimModel two_kernel_model() {
  Layer l;
  l.spec.kernel_size = 3;
  l.norm = {{0.25f, 0.5f, 0.75f}, {0.1f, 0.2f, 0.3f}, 1e-4f};
  std::vector<float> a(27), b(27);
  for (int i = 0; i < 27; ++i) {
    a[i] = 0.01f * static_cast<float>(i) - 0.1f;
    b[i] = std::ldexp(1.0f, -i);
  }
  b[0] = -0.0f;
  b[1] = std::numeric_limits<float>::denorm_min();
  l.bank.kernels = {Kernel(3, 3, a), Kernel(3, 3, b)};
  l.bank.provenance = {{"img", 1, 3}, {"img", 2, 2}};
  l.selected = {0, 1};
  FlimModel m(Heuristic::kShip, {0.0, 50});
  m.append_layer(l);
  return m;
}

bool bit_identical(const FlimModel& a, const FlimModel& b) {
  if (a.depth() != b.depth()) return false;
  for (int l = 0; l < a.depth(); ++l) {
    const auto& ka = a.layer(l).bank.kernels;
    const auto& kb = b.layer(l).bank.kernels;
    if (ka.size() != kb.size()) return false;
    for (std::size_t i = 0; i < ka.size(); ++i) {
      if (ka[i].length() != kb[i].length()) return false;
      if (std::memcmp(ka[i].weights().data(), kb[i].weights().data(), 4 * ka[i].length()) != 0) return false;
    }
    const NormStats& na = a.layer(l).norm;
    const NormStats& nb = b.layer(l).norm;
    if (std::memcmp(na.mean.data(), nb.mean.data(), 4 * na.mean.size()) != 0) return false;
    if (std::memcmp(na.stddev.data(), nb.stddev.data(), 4 * na.stddev.size()) != 0) return false;
    if (std::memcmp(&na.epsilon, &nb.epsilon, 4) != 0) return false;
  }
  return true;
}

TEST(ModelIo, WeightsSizeArithmetic) {
  const auto bytes = encode_weights(two_kernel_model());
  EXPECT_EQ(bytes.size() - kWeightsHeaderBytes - kWeightsTrailerBytes, 2u * 27u * 4u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "FLIM");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 2);
}

TEST(ModelIo, WeightsAreLittleEndianRowMajor) {
  const FlimModel m = two_kernel_model();
  const auto bytes = encode_weights(m);
  float first;
  std::uint32_t raw = bytes[16] | bytes[17] << 8 | bytes[18] << 16 | static_cast<std::uint32_t>(bytes[19]) << 24;
  std::memcpy(&first, &raw, 4);
  EXPECT_EQ(first, m.layer(0).bank.kernels[0].weights()[0]);
}

TEST(ModelIo, RoundTripIsBitExact) {
  TempDir dir;
  FlimModel m = two_kernel_model();
  m.freeze();
  save_model(m, dir.path());
  const FlimModel back = load_model(dir.path());
  EXPECT_TRUE(bit_identical(m, back));
  EXPECT_EQ(back, m);
  EXPECT_TRUE(back.frozen());
  EXPECT_EQ(back.heuristic(), Heuristic::kShip);
  EXPECT_EQ(back.postproc().min_area_px, 50);
  EXPECT_EQ(back.layer(0).bank.provenance[1].marker_id, 2);
  EXPECT_TRUE(std::signbit(back.layer(0).bank.kernels[1].weights()[0]));
}

TEST(ModelIo, ChecksumFailure) {
  TempDir dir;
  save_model(two_kernel_model(), dir.path());
  auto bytes = read_file_bytes(dir.path() / "weights.bin");
  bytes[40] ^= 0x01;
  write_file_bytes(dir.path() / "weights.bin", bytes);
  try {
    load_model(dir.path());
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.code(), FormatCode::kChecksum);
  }
}

TEST(ModelIo, TruncatedWeights) {
  TempDir dir;
  save_model(two_kernel_model(), dir.path());
  auto bytes = read_file_bytes(dir.path() / "weights.bin");
  bytes.resize(bytes.size() - 10);
  write_file_bytes(dir.path() / "weights.bin", bytes);
  try {
    load_model(dir.path());
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.code(), FormatCode::kTruncated);
  }
}

TEST(ModelIo, VersionMismatch) {
  TempDir dir;
  save_model(two_kernel_model(), dir.path());
  auto bytes = read_file_bytes(dir.path() / "weights.bin");
  bytes[4] = 9;
  write_file_bytes(dir.path() / "weights.bin", bytes);
  try {
    load_model(dir.path());
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.code(), FormatCode::kVersionMismatch);
  }

  save_model(two_kernel_model(), dir.path());
  Json meta = read_json_file(dir.path() / "meta.json");
  meta["version"] = 2;
  write_json_file(dir.path() / "meta.json", meta);
  try {
    load_model(dir.path());
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.code(), FormatCode::kVersionMismatch);
  }
}

TEST(ModelIo, MissingModel) {
  TempDir dir;
  try {
    load_model(dir.path() / "nothing");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.code(), FormatCode::kIo);
  }
}

TEST(ModelIo, SaveLoadDetectIsBitExact) {
  const auto samples = make_synthetic_dataset(4, 3);
  TrainingSet data;
  for (int i = 0; i < 2; ++i) {
    data.ids.push_back(samples[i].id);
    data.images.push_back(samples[i].image);
    data.markers.push_back(samples[i].markers);
  }
  ArchConfig arch;
  arch.layers.push_back({LayerSpec{}, std::nullopt});
  const FlimModel model = train_model(data, arch, 11);
  TempDir dir;
  save_model(model, dir.path());
  const FlimModel back = load_model(dir.path());
  for (const SyntheticSample& s : samples) {
    EXPECT_EQ(detect_objects(s.image, model, s.id), detect_objects(s.image, back, s.id));
  }
}

TEST(ModelIo, Crc32KnownValue) {
  const std::string text = "123456789";
  const std::vector<std::uint8_t> bytes(text.begin(), text.end());
  EXPECT_EQ(crc32(bytes), 0xCBF43926u);
}

}  // namespace
}  // namespace flim
