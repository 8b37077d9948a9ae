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

#include <fstream>

#include "flim/model_io.hpp"
#include "flim/pipeline.hpp"
#include "flim/synthetic.hpp"
#include "oracles.hpp"

namespace flim {
namespace {

const std::filesystem::path kConfigs = FLIM_CONFIG_DIR;

TEST(Arch, ShippedConfigsParse) {
  const ArchConfig parasite = load_arch(kConfigs / "arch_parasite.json");
  EXPECT_EQ(parasite.heuristic, Heuristic::kParasite);
  ASSERT_EQ(parasite.layers.size(), 2u);
  EXPECT_EQ(parasite.layers[1].spec.dilation, 2);
  EXPECT_EQ(parasite.layers[1].spec.kernels_total, 64);
  EXPECT_FALSE(parasite.layers[0].selection.has_value());
  const ArchConfig ship = load_arch(kConfigs / "arch_ship.json");
  EXPECT_EQ(ship.heuristic, Heuristic::kShip);
  EXPECT_EQ(ship.layers[0].spec.kernels_per_marker, 1);
  EXPECT_EQ(ship.postproc.box_expand_fraction, 0.0);
}

TEST(Arch, JsonRoundTrip) {
  ArchConfig arch;
  arch.heuristic = Heuristic::kShip;
  arch.postproc = {0.2, 50};
  arch.epsilon = 1e-3f;
  arch.layers.push_back({LayerSpec{5, 1, 2, 8, {PoolKind::kAverage, 2}}, std::vector<int>{0, 3}});
  arch.layers.push_back({LayerSpec{}, std::nullopt});
  const ArchConfig back = arch_from_json(arch_to_json(arch));
  EXPECT_EQ(back.heuristic, arch.heuristic);
  EXPECT_EQ(back.postproc, arch.postproc);
  EXPECT_EQ(back.epsilon, arch.epsilon);
  ASSERT_EQ(back.layers.size(), 2u);
  EXPECT_EQ(back.layers[0].spec, arch.layers[0].spec);
  EXPECT_EQ(back.layers[0].selection, arch.layers[0].selection);
  EXPECT_FALSE(back.layers[1].selection.has_value());
}

TEST(Arch, Errors) {
  EXPECT_THROW(arch_from_json(nlohmann::json{{"layers", nlohmann::json::array()}}), DomainError);
  EXPECT_THROW(arch_from_json(nlohmann::json{{"layers", {{{"kernel_size", 4}}}}}), DomainError);
  testing::TempDir dir;
  try {
    load_arch(dir.path() / "missing.json");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.code(), FormatCode::kIo);
  }
  std::ofstream(dir.path() / "bad.json") << "{ not json";
  try {
    load_arch(dir.path() / "bad.json");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.code(), FormatCode::kMalformed);
  }
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    write_synthetic_project(dir_.path(), make_synthetic_dataset(5, 3), 2);
    data_ = load_training_set(load_project(dir_.path()));
  }
  testing::TempDir dir_;
  TrainingSet data_;
};

TEST_F(PipelineTest, TrainingSetHoldsMarkedImagesOnly) {
  ASSERT_EQ(data_.ids, (std::vector<std::string>{"img_00", "img_01"}));
  EXPECT_EQ(data_.images.size(), 2u);
  EXPECT_EQ(data_.markers[1].image_id, "img_01");
}

TEST_F(PipelineTest, TrainingIsDeterministic) {
  const ArchConfig arch = load_arch(kConfigs / "arch_parasite.json");
  const FlimModel a = train_model(data_, arch, 11);
  const FlimModel b = train_model(data_, arch, 11);
  EXPECT_EQ(a, b);
  EXPECT_EQ(encode_weights(a), encode_weights(b));
  EXPECT_EQ(a.depth(), 2);
  EXPECT_EQ(a.layer(1).input_channels(), a.layer(0).output_channels());
  const FlimModel c = train_model(data_, arch, 12);
  EXPECT_NE(encode_weights(a), encode_weights(c));
}

TEST_F(PipelineTest, SelectionIsApplied) {
  ArchConfig arch = load_arch(kConfigs / "arch_parasite.json");
  arch.layers[0].selection = std::vector<int>{4, 1, 1};
  const FlimModel model = train_model(data_, arch, 5);
  EXPECT_EQ(model.layer(0).selected, (std::vector<int>{1, 4}));
  EXPECT_EQ(model.layer(1).input_channels(), 2);
  const FlimModel all = train_model(data_, arch, 5, false);
  EXPECT_EQ(all.layer(0).output_channels(), static_cast<int>(all.layer(0).bank.size()));
}

TEST_F(PipelineTest, ForwardMatchesRunLayer) {
  const FlimModel model = train_model(data_, load_arch(kConfigs / "arch_parasite.json"), 2);
  const auto out = forward_layer(data_.images, model.layer(0));
  ASSERT_EQ(out.size(), data_.images.size());
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], run_layer(data_.images[i], model.layer(0)));
}

}  // namespace
}  // namespace flim
