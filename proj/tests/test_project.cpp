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

#include "flim/model.hpp"
#include "flim/png_io.hpp"
#include "flim/project.hpp"
#include "flim/serialization.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace flim {
namespace {

using testing::TempDir;

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream(path) << text;
}

void add_image(const fs::path& root, const std::string& id, int h, int w) {
  fs::create_directories(root / "images");
  save_png(ImageTensor(h, w, 1, 0.5f), root / "images" / (id + ".png"));
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

TEST(Markers, Validation) {
  MarkerSet ok{"a", {{1, {{0, 0}, {1, 1}}}, {2, {{2, 2}}}}};
  EXPECT_TRUE(validate_markers(ok, 3, 3).empty());

  MarkerSet out{"a", {{1, {{999, 0}}}}};
  auto d = validate_markers(out, 100, 100);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, ValidationCode::kOutOfBounds);
  EXPECT_NE(d[0].message.find("marker 1"), std::string::npos);

  MarkerSet dup{"a", {{1, {{0, 0}}}, {1, {{1, 0}}}}};
  EXPECT_EQ(validate_markers(dup, 3, 3).at(0).code, ValidationCode::kDuplicateMarker);
  MarkerSet empty{"a", {{1, {}}}};
  EXPECT_EQ(validate_markers(empty, 3, 3).at(0).code, ValidationCode::kEmptyMarker);
  MarkerSet repeat{"a", {{1, {{0, 0}, {0, 0}}}}};
  EXPECT_EQ(validate_markers(repeat, 3, 3).at(0).code, ValidationCode::kDuplicatePixel);
}

TEST(Markers, Canonicalize) {
  MarkerSet m{"a", {{3, {{2, 1}, {0, 5}}}, {1, {{1, 1}, {1, 0}}}}};
  const MarkerSet c = canonicalize(m);
  EXPECT_EQ(c.markers[0].marker_id, 1);
  EXPECT_EQ(c.markers[0].pixels[0], (Pixel{1, 0}));
  EXPECT_EQ(c.markers[1].pixels[0], (Pixel{0, 5}));
}

TEST(Markers, JsonRoundTrip) {
  const MarkerSet m{"img", {{4, {{1, 2}, {3, 4}}}}};
  const Json j = m;
  EXPECT_EQ(j.at("markers").at(0).at("pixels").at(1), Json::array({3, 4}));
  EXPECT_EQ(j.get<MarkerSet>(), m);
}

TEST(GroundTruth, Validation) {
  GroundTruth gt{"a", {{0, 0, 10, 10, 0}, {5, 5, 5, 9, 0}, {0, 0, 11, 4, 0}}};
  auto d = validate_ground_truth(gt, 10, 10);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].code, ValidationCode::kInvalidBox);
  EXPECT_EQ(d[1].code, ValidationCode::kOutOfBounds);
}

TEST(Project, EmptyProjectHasNoMarkerSets) {
  TempDir dir;
  add_image(dir.path(), "a", 4, 4);
  add_image(dir.path(), "b", 4, 5);
  const Project p = load_project(dir.path());
  EXPECT_EQ(p.images.size(), 2u);
  EXPECT_TRUE(p.markers.empty());
  EXPECT_EQ(p.name, dir.path().filename().string());
  EXPECT_EQ(p.find_image("b")->width, 5);
  EXPECT_TRUE(p.training_image_ids().empty());
}

TEST(Project, RoundTripIsByteIdentical) {
  TempDir dir;
  add_image(dir.path(), "a", 10, 10);
  write_text(dir.path() / "markers" / "a.json",
             R"({"image_id": "a", "markers": [{"marker_id": 2, "pixels": [[3, 3], [1, 2]]},
                 {"marker_id": 1, "pixels": [[0, 0]]}]})");
  write_text(dir.path() / "gt" / "a.json", R"({"image_id": "a", "boxes": [{"x1": 1, "y1": 1, "x2": 4, "y2": 5}]})");
  const Project first = load_project(dir.path());
  EXPECT_EQ(first.training_image_ids(), std::vector<std::string>{"a"});

  TempDir out1, out2;
  save_project(first, out1.path());
  const Project second = load_project(out1.path());
  save_project(second, out2.path());
  for (const char* f : {"project.json", "markers/a.json", "gt/a.json", "images/a.png"}) {
    EXPECT_EQ(slurp(out1.path() / f), slurp(out2.path() / f)) << f;
  }
  EXPECT_EQ(second.markers.at("a"), canonicalize(first.markers.at("a")));
  EXPECT_EQ(second.ground_truth.at("a"), first.ground_truth.at("a"));
}

TEST(Project, SaveInPlaceRemovesStaleFiles) {
  TempDir dir;
  add_image(dir.path(), "a", 4, 4);
  write_text(dir.path() / "markers" / "a.json", R"({"markers": [{"marker_id": 1, "pixels": [[0, 0]]}]})");
  Project p = load_project(dir.path());
  p.markers.clear();
  save_project(p, dir.path());
  EXPECT_FALSE(fs::exists(dir.path() / "markers" / "a.json"));
  EXPECT_TRUE(fs::exists(dir.path() / "images" / "a.png"));
}

TEST(Project, ErrorsAreDistinctAndPerFile) {
  TempDir dir;
  add_image(dir.path(), "a", 100, 100);
  write_text(dir.path() / "markers" / "a.json", R"({"markers": [{"marker_id": 7, "pixels": [[999, 0]]}]})");
  write_text(dir.path() / "markers" / "ghost.json", R"({"markers": [{"marker_id": 1, "pixels": [[0, 0]]}]})");
  write_text(dir.path() / "gt" / "a.json", "{not json");
  try {
    load_project(dir.path());
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    std::map<std::string, ValidationCode> by_file;
    for (const Diagnostic& d : e.diagnostics()) by_file[d.file] = d.code;
    EXPECT_EQ(by_file.at("markers/a.json"), ValidationCode::kOutOfBounds);
    EXPECT_EQ(by_file.at("markers/ghost.json"), ValidationCode::kDanglingImage);
    EXPECT_EQ(by_file.at("gt/a.json"), ValidationCode::kMalformedJson);
    for (const Diagnostic& d : e.diagnostics()) {
      if (d.file == "markers/a.json") EXPECT_NE(d.message.find("marker 7"), std::string::npos);
    }
  }
}

TEST(Project, MissingImagesDirectory) {
  TempDir dir;
  try {
    load_project(dir.path());
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.code(), ValidationCode::kMissingFile);
  }
}

TEST(Project, UnreadableImage) {
  TempDir dir;
  write_text(dir.path() / "images" / "bad.png", "nope");
  try {
    load_project(dir.path());
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.code(), ValidationCode::kUnreadableImage);
  }
}

TEST(Project, SaveMarkersValidates) {
  TempDir dir;
  add_image(dir.path(), "a", 5, 5);
  const Project p = load_project(dir.path());
  EXPECT_THROW(save_markers(p, {"a", {{1, {{5, 0}}}}}), ValidationError);
  EXPECT_THROW(save_markers(p, {"zzz", {{1, {{0, 0}}}}}), ValidationError);
  save_markers(p, {"a", {{1, {{4, 4}, {0, 0}}}}});
  EXPECT_EQ(load_project(dir.path()).markers.at("a").markers[0].pixels[0], (Pixel{0, 0}));
}

TEST(Project, ProjectJsonSettings) {
  TempDir dir;
  add_image(dir.path(), "a", 4, 4);
  write_text(dir.path() / "project.json",
             R"({"name": "ships", "heuristic": "ship", "postproc": {"box_expand_fraction": 0, "min_area_px": 20}})");
  const Project p = load_project(dir.path());
  EXPECT_EQ(p.name, "ships");
  EXPECT_EQ(p.heuristic, Heuristic::kShip);
  EXPECT_EQ(p.postproc.min_area_px, 20);
  EXPECT_EQ(p.postproc.box_expand_fraction, 0.0);
}

Layer make_layer(int k, int c_in, int bank, std::vector<int> selected) {
  Layer l;
  l.spec.kernel_size = k;
  l.norm.mean.assign(c_in, 0.0f);
  l.norm.stddev.assign(c_in, 1.0f);
  for (int i = 0; i < bank; ++i) {
    std::vector<float> w(static_cast<std::size_t>(k) * k * c_in, 0.0f);
    w[static_cast<std::size_t>(i) % w.size()] = 1.0f;
    l.bank.kernels.emplace_back(k, c_in, w);
    l.bank.provenance.push_back({"img", 1, 1});
  }
  l.selected = std::move(selected);
  return l;
}

TEST(CountParameters, Examples) {
  FlimModel one;
  one.append_layer(make_layer(3, 3, 8, {0, 1, 2, 3, 4, 5, 6, 7}));
  EXPECT_EQ(count_parameters(one, true), 216);

  FlimModel two;
  two.append_layer(make_layer(3, 3, 4, {0, 1, 2, 3}));
  two.append_layer(make_layer(3, 4, 6, {0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(count_parameters(two, true), 324);

  FlimModel partial;
  partial.append_layer(make_layer(3, 3, 10, {1, 4}));
  EXPECT_EQ(count_parameters(partial, false) - count_parameters(partial, true), 8 * 27);
  EXPECT_THROW(count_parameters(FlimModel{}, true), DomainError);
}

TEST(FlimModel, ShapeChainAndSelection) {
  FlimModel m;
  m.append_layer(make_layer(3, 1, 4, {0, 2}));
  EXPECT_THROW(m.append_layer(make_layer(3, 3, 2, {0})), DomainError);
  m.append_layer(make_layer(3, 2, 3, {0, 1, 2}));
  EXPECT_EQ(m.depth(), 2);
  m.set_selection(0, {1, 3, 2});
  EXPECT_EQ(m.depth(), 1);
  EXPECT_EQ(m.layer(0).selected, (std::vector<int>{1, 2, 3}));
  EXPECT_THROW(m.set_selection(0, {}), DomainError);
  EXPECT_THROW(m.set_selection(0, {4}), DomainError);
  m.freeze();
  EXPECT_THROW(m.truncate(0), Error);
}

TEST(FlimModel, NormalizeSelection) {
  EXPECT_EQ(normalize_selection({3, 1, 3}, 4), (std::vector<int>{1, 3}));
  EXPECT_THROW(normalize_selection({}, 4), DomainError);
  EXPECT_THROW(normalize_selection({-1}, 4), DomainError);
}

}  // namespace
}  // namespace flim
