/*
 * Copyright 2026 The cxrcl Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "cxrcl/error.hpp"
#include "cxrcl/imaging/image_io.hpp"
#include "cxrcl/imaging/manifest.hpp"
#include "cxrcl/imaging/preprocess.hpp"
#include "test_support.hpp"

namespace cxrcl {
namespace {

using testing::image_from_levels;
using testing::levels_of;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kInvalidArgument;
}

TEST(ImageTest, RejectsInvalidConstruction) {
  EXPECT_EQ(code_of([] { Image(0, 3); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { Image(2, 2, {0.0, 0.5, 1.0}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { Image(1, 2, {0.0, 1.5}); }), ErrorCode::kInvalidArgument);
}

TEST(LabelTest, WireNamesAndOrdinals) {
  EXPECT_EQ(ordinal(ClassLabel::kCovid19), 0);
  EXPECT_EQ(ordinal(ClassLabel::kNormal), 1);
  EXPECT_EQ(ordinal(ClassLabel::kPneumonia), 2);
  for (ClassLabel l : kAllLabels) EXPECT_EQ(parse_label(label_name(l)), l);
  EXPECT_EQ(label_name(ClassLabel::kCovid19), "COVID-19");
  EXPECT_FALSE(parse_label("covid").has_value());
}

TEST(ResizeTest, SameSizeIsBitExact) {
  std::mt19937_64 rng(3);
  const Image img = testing::random_image(7, 5, rng);
  EXPECT_EQ(resize(img, 7, 5), img);
}

TEST(ResizeTest, TwoByTwoToOneAveragesCorners) {
  const Image img(2, 2, {0.0, 1.0, 0.0, 1.0});
  const Image out = resize(img, 1, 1);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out.pixels()[0], 0.5);
}

TEST(ResizeTest, TargetRasterAndRange) {
  std::mt19937_64 rng(4);
  const Image img = testing::random_image(512, 512, rng);
  const Image out = resize(img, 224, 224);
  EXPECT_EQ(out.width(), 224u);
  EXPECT_EQ(out.height(), 224u);
  for (double p : out.pixels()) {
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(ResizeTest, DimensionContractOverManyShapes) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> dim(1, 40);
  for (int i = 0; i < 200; ++i) {
    const Image img = testing::random_image(dim(rng), dim(rng), rng);
    const std::size_t w = dim(rng), h = dim(rng);
    const Image out = resize(img, w, h);
    ASSERT_EQ(out.width(), w);
    ASSERT_EQ(out.height(), h);
  }
}

TEST(CropTest, FullFractionIsIdentity) {
  std::mt19937_64 rng(6);
  const Image img = testing::random_image(9, 4, rng);
  EXPECT_EQ(center_crop(img, 1.0), img);
}

TEST(CropTest, CentralWindowOfFourByFour) {
  std::vector<double> px;
  for (int i = 0; i < 16; ++i) px.push_back(i / 15.0);
  const Image img(4, 4, px);
  const Image out = center_crop(img, 0.5);
  ASSERT_EQ(out.width(), 2u);
  ASSERT_EQ(out.height(), 2u);
  EXPECT_EQ(out.pixels()[0], px[5]);
  EXPECT_EQ(out.pixels()[1], px[6]);
  EXPECT_EQ(out.pixels()[2], px[9]);
  EXPECT_EQ(out.pixels()[3], px[10]);
}

TEST(CropTest, CropThenResizeRestoresRaster) {
  std::mt19937_64 rng(7);
  const Image img = testing::random_image(224, 224, rng);
  const Image cropped = center_crop(img, kDefaultCropFraction);
  EXPECT_EQ(cropped.width(), 180u);  // ceil(0.8 * 224)
  const Image out = resize(cropped, 224, 224);
  EXPECT_EQ(out.width(), 224u);
  EXPECT_EQ(out.height(), 224u);
}

TEST(CropTest, RejectsBadFractions) {
  const Image img(4, 4);
  EXPECT_EQ(code_of([&] { center_crop(img, 0.0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { center_crop(img, -0.2); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { center_crop(img, 1.01); }), ErrorCode::kInvalidArgument);
}

TEST(EqualizeTest, ConstantImagePassesThrough) {
  const Image img = Image::filled(5, 3, 0.3);
  EXPECT_EQ(equalize(img), img);
}

TEST(EqualizeTest, FourDistinctLevelsSpreadToFullRange) {
  const Image out = equalize(image_from_levels(2, 2, {10, 20, 30, 40}));
  EXPECT_EQ(out, image_from_levels(2, 2, {0, 85, 170, 255}));
}

TEST(EqualizeTest, TwoExtremeLevelsUnchangedAndIdempotent) {
  const Image img = image_from_levels(2, 2, {0, 0, 255, 255});
  const Image once = equalize(img);
  EXPECT_EQ(once, img);
  EXPECT_EQ(equalize(once), once);
}

TEST(EqualizeTest, OutputStaysInRange) {
  std::mt19937_64 rng(8);
  const Image out = equalize(testing::random_image(16, 16, rng));
  for (double p : out.pixels()) {
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
  const auto lv = levels_of(out);
  EXPECT_EQ(*std::max_element(lv.begin(), lv.end()), 255);
  EXPECT_EQ(*std::min_element(lv.begin(), lv.end()), 0);
}

TEST(MaskTest, IdentityAnnihilationAndCheckerboard) {
  std::mt19937_64 rng(9);
  const Image img = testing::random_image(4, 4, rng);
  EXPECT_EQ(apply_mask(img, Image::filled(4, 4, 1.0)), img);
  EXPECT_EQ(apply_mask(img, Image(4, 4)), Image(4, 4));

  std::vector<double> checker(16);
  for (std::size_t i = 0; i < 16; ++i) checker[i] = ((i % 4 + i / 4) % 2 == 0) ? 1.0 : 0.0;
  const Image board(4, 4, checker);
  EXPECT_EQ(apply_mask(Image::filled(4, 4, 1.0), board), board);
}

TEST(MaskTest, ThresholdAndIdempotence) {
  std::mt19937_64 rng(10);
  const Image img = testing::random_image(6, 6, rng);
  const Image mask = testing::random_image(6, 6, rng);
  const Image once = apply_mask(img, mask);
  EXPECT_EQ(apply_mask(once, mask), once);
  for (std::size_t i = 0; i < img.size(); ++i) {
    EXPECT_EQ(once.pixels()[i], mask.pixels()[i] >= 0.5 ? img.pixels()[i] : 0.0);
  }
}

TEST(MaskTest, DimensionMismatch) {
  EXPECT_EQ(code_of([] { apply_mask(Image(3, 3), Image(3, 4)); }), ErrorCode::kInvalidArgument);
}

TEST(PreprocessTest, SegmentedNeedsMask) {
  PreprocessConfig cfg{Strategy::kSegmented, false};
  EXPECT_EQ(code_of([&] { preprocess(Image(4, 4), cfg); }), ErrorCode::kInvalidArgument);
}

TEST(PreprocessTest, AllSixPipelinesPreserveRangeAndRaster) {
  std::mt19937_64 rng(11);
  const Image img = testing::random_image(20, 16, rng);
  const Image mask = testing::random_image(20, 16, rng);
  for (Strategy s : {Strategy::kOriginal, Strategy::kCropped, Strategy::kSegmented}) {
    for (bool eq : {false, true}) {
      const Image out = preprocess(img, {s, eq}, &mask);
      EXPECT_EQ(out.width(), 20u);
      EXPECT_EQ(out.height(), 16u);
    }
  }
  EXPECT_EQ(preprocess(img, {Strategy::kOriginal, false}), img);
}

TEST(ImageIoTest, PngAndPgmRoundTripQuantizedPixels) {
  testing::TempDir dir;
  std::vector<int> levels;
  for (int i = 0; i < 12; ++i) levels.push_back(i * 23);
  const Image img = image_from_levels(4, 3, levels);
  save_image(img, dir / "a.png");
  save_image(img, dir / "a.pgm");
  EXPECT_EQ(load_image(dir / "a.png"), img);
  EXPECT_EQ(load_image(dir / "a.pgm"), img);
}

TEST(ImageIoTest, AsciiPgmAndGarbage) {
  const std::string ascii = "P2\n# comment\n2 1\n4\n0 4\n";
  const Image img = decode_image(std::vector<std::uint8_t>(ascii.begin(), ascii.end()));
  EXPECT_EQ(img, Image(2, 1, {0.0, 1.0}));
  const std::string junk = "not an image";
  EXPECT_EQ(code_of([&] { decode_image(std::vector<std::uint8_t>(junk.begin(), junk.end())); }),
            ErrorCode::kValidation);
}

class ManifestTest : public ::testing::Test {
 protected:
  std::filesystem::path write(const std::string& text) {
    const auto path = dir_ / "manifest.json";
    std::ofstream(path) << text;
    return path;
  }
  testing::TempDir dir_;
};

TEST_F(ManifestTest, EmptyFileGivesEmptySplits) {
  const auto m = load_manifest(write(""));
  EXPECT_TRUE(m.train.empty());
  EXPECT_TRUE(m.validation.empty());
  EXPECT_TRUE(m.test.empty());
}

TEST_F(ManifestTest, OneSamplePerSplitSortedAndResolved) {
  const auto m = load_manifest(write(R"({
    "train": [{"id": "b", "image_path": "b.png", "label": "Normal"},
              {"id": "a", "image_path": "a.png", "label": "COVID-19", "mask_path": "a_mask.png"}],
    "validation": [{"id": "c", "image_path": "c.png", "label": "Pneumonia"}],
    "test": [{"id": "d", "image_path": "sub/d.png", "label": "Normal"}],
    "preprocessing": {"strategy": "segmented", "equalize": true}})"));
  ASSERT_EQ(m.train.size(), 2u);
  EXPECT_EQ(m.train[0].id, "a");
  EXPECT_EQ(m.train[0].label, ClassLabel::kCovid19);
  ASSERT_TRUE(m.train[0].mask_path.has_value());
  EXPECT_EQ(*m.train[0].mask_path, dir_.path() / "a_mask.png");
  EXPECT_EQ(m.validation.size(), 1u);
  EXPECT_EQ(m.test[0].image_path, dir_.path() / "sub/d.png");
  EXPECT_EQ(m.strategy, Strategy::kSegmented);
  EXPECT_TRUE(m.equalize);
}

TEST_F(ManifestTest, DistinctErrorKinds) {
  EXPECT_EQ(code_of([&] { load_manifest(dir_ / "missing.json"); }), ErrorCode::kNotFound);
  EXPECT_EQ(code_of([&] { load_manifest(write("{ not json")); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([&] { load_manifest(write(R"({"train": [{"id": "x"}]})")); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([&] {
              load_manifest(write(R"({"train": [{"id": "x", "image_path": "x.png", "label": "Flu"}]})"));
            }),
            ErrorCode::kParse);
  EXPECT_EQ(code_of([&] {
              load_manifest(write(R"({"train": [{"id": "x", "image_path": "x.png", "label": "Normal"}],
                                      "test": [{"id": "x", "image_path": "y.png", "label": "Normal"}]})"));
            }),
            ErrorCode::kSplitOverlap);
}

TEST_F(ManifestTest, SaveLoadRoundTrip) {
  DatasetManifest m;
  m.train.push_back({"a", dir_.path() / "img/a.png", dir_.path() / "img/a_mask.png", ClassLabel::kNormal});
  m.test.push_back({"z", dir_.path() / "img/z.png", std::nullopt, ClassLabel::kPneumonia});
  m.strategy = Strategy::kCropped;
  m.equalize = true;
  save_manifest(m, dir_ / "out.json");
  EXPECT_EQ(load_manifest(dir_ / "out.json"), m);
}

}  // namespace
}  // namespace cxrcl
