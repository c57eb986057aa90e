// Copyright 2026 The text2art Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "text2art/visual_features.hpp"

namespace {

using namespace text2art;

FeatureStore random_store(Rng& rng, std::size_t n, std::uint32_t dim) {
  FeatureStore s(dim);
  for (std::size_t i = 0; i < n; ++i) {
    DenseFeatureVector v;
    for (std::uint32_t d = 0; d < dim; ++d)
      v.values.push_back(static_cast<double>(static_cast<float>(gen::vec(rng, 1, -5, 5)[0])));
    s.add("img_" + std::to_string(i), std::move(v));
  }
  return s;
}

ConvFeatureMap random_map(Rng& rng, std::size_t c, std::size_t h, std::size_t w,
                          double lo = 0.0) {
  std::vector<double> values(c * h * w);
  for (auto& v : values) v = gen::vec(rng, 1, lo, 1.0)[0];
  return ConvFeatureMap(c, h, w, std::move(values));
}

oracle::Tensor to_tensor(const ConvFeatureMap& m) {
  oracle::Tensor t(m.channels(), std::vector<std::vector<double>>(
                                     m.height(), std::vector<double>(m.width())));
  for (std::size_t c = 0; c < m.channels(); ++c)
    for (std::size_t y = 0; y < m.height(); ++y)
      for (std::size_t x = 0; x < m.width(); ++x) t[c][y][x] = m(c, y, x);
  return t;
}

// --- SEMF files -----------------------------------------------------------------

TEST(SemfFile, EmptyStoreKeepsDim) {
  auto back = parse_semf(serialize_semf(FeatureStore(128)));
  EXPECT_EQ(back.size(), 0u);
  EXPECT_EQ(back.dim(), 128u);
}

TEST(SemfFile, HeaderLayout) {
  const std::string bytes = serialize_semf(FeatureStore(7));
  ASSERT_EQ(bytes.size(), 4u + 4u + 8u + 4u);
  EXPECT_EQ(bytes.substr(0, 4), "SEMF");
  std::uint32_t version = 0, dim = 0;
  std::uint64_t count = 1;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&count, bytes.data() + 8, 8);
  std::memcpy(&dim, bytes.data() + 16, 4);
  EXPECT_EQ(version, 1u);
  EXPECT_EQ(count, 0u);
  EXPECT_EQ(dim, 7u);
}

TEST(SemfFile, RoundTripIsBitExactProperty) {
  for (std::uint64_t seed = 0; seed < gen::kPropertySeeds; ++seed) {
    Rng rng(seed);
    const auto dim = static_cast<std::uint32_t>(gen::index(rng, 1, 40));
    auto store = random_store(rng, gen::index(rng, 0, 20), dim);
    const std::string bytes = serialize_semf(store);
    auto back = parse_semf(bytes, dim);
    ASSERT_EQ(back.ids(), store.ids());
    for (std::size_t i = 0; i < store.size(); ++i)
      for (std::size_t d = 0; d < dim; ++d)
        EXPECT_EQ(std::bit_cast<std::uint64_t>(back[i].values[d]),
                  std::bit_cast<std::uint64_t>(store[i].values[d]));
    EXPECT_EQ(serialize_semf(back), bytes);
  }
}

TEST(SemfFile, FileRoundTrip) {
  Rng rng(5);
  auto store = random_store(rng, 3, 1000);
  const auto path = std::filesystem::temp_directory_path() / "text2art_semf_roundtrip.semf";
  save_feature_file(path, store);
  auto back = load_feature_file(path, 1000);
  EXPECT_EQ(back.ids(), (std::vector<std::string>{"img_0", "img_1", "img_2"}));
  EXPECT_EQ(back.at("img_2").values, store.at("img_2").values);
  std::filesystem::remove(path);
  EXPECT_THROW(load_feature_file(path), IoError);
}

TEST(SemfFile, BadMagicOrVersion) {
  std::string bytes = serialize_semf(FeatureStore(4));
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(parse_semf(bad_magic), FormatError);
  std::string bad_version = bytes;
  bad_version[4] = 9;
  EXPECT_THROW(parse_semf(bad_version), FormatError);
  EXPECT_THROW(parse_semf("SEM"), CorruptionError);
}

TEST(SemfFile, TruncatedRecordReportsOffset) {
  Rng rng(1);
  const std::string bytes = serialize_semf(random_store(rng, 2, 4));
  // header 20 bytes; each record 2 + 5 ("img_0") + 16 = 23 bytes.
  const std::string cut = bytes.substr(0, bytes.size() - 3);
  try {
    parse_semf(cut);
    FAIL() << "expected CorruptionError";
  } catch (const CorruptionError& e) {
    EXPECT_EQ(e.offset(), 20u + 23u + 7u + 12u);
    EXPECT_NE(std::string(e.what()).find("record 1"), std::string::npos) << e.what();
  }
}

TEST(SemfFile, DimMismatchIsSchemaError) {
  const std::string bytes = serialize_semf(FeatureStore(16));
  EXPECT_THROW(parse_semf(bytes, 32), SchemaError);
  FeatureStore s(3);
  EXPECT_THROW(s.add("a", DenseFeatureVector{{1.0, 2.0}}), SchemaError);
  s.add("a", DenseFeatureVector{{1.0, 2.0, 3.0}});
  EXPECT_THROW(s.add("a", DenseFeatureVector{{1.0, 2.0, 3.0}}), ConflictError);
}

// --- conv maps ------------------------------------------------------------------

TEST(ConvMapFile, RoundTripFeedsRmac) {
  Rng rng(3);
  std::vector<ConvMapRecord> recs;
  for (int i = 0; i < 3; ++i) {
    auto m = random_map(rng, 4, 5, 6);
    // Values as they survive f32 storage.
    std::vector<double> narrowed;
    for (double v : m.values()) narrowed.push_back(static_cast<double>(static_cast<float>(v)));
    recs.push_back({"painting" + std::to_string(i), ConvFeatureMap(4, 5, 6, narrowed)});
  }
  auto back = parse_conv_maps(serialize_conv_maps(recs));
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].id, recs[i].id);
    EXPECT_EQ(back[i].map.values(), recs[i].map.values());
    auto r = rmac_pool(back[i].map);
    EXPECT_FALSE(r.degenerate);
    EXPECT_EQ(r.descriptor.dim(), 4u);
  }
  EXPECT_THROW(parse_semf(serialize_conv_maps(recs)), FormatError);
  EXPECT_THROW(parse_conv_maps(serialize_semf(FeatureStore(4))), FormatError);
}

TEST(ConvMapFile, ShapeMismatchAndTruncation) {
  std::vector<ConvMapRecord> recs{{"a", ConvFeatureMap(2, 2, 2)}, {"b", ConvFeatureMap(2, 3, 2)}};
  EXPECT_THROW(serialize_conv_maps(recs), SchemaError);
  recs.pop_back();
  const std::string bytes = serialize_conv_maps(recs);
  EXPECT_THROW(parse_conv_maps(bytes.substr(0, bytes.size() - 1)), CorruptionError);
  EXPECT_THROW(ConvFeatureMap(0, 1, 1), ArgumentError);
}

// --- regions --------------------------------------------------------------------

TEST(RmacRegions, OneByOne) {
  auto r = rmac_regions(1, 1, 1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0], (Region{0, 0, 1}));
}

TEST(RmacRegions, SingleLevelCoversSquareMap) {
  auto r = rmac_regions(8, 8, 1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0], (Region{0, 0, 8}));
}

TEST(RmacRegions, EightBySixThreeLevels) {
  // Level 1: side ceil(12/2)=6, x in {0,2}, y in {0}.
  // Level 2: side ceil(12/3)=4, step <= 2: x in {0,2,4}, y in {0,2}.
  // Level 3: side ceil(12/4)=3, step <= 1: x in {0..5}, y in {0..3}.
  std::vector<Region> expected = {{0, 0, 6}, {2, 0, 6}};
  for (std::size_t y : {0, 2})
    for (std::size_t x : {0, 2, 4}) expected.push_back({x, y, 4});
  for (std::size_t y = 0; y <= 3; ++y)
    for (std::size_t x = 0; x <= 5; ++x) expected.push_back({x, y, 3});
  EXPECT_EQ(rmac_regions(8, 6, 3), expected);
}

TEST(RmacRegions, InvalidInput) {
  EXPECT_THROW(rmac_regions(0, 3), ArgumentError);
  EXPECT_THROW(rmac_regions(3, 3, 0), ArgumentError);
}

TEST(RmacRegions, CoverageOverlapAndOracleProperty) {
  for (std::uint64_t seed = 0; seed < gen::kPropertySeeds; ++seed) {
    Rng rng(seed);
    const std::size_t w = gen::index(rng, 1, 30), h = gen::index(rng, 1, 30);
    const std::size_t levels = gen::index(rng, 1, 4);
    auto regions = rmac_regions(w, h, levels);

    std::vector<int> covered(w * h, 0);
    std::set<Region> distinct(regions.begin(), regions.end());
    EXPECT_EQ(distinct.size(), regions.size()) << "duplicates, seed " << seed;
    for (const auto& r : regions) {
      ASSERT_LE(r.x + r.side, w);
      ASSERT_LE(r.y + r.side, h);
      for (std::size_t y = r.y; y < r.y + r.side; ++y)
        for (std::size_t x = r.x; x < r.x + r.side; ++x) covered[y * w + x] = 1;
    }
    EXPECT_EQ(std::count(covered.begin(), covered.end(), 0), 0) << "seed " << seed;

    // Neighbouring windows of one size on one row overlap by >= 40%.
    for (std::size_t i = 1; i < regions.size(); ++i) {
      const auto& a = regions[i - 1];
      const auto& b = regions[i];
      if (a.side == b.side && a.y == b.y && b.x > a.x && a.side > 1) {
        EXPECT_GE(static_cast<double>(a.x + a.side - b.x), 0.4 * static_cast<double>(a.side))
            << "seed " << seed;
      }
    }

    auto naive = oracle::regions(w, h, levels);
    ASSERT_EQ(naive.size(), regions.size()) << "seed " << seed;
    for (std::size_t i = 0; i < naive.size(); ++i)
      EXPECT_EQ((Region{naive[i].x, naive[i].y, naive[i].side}), regions[i]);
  }
}

// --- pooling --------------------------------------------------------------------

TEST(RmacPool, SingleRegionIsNormalizedGlobalMax) {
  Rng rng(11);
  auto m = random_map(rng, 5, 6, 6);
  auto r = rmac_pool(m, 1);
  std::vector<double> gmax(5, -1.0);
  for (std::size_t c = 0; c < 5; ++c)
    for (std::size_t y = 0; y < 6; ++y)
      for (std::size_t x = 0; x < 6; ++x) gmax[c] = std::max(gmax[c], m(c, y, x));
  double n = 0;
  for (double v : gmax) n += v * v;
  for (std::size_t c = 0; c < 5; ++c) EXPECT_NEAR(r.descriptor.values[c], gmax[c] / std::sqrt(n), 1e-12);
}

TEST(RmacPool, ConstantTwoChannelMap) {
  ConvFeatureMap m(2, 4, 7, std::vector<double>(56, 0.3));
  auto r = rmac_pool(m);
  ASSERT_FALSE(r.degenerate);
  EXPECT_NEAR(r.descriptor.values[0], 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r.descriptor.values[1], 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(RmacPool, ThreeByFiveByFiveMatchesOracle) {
  Rng rng(2024);
  auto m = random_map(rng, 3, 5, 5);
  auto expected = oracle::rmac(to_tensor(m), 2);
  auto r = rmac_pool(m, 2);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(r.descriptor.values[c], expected[c], 1e-9);
}

TEST(RmacPool, AllZeroMapIsDegenerate) {
  auto r = rmac_pool(ConvFeatureMap(3, 4, 4));
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.descriptor.values, std::vector<double>(3, 0.0));
}

TEST(RmacPool, OracleUnitNormAndScaleInvarianceProperty) {
  for (std::uint64_t seed = 0; seed < gen::kPropertySeeds; ++seed) {
    Rng rng(seed);
    const std::size_t c = gen::index(rng, 1, 8), h = gen::index(rng, 1, 10),
                      w = gen::index(rng, 1, 10), levels = gen::index(rng, 1, 3);
    // Post-ReLU style activations: non-negative with some exact zeros.
    auto m = random_map(rng, c, h, w, -0.5);
    std::vector<double> relu = m.values();
    for (auto& v : relu) v = std::max(0.0, v);
    relu[0] = 0.7;  // keep the map non-degenerate
    ConvFeatureMap map(c, h, w, relu);

    auto r = rmac_pool(map, levels);
    auto expected = oracle::rmac(to_tensor(map), levels);
    ASSERT_FALSE(r.degenerate);
    double n = 0;
    for (std::size_t i = 0; i < c; ++i) {
      EXPECT_NEAR(r.descriptor.values[i], expected[i], 1e-9) << "seed " << seed;
      n += r.descriptor.values[i] * r.descriptor.values[i];
    }
    EXPECT_NEAR(std::sqrt(n), 1.0, 1e-6);

    const double alpha = gen::vec(rng, 1, 0.01, 100.0)[0];
    std::vector<double> scaled = relu;
    for (auto& v : scaled) v *= alpha;
    auto rs = rmac_pool(ConvFeatureMap(c, h, w, scaled), levels);
    for (std::size_t i = 0; i < c; ++i)
      EXPECT_NEAR(rs.descriptor.values[i], r.descriptor.values[i], 1e-9) << "seed " << seed;
  }
}

}  // namespace
