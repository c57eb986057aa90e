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

// Visual encodings: SEMF feature files and RMAC pooling of conv activations.
//
// SEMF layout (little-endian):
//   "SEMF" | u32 version | u64 record count | u32 dim
//   per record: u16 id length | id bytes (UTF-8) | dim x f32
//
// Conv-map files share the magic with version 2 and carry three shape fields:
//   "SEMF" | u32 version=2 | u64 record count | u32 C | u32 H | u32 W
//   per record: u16 id length | id bytes | C*H*W x f32, channel-major (c, y, x)

#ifndef TEXT2ART_VISUAL_FEATURES_HPP
#define TEXT2ART_VISUAL_FEATURES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "text2art/error.hpp"
#include "text2art/io.hpp"

namespace text2art {

inline constexpr std::string_view kSemfMagic = "SEMF";
inline constexpr std::uint32_t kSemfVersion = 1;
inline constexpr std::uint32_t kSemfConvMapVersion = 2;

struct DenseFeatureVector {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  bool operator==(const DenseFeatureVector&) const = default;
};

/// Id-keyed feature vectors of one shared dimension, in file order.
class FeatureStore {
 public:
  explicit FeatureStore(std::uint32_t dim = 0) : dim_(dim) {}

  std::uint32_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  void add(std::string id, DenseFeatureVector v) {
    if (v.dim() != dim_)
      throw SchemaError("feature '" + id + "' has dim " + std::to_string(v.dim()) +
                        ", store expects " + std::to_string(dim_));
    for (double x : v.values)
      if (!std::isfinite(x)) throw ArgumentError("feature '" + id + "' has a non-finite value");
    auto [it, inserted] = index_.emplace(id, vectors_.size());
    if (!inserted) throw ConflictError("duplicate feature id '" + id + "'");
    ids_.push_back(std::move(id));
    vectors_.push_back(std::move(v));
  }

  const DenseFeatureVector* find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &vectors_[it->second];
  }

  const DenseFeatureVector& at(const std::string& id) const {
    if (const auto* v = find(id)) return *v;
    throw SchemaError("no feature vector for '" + id + "'");
  }

  const DenseFeatureVector& operator[](std::size_t i) const { return vectors_.at(i); }

 private:
  std::uint32_t dim_;
  std::vector<std::string> ids_;
  std::vector<DenseFeatureVector> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Values are narrowed to f32 on write.
inline std::string serialize_semf(const FeatureStore& store) {
  io::ByteWriter w;
  w.put_bytes(kSemfMagic);
  w.put(kSemfVersion);
  w.put(static_cast<std::uint64_t>(store.size()));
  w.put(store.dim());
  for (std::size_t i = 0; i < store.size(); ++i) {
    w.put_short_string(store.ids()[i]);
    for (double x : store[i].values) w.put(static_cast<float>(x));
  }
  return w.release();
}

namespace detail {

inline std::uint32_t read_semf_header(io::ByteReader& r) {
  auto magic = r.get_bytes(4, "magic");
  if (magic != kSemfMagic) throw FormatError("not a SEMF file (bad magic)");
  return r.get<std::uint32_t>("version");
}

}  // namespace detail

/// `expected_dim`, when given, must match the file's dim.
inline FeatureStore parse_semf(std::string_view bytes,
                               std::optional<std::uint32_t> expected_dim = std::nullopt) {
  io::ByteReader r(bytes);
  auto version = detail::read_semf_header(r);
  if (version != kSemfVersion)
    throw FormatError("unsupported SEMF feature version " + std::to_string(version));
  auto count = r.get<std::uint64_t>("record count");
  auto dim = r.get<std::uint32_t>("dim");
  if (expected_dim && *expected_dim != dim)
    throw SchemaError("feature file dim " + std::to_string(dim) + " does not match expected " +
                      std::to_string(*expected_dim));
  if (dim == 0 && count > 0) throw SchemaError("feature file declares dim 0");
  FeatureStore store(dim);
  for (std::uint64_t k = 0; k < count; ++k) {
    auto record_start = r.offset();
    try {
      auto id = r.get_short_string("record id");
      DenseFeatureVector v;
      v.values.resize(dim);
      for (auto& x : v.values) x = static_cast<double>(r.get<float>("record values"));
      store.add(std::move(id), std::move(v));
    } catch (const CorruptionError& e) {
      throw CorruptionError("record " + std::to_string(k) + " starting at byte " +
                                std::to_string(record_start) + ": truncated",
                            e.offset());
    }
  }
  if (r.remaining() != 0)
    throw CorruptionError("trailing bytes after last record", r.offset());
  return store;
}

inline FeatureStore load_feature_file(const std::filesystem::path& path,
                                      std::optional<std::uint32_t> expected_dim = std::nullopt) {
  return parse_semf(io::read_file(path), expected_dim);
}

inline void save_feature_file(const std::filesystem::path& path, const FeatureStore& store) {
  io::write_file(path, serialize_semf(store));
}

/// C x H x W activation tensor, channel-major.
class ConvFeatureMap {
 public:
  ConvFeatureMap(std::size_t channels, std::size_t height, std::size_t width)
      : c_(channels), h_(height), w_(width), values_(channels * height * width, 0.0) {
    if (channels == 0 || height == 0 || width == 0)
      throw ArgumentError("conv feature map dimensions must be >= 1");
  }

  ConvFeatureMap(std::size_t channels, std::size_t height, std::size_t width,
                 std::vector<double> values)
      : ConvFeatureMap(channels, height, width) {
    if (values.size() != values_.size())
      throw ArgumentError("conv feature map value count does not match C*H*W");
    for (double x : values)
      if (!std::isfinite(x)) throw ArgumentError("conv feature map has a non-finite value");
    values_ = std::move(values);
  }

  std::size_t channels() const noexcept { return c_; }
  std::size_t height() const noexcept { return h_; }
  std::size_t width() const noexcept { return w_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double operator()(std::size_t c, std::size_t y, std::size_t x) const {
    return values_[(c * h_ + y) * w_ + x];
  }
  double& operator()(std::size_t c, std::size_t y, std::size_t x) {
    return values_[(c * h_ + y) * w_ + x];
  }

 private:
  std::size_t c_, h_, w_;
  std::vector<double> values_;
};

struct ConvMapRecord {
  std::string id;
  ConvFeatureMap map;
};

inline std::string serialize_conv_maps(const std::vector<ConvMapRecord>& records) {
  if (records.empty()) throw ArgumentError("conv-map file needs at least one record for its shape");
  const auto& first = records.front().map;
  io::ByteWriter w;
  w.put_bytes(kSemfMagic);
  w.put(kSemfConvMapVersion);
  w.put(static_cast<std::uint64_t>(records.size()));
  w.put(static_cast<std::uint32_t>(first.channels()));
  w.put(static_cast<std::uint32_t>(first.height()));
  w.put(static_cast<std::uint32_t>(first.width()));
  for (const auto& rec : records) {
    if (rec.map.channels() != first.channels() || rec.map.height() != first.height() ||
        rec.map.width() != first.width())
      throw SchemaError("conv map '" + rec.id + "' shape differs from the first record");
    w.put_short_string(rec.id);
    for (double x : rec.map.values()) w.put(static_cast<float>(x));
  }
  return w.release();
}

inline std::vector<ConvMapRecord> parse_conv_maps(std::string_view bytes) {
  io::ByteReader r(bytes);
  auto version = detail::read_semf_header(r);
  if (version != kSemfConvMapVersion)
    throw FormatError("unsupported SEMF conv-map version " + std::to_string(version));
  auto count = r.get<std::uint64_t>("record count");
  auto c = r.get<std::uint32_t>("channels");
  auto h = r.get<std::uint32_t>("height");
  auto w = r.get<std::uint32_t>("width");
  if (c == 0 || h == 0 || w == 0) throw SchemaError("conv-map file declares a zero dimension");
  std::vector<ConvMapRecord> out;
  const std::size_t n = std::size_t{c} * h * w;
  for (std::uint64_t k = 0; k < count; ++k) {
    auto id = r.get_short_string("record id");
    std::vector<double> values(n);
    for (auto& x : values) x = static_cast<double>(r.get<float>("record values"));
    out.push_back({std::move(id), ConvFeatureMap(c, h, w, std::move(values))});
  }
  if (r.remaining() != 0) throw CorruptionError("trailing bytes after last record", r.offset());
  return out;
}

inline std::vector<ConvMapRecord> load_conv_map_file(const std::filesystem::path& path) {
  return parse_conv_maps(io::read_file(path));
}

/// Square window [x, x+side) x [y, y+side) on the activation grid.
struct Region {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t side = 0;

  auto operator<=>(const Region&) const = default;
};

namespace detail {

// Start offsets of windows of length `side` along an axis of length `extent`
// such that neighbours overlap by at least 40% of the side. Offsets are
// integers, so the step is capped at floor(0.6 side) (at least 1 so that
// unit windows still tile the axis).
inline std::vector<std::size_t> window_starts(std::size_t extent, std::size_t side) {
  if (side >= extent) return {0};
  const std::size_t span = extent - side;
  const std::size_t max_step = std::max<std::size_t>(1, 3 * side / 5);
  const std::size_t gaps = (span + max_step - 1) / max_step;
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i <= gaps; ++i)
    starts.push_back((2 * i * span + gaps) / (2 * gaps));  // round(i * span / gaps)
  return starts;
}

}  // namespace detail

/// RMAC region grid. At level l the square side is ceil(2 min(W,H) / (l+1));
/// windows are spread uniformly along each axis, neighbours overlapping by
/// >= 40% of the side (when the axis admits more than one window), and
/// clipped to the map. Ordered by level, then row, then column; duplicates
/// across levels are dropped.
inline std::vector<Region> rmac_regions(std::size_t width, std::size_t height,
                                        std::size_t levels = 3) {
  if (width == 0 || height == 0) throw ArgumentError("rmac_regions: map must be at least 1x1");
  if (levels == 0) throw ArgumentError("rmac_regions: need at least one level");
  const std::size_t m = std::min(width, height);
  std::vector<Region> out;
  std::set<Region> seen;
  for (std::size_t l = 1; l <= levels; ++l) {
    std::size_t side = (2 * m + l) / (l + 1);
    side = std::clamp<std::size_t>(side, 1, m);
    for (std::size_t y : detail::window_starts(height, side))
      for (std::size_t x : detail::window_starts(width, side))
        if (seen.insert({x, y, side}).second) out.push_back({x, y, side});
  }
  return out;
}

struct RmacResult {
  DenseFeatureVector descriptor;
  bool degenerate = false;  // every region vector was zero
};

/// Regional max-pooling: channelwise max per region, l2-normalize each
/// region vector, sum, and l2-normalize the sum.
inline RmacResult rmac_pool(const ConvFeatureMap& map, std::size_t levels = 3) {
  const std::size_t C = map.channels();
  std::vector<double> sum(C, 0.0);
  std::vector<double> region(C);
  for (const auto& r : rmac_regions(map.width(), map.height(), levels)) {
    for (std::size_t c = 0; c < C; ++c) {
      double best = map(c, r.y, r.x);
      for (std::size_t y = r.y; y < r.y + r.side; ++y)
        for (std::size_t x = r.x; x < r.x + r.side; ++x) best = std::max(best, map(c, y, x));
      region[c] = best;
    }
    double sq = 0;
    for (double v : region) sq += v * v;
    if (sq <= 0) continue;
    double inv = 1.0 / std::sqrt(sq);
    for (std::size_t c = 0; c < C; ++c) sum[c] += region[c] * inv;
  }
  double sq = 0;
  for (double v : sum) sq += v * v;
  RmacResult out;
  if (sq <= 1e-24) {
    out.descriptor.values.assign(C, 0.0);
    out.degenerate = true;
    return out;
  }
  double inv = 1.0 / std::sqrt(sq);
  for (auto& v : sum) v *= inv;
  out.descriptor.values = std::move(sum);
  return out;
}

}  // namespace text2art

#endif  // TEXT2ART_VISUAL_FEATURES_HPP
