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

// Model checkpoints and the model-kind-agnostic JointModel wrapper.
//
// Checkpoint layout (little-endian):
//   "SEMM" | u32 version=1
//   u32 entry count | per entry: u16-prefixed key | u16-prefixed value
//   u32 matrix count | per matrix: u16-prefixed name | u32 rows | u32 cols |
//                      rows*cols f64, row-major
// Header keys: kind (cca|cml|amd) and the hyperparameters of that kind.

#ifndef TEXT2ART_MODELS_CHECKPOINT_HPP
#define TEXT2ART_MODELS_CHECKPOINT_HPP

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "text2art/error.hpp"
#include "text2art/io.hpp"
#include "text2art/models/cca.hpp"
#include "text2art/models/cml.hpp"
#include "text2art/numeric.hpp"

namespace text2art {

using JointModel = std::variant<CcaModel, CmlModel, AmdModel>;

inline std::string_view model_kind(const JointModel& m) {
  switch (m.index()) {
    case 0: return "cca";
    case 1: return "cml";
    default: return "amd";
  }
}

inline std::size_t joint_dim(const JointModel& m) {
  return std::visit([](const auto& x) { return x.dim(); }, m);
}

/// Unit text projection; CCA may report a degenerate (zero) projection.
inline Projection embed_text(const JointModel& m, const Vector& t) {
  if (const auto* cca = std::get_if<CcaModel>(&m)) return cca_project(*cca, t, CcaSide::kText);
  if (const auto* cml = std::get_if<CmlModel>(&m)) return {cml->embed_text(t), false};
  return {std::get<AmdModel>(m).embed_text(t), false};
}

inline Projection embed_image(const JointModel& m, const Vector& i) {
  if (const auto* cca = std::get_if<CcaModel>(&m)) return cca_project(*cca, i, CcaSide::kVisual);
  if (const auto* cml = std::get_if<CmlModel>(&m)) return {cml->embed_image(i), false};
  return {std::get<AmdModel>(m).embed_image(i), false};
}

namespace detail {

inline constexpr std::string_view kCheckpointMagic = "SEMM";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointData {
  std::map<std::string, std::string> header;
  std::map<std::string, Matrix> matrices;

  const std::string& key(const std::string& k) const {
    auto it = header.find(k);
    if (it == header.end()) throw SchemaError("checkpoint header lacks '" + k + "'");
    return it->second;
  }
  double number(const std::string& k) const {
    const auto& s = key(k);
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
      throw SchemaError("checkpoint header '" + k + "' is not a number");
    return v;
  }
  const Matrix& matrix(const std::string& name) const {
    auto it = matrices.find(name);
    if (it == matrices.end()) throw SchemaError("checkpoint lacks matrix '" + name + "'");
    return it->second;
  }
  Vector vec(const std::string& name) const {
    const Matrix& m = matrix(name);
    if (m.cols() != 1) throw SchemaError("checkpoint matrix '" + name + "' is not a column");
    return m.col(0);
  }
};

inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

inline Matrix column(const Vector& v) { return Matrix(v); }

inline void put_head(CheckpointData& d, const std::string& prefix, const ProjectionHead& h) {
  d.matrices[prefix + ".W"] = h.W;
  d.matrices[prefix + ".b"] = column(h.b);
}

inline ProjectionHead get_head(const CheckpointData& d, const std::string& prefix) {
  ProjectionHead h{d.matrix(prefix + ".W"), d.vec(prefix + ".b")};
  if (h.b.size() != h.W.rows()) throw SchemaError("checkpoint head '" + prefix + "' is malformed");
  return h;
}

inline void put_cml(CheckpointData& d, const CmlModel& m) {
  d.header["margin"] = format_double(m.margin);
  d.header["arch"] = std::string(arch_name(m.text_tower.arch));
  d.header["comment_dim"] = std::to_string(m.text_tower.comment_dim);
  d.header["dim"] = std::to_string(m.dim());
  put_head(d, "vis", m.vis_head);
  put_head(d, "text", m.text_tower.head);
  if (m.text_tower.arch == TextArch::kMlp) {
    put_head(d, "comment_encoder", m.text_tower.comment_encoder);
    put_head(d, "title_encoder", m.text_tower.title_encoder);
  }
}

inline CmlModel get_cml(const CheckpointData& d) {
  CmlModel m;
  m.margin = d.number("margin");
  m.vis_head = get_head(d, "vis");
  m.text_tower.arch = parse_arch(d.key("arch"));
  m.text_tower.comment_dim = static_cast<std::size_t>(d.number("comment_dim"));
  m.text_tower.head = get_head(d, "text");
  if (m.text_tower.arch == TextArch::kMlp) {
    m.text_tower.comment_encoder = get_head(d, "comment_encoder");
    m.text_tower.title_encoder = get_head(d, "title_encoder");
  }
  if (m.text_tower.head.out_dim() != m.vis_head.out_dim())
    throw SchemaError("checkpoint towers disagree on the joint dimension");
  return m;
}

}  // namespace detail

inline std::string serialize_checkpoint(const JointModel& model) {
  detail::CheckpointData d;
  d.header["kind"] = std::string(model_kind(model));
  if (const auto* cca = std::get_if<CcaModel>(&model)) {
    d.header["dim"] = std::to_string(cca->dim());
    d.header["ridge"] = detail::format_double(cca->ridge);
    d.matrices["mean_x"] = detail::column(cca->mean_x);
    d.matrices["mean_y"] = detail::column(cca->mean_y);
    d.matrices["wx"] = cca->wx;
    d.matrices["wy"] = cca->wy;
    d.matrices["correlations"] = detail::column(cca->correlations);
  } else if (const auto* cml = std::get_if<CmlModel>(&model)) {
    detail::put_cml(d, *cml);
  } else {
    const auto& amd = std::get<AmdModel>(model);
    detail::put_cml(d, amd.base);
    d.header["alpha"] = detail::format_double(amd.alpha);
    d.header["attribute"] = std::string(attribute_name(amd.attribute));
    d.header["n_labels"] = std::to_string(amd.labels.size());
    for (std::size_t i = 0; i < amd.labels.size(); ++i)
      d.header["label." + std::to_string(i)] = amd.labels[i];
    d.matrices["text_classifier.W"] = amd.text_classifier.W;
    d.matrices["text_classifier.b"] = detail::column(amd.text_classifier.b);
    d.matrices["vis_classifier.W"] = amd.vis_classifier.W;
    d.matrices["vis_classifier.b"] = detail::column(amd.vis_classifier.b);
  }

  io::ByteWriter w;
  w.put_bytes(detail::kCheckpointMagic);
  w.put(detail::kCheckpointVersion);
  w.put(static_cast<std::uint32_t>(d.header.size()));
  for (const auto& [k, v] : d.header) {
    w.put_short_string(k);
    w.put_short_string(v);
  }
  w.put(static_cast<std::uint32_t>(d.matrices.size()));
  for (const auto& [name, m] : d.matrices) {
    w.put_short_string(name);
    w.put(static_cast<std::uint32_t>(m.rows()));
    w.put(static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) w.put(m.data()[i]);
  }
  return w.release();
}

inline JointModel parse_checkpoint(std::string_view bytes) {
  io::ByteReader r(bytes);
  if (r.get_bytes(4, "magic") != detail::kCheckpointMagic)
    throw FormatError("not a model checkpoint (bad magic)");
  auto version = r.get<std::uint32_t>("version");
  if (version != detail::kCheckpointVersion)
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  detail::CheckpointData d;
  auto n_kv = r.get<std::uint32_t>("header count");
  for (std::uint32_t i = 0; i < n_kv; ++i) {
    auto k = r.get_short_string("header key");
    d.header[k] = r.get_short_string("header value");
  }
  auto n_mat = r.get<std::uint32_t>("matrix count");
  for (std::uint32_t i = 0; i < n_mat; ++i) {
    auto name = r.get_short_string("matrix name");
    auto rows = r.get<std::uint32_t>("matrix rows");
    auto cols = r.get<std::uint32_t>("matrix cols");
    if (r.remaining() / sizeof(double) < std::uint64_t{rows} * cols)
      throw CorruptionError("matrix '" + name + "' truncated", r.offset());
    Matrix m(rows, cols);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = r.get<double>("matrix values");
    d.matrices[name] = std::move(m);
  }
  if (r.remaining() != 0) throw CorruptionError("trailing bytes after checkpoint", r.offset());

  const auto& kind = d.key("kind");
  if (kind == "cca") {
    CcaModel m;
    m.ridge = d.number("ridge");
    m.mean_x = d.vec("mean_x");
    m.mean_y = d.vec("mean_y");
    m.wx = d.matrix("wx");
    m.wy = d.matrix("wy");
    m.correlations = d.vec("correlations");
    if (m.wx.rows() != m.mean_x.size() || m.wy.rows() != m.mean_y.size() ||
        m.wx.cols() != m.correlations.size() || m.wy.cols() != m.correlations.size())
      throw SchemaError("CCA checkpoint matrices have inconsistent shapes");
    return m;
  }
  if (kind == "cml") return detail::get_cml(d);
  if (kind == "amd") {
    AmdModel m;
    m.base = detail::get_cml(d);
    m.alpha = d.number("alpha");
    m.attribute = parse_attribute(d.key("attribute"));
    const auto n_labels = static_cast<std::size_t>(d.number("n_labels"));
    for (std::size_t i = 0; i < n_labels; ++i) m.labels.push_back(d.key("label." + std::to_string(i)));
    m.text_classifier = {d.matrix("text_classifier.W"), d.vec("text_classifier.b")};
    m.vis_classifier = {d.matrix("vis_classifier.W"), d.vec("vis_classifier.b")};
    if (m.text_classifier.classes() != m.labels.size() ||
        m.vis_classifier.classes() != m.labels.size())
      throw SchemaError("AMD checkpoint classifier size does not match its labels");
    return m;
  }
  throw SchemaError("unknown model kind '" + kind + "' in checkpoint");
}

inline void save_checkpoint(const std::filesystem::path& path, const JointModel& model) {
  io::write_file(path, serialize_checkpoint(model));
}

inline JointModel load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(io::read_file(path));
}

}  // namespace text2art

#endif  // TEXT2ART_MODELS_CHECKPOINT_HPP
