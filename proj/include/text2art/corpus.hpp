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

// Artwork triplets (image, comment, attributes): metadata CSV loading,
// train/val/test splitting and categorical label maps.
//
// The metadata CSV carries ten columns, matched by header name in any order:
//   ID, IMAGE, COMMENT, AUTHOR, TITLE, DATE, TECHNIQUE, TYPE, SCHOOL, TIMEFRAME
// Quoting follows RFC 4180. Rows with an empty COMMENT, TITLE or ID are
// dropped and reported; DATE and TECHNIQUE may be empty.

#ifndef TEXT2ART_CORPUS_HPP
#define TEXT2ART_CORPUS_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "text2art/error.hpp"
#include "text2art/io.hpp"

namespace text2art {

struct AttributeSet {
  std::string author;
  std::string title;
  std::string date;
  std::string technique;
  std::string type;
  std::string school;
  std::string timeframe;

  bool operator==(const AttributeSet&) const = default;
};

struct ArtworkTriplet {
  std::string id;
  std::string image_ref;
  std::string comment;
  AttributeSet attributes;

  bool operator==(const ArtworkTriplet&) const = default;
};

enum class Split { kTrain, kVal, kTest };

inline std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

/// Categorical attributes that can drive a classifier.
enum class Attribute { kType, kSchool, kTimeframe, kAuthor };

inline Attribute parse_attribute(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "type") return Attribute::kType;
  if (lower == "school") return Attribute::kSchool;
  if (lower == "timeframe") return Attribute::kTimeframe;
  if (lower == "author") return Attribute::kAuthor;
  throw ArgumentError("unknown attribute '" + std::string(name) +
                      "' (expected type, school, timeframe or author)");
}

inline std::string_view attribute_name(Attribute a) {
  switch (a) {
    case Attribute::kType: return "type";
    case Attribute::kSchool: return "school";
    case Attribute::kTimeframe: return "timeframe";
    case Attribute::kAuthor: return "author";
  }
  return "?";
}

inline const std::string& attribute_value(const AttributeSet& set, Attribute a) {
  switch (a) {
    case Attribute::kType: return set.type;
    case Attribute::kSchool: return set.school;
    case Attribute::kTimeframe: return set.timeframe;
    case Attribute::kAuthor: return set.author;
  }
  return set.type;
}

/// Dense indices 0..C-1 for the values of one attribute, assigned in
/// lexicographic order of the value.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(Attribute attribute, std::vector<std::string> sorted_values)
      : attribute_(attribute), values_(std::move(sorted_values)) {
    for (std::size_t i = 0; i < values_.size(); ++i)
      index_.emplace(values_[i], static_cast<int>(i));
  }

  Attribute attribute() const noexcept { return attribute_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<std::string>& values() const noexcept { return values_; }

  std::optional<int> find(const std::string& value) const {
    auto it = index_.find(value);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  int at(const std::string& value) const {
    auto idx = find(value);
    if (!idx)
      throw ArgumentError("value '" + value + "' missing from " +
                          std::string(attribute_name(attribute_)) + " label map");
    return *idx;
  }

  bool operator==(const LabelMap& o) const {
    return attribute_ == o.attribute_ && values_ == o.values_;
  }

 private:
  Attribute attribute_ = Attribute::kType;
  std::vector<std::string> values_;
  std::unordered_map<std::string, int> index_;
};

struct Corpus {
  std::vector<ArtworkTriplet> samples;
  std::optional<Split> split;  // unset for a freshly loaded, unsplit collection
  std::map<Attribute, LabelMap> label_maps;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
};

struct RowDiagnostic {
  std::size_t row;  // 1-based record number; the header is row 1
  std::string reason;
};

struct ParsedCorpus {
  Corpus corpus;
  std::vector<RowDiagnostic> rejected;
};

namespace csv {

/// RFC 4180 record splitter. Accepts LF or CRLF line ends and a UTF-8 BOM.
inline std::vector<std::vector<std::string>> parse(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    // A blank line is not a record.
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };
  while (i < text.size()) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        quoted = false;
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          quoted = true;
          field_started = true;
        } else {
          field.push_back(c);  // stray quote inside an unquoted field
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_row();
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
    ++i;
  }
  if (quoted) throw SchemaError("unterminated quoted field at end of CSV");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

inline std::string quote(std::string_view field) {
  bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos ||
               (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace csv

inline constexpr std::array<std::string_view, 10> kMetadataColumns = {
    "ID", "IMAGE", "COMMENT", "AUTHOR", "TITLE",
    "DATE", "TECHNIQUE", "TYPE", "SCHOOL", "TIMEFRAME"};

namespace detail {

inline bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

inline std::string upper_trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

}  // namespace detail

/// Parses the ten-column metadata CSV into an unsplit corpus.
inline ParsedCorpus parse_metadata(std::string_view csv_bytes) {
  auto rows = csv::parse(csv_bytes);
  if (rows.empty()) throw SchemaError("metadata CSV has no header row");

  std::array<std::size_t, kMetadataColumns.size()> col{};
  for (std::size_t c = 0; c < kMetadataColumns.size(); ++c) {
    auto it = std::find_if(rows[0].begin(), rows[0].end(), [&](const std::string& h) {
      return detail::upper_trimmed(h) == kMetadataColumns[c];
    });
    if (it == rows[0].end())
      throw SchemaError("metadata CSV is missing required column " +
                        std::string(kMetadataColumns[c]));
    col[c] = static_cast<std::size_t>(it - rows[0].begin());
  }

  ParsedCorpus out;
  std::unordered_map<std::string, std::size_t> seen;  // id -> row
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t row_no = r + 1;
    auto get = [&](std::size_t c) -> std::string {
      return col[c] < row.size() ? row[col[c]] : std::string();
    };
    ArtworkTriplet t;
    t.id = get(0);
    t.image_ref = get(1);
    t.comment = get(2);
    t.attributes = {get(3), get(4), get(5), get(6), get(7), get(8), get(9)};

    if (detail::is_blank(t.id)) {
      out.rejected.push_back({row_no, "empty ID"});
      continue;
    }
    if (detail::is_blank(t.comment)) {
      out.rejected.push_back({row_no, "empty COMMENT"});
      continue;
    }
    if (detail::is_blank(t.attributes.title)) {
      out.rejected.push_back({row_no, "empty TITLE"});
      continue;
    }
    auto [it, inserted] = seen.emplace(t.id, row_no);
    if (!inserted)
      throw ConflictError("duplicate ID '" + t.id + "' in rows " +
                          std::to_string(it->second) + " and " + std::to_string(row_no));
    out.corpus.samples.push_back(std::move(t));
  }
  return out;
}

inline ParsedCorpus load_metadata(const std::filesystem::path& path) {
  return parse_metadata(io::read_file(path));
}

/// Writes the corpus back in the canonical column order.
inline std::string serialize_metadata(const Corpus& corpus) {
  std::string out;
  for (std::size_t c = 0; c < kMetadataColumns.size(); ++c) {
    if (c) out.push_back(',');
    out += kMetadataColumns[c];
  }
  out.push_back('\n');
  for (const auto& s : corpus.samples) {
    const auto& a = s.attributes;
    const std::string* fields[] = {&s.id,        &s.image_ref, &s.comment, &a.author,
                                   &a.title,     &a.date,      &a.technique,
                                   &a.type,      &a.school,    &a.timeframe};
    for (std::size_t c = 0; c < std::size(fields); ++c) {
      if (c) out.push_back(',');
      out += csv::quote(*fields[c]);
    }
    out.push_back('\n');
  }
  return out;
}

struct SplitFractions {
  double train = 0.9;
  double val = 0.05;
  double test = 0.05;
};

/// Random disjoint train/val/test split. Val and test get floor(N*f) samples,
/// train takes the remainder. Samples keep their original relative order
/// inside each split.
inline std::array<Corpus, 3> split_corpus(const Corpus& corpus, std::uint64_t seed,
                                          SplitFractions f = {}) {
  if (f.train < 0 || f.val < 0 || f.test < 0)
    throw ArgumentError("split fractions must be non-negative");
  if (std::abs(f.train + f.val + f.test - 1.0) > 1e-9)
    throw ArgumentError("split fractions must sum to 1");
  if (corpus.empty()) throw ArgumentError("cannot split an empty corpus");

  const std::size_t n = corpus.size();
  // Guard against 0.05 * 21382 = 1069.1 style values landing just below an
  // integer due to representation error.
  auto take = [n](double frac) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * frac + 1e-9));
  };
  const std::size_t n_val = take(f.val);
  const std::size_t n_test = take(f.test);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Split> assign(n, Split::kTrain);
  for (std::size_t i = 0; i < n_val; ++i) assign[order[i]] = Split::kVal;
  for (std::size_t i = n_val; i < n_val + n_test; ++i) assign[order[i]] = Split::kTest;

  std::array<Corpus, 3> out;
  out[0].split = Split::kTrain;
  out[1].split = Split::kVal;
  out[2].split = Split::kTest;
  for (std::size_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(assign[i])].samples.push_back(corpus.samples[i]);
  return out;
}

/// Label map over the values of `attribute` present in the corpus. Empty
/// values are not labels and are skipped.
inline LabelMap build_label_maps(const Corpus& corpus, Attribute attribute) {
  std::vector<std::string> values;
  for (const auto& s : corpus.samples) {
    const auto& v = attribute_value(s.attributes, attribute);
    if (!v.empty()) values.push_back(v);
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return LabelMap(attribute, std::move(values));
}

inline LabelMap build_label_maps(const Corpus& corpus, std::string_view attribute) {
  return build_label_maps(corpus, parse_attribute(attribute));
}

// Split manifests: plain text, one id per line.

inline std::string serialize_split_manifest(const Corpus& corpus) {
  std::string out;
  for (const auto& s : corpus.samples) {
    out += s.id;
    out.push_back('\n');
  }
  return out;
}

inline std::vector<std::string> parse_split_manifest(std::string_view text) {
  std::vector<std::string> ids;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) ids.emplace_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return ids;
}

/// Sub-corpus with the given ids, in manifest order.
inline Corpus select_by_ids(const Corpus& corpus, const std::vector<std::string>& ids,
                            std::optional<Split> split) {
  std::unordered_map<std::string_view, std::size_t> by_id;
  for (std::size_t i = 0; i < corpus.samples.size(); ++i) by_id.emplace(corpus.samples[i].id, i);
  Corpus out;
  out.split = split;
  std::unordered_set<std::string_view> taken;
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw SchemaError("split manifest names unknown id '" + id + "'");
    if (!taken.insert(it->first).second)
      throw ConflictError("split manifest lists id '" + id + "' twice");
    out.samples.push_back(corpus.samples[it->second]);
  }
  return out;
}

}  // namespace text2art

#endif  // TEXT2ART_CORPUS_HPP
