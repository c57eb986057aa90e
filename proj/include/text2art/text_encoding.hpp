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

// Bag-of-words text encoding: tokenizer, comment/title vocabularies and
// l2-normalized tf-idf vectors.

#ifndef TEXT2ART_TEXT_ENCODING_HPP
#define TEXT2ART_TEXT_ENCODING_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "text2art/corpus.hpp"
#include "text2art/error.hpp"
#include "text2art/io.hpp"

namespace text2art {

namespace detail {

// Latin-1 supplement and Latin Extended-A letters count as alphabetic;
// everything else outside ASCII is a separator.
inline bool is_latin_letter(char32_t cp) {
  if (cp >= 0xC0 && cp <= 0xFF) return cp != 0xD7 && cp != 0xF7;
  return cp >= 0x100 && cp <= 0x17F;
}

inline char32_t latin_lower(char32_t cp) {
  if (cp >= 0xC0 && cp <= 0xDE) return cp + 0x20;  // D7 is excluded by the caller
  if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) return cp | 1u;
  if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E))
    return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;
  return cp;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Decodes one code point; malformed input yields U+FFFD and advances a byte.
inline char32_t next_code_point(std::string_view s, std::size_t& i) {
  auto b = static_cast<unsigned char>(s[i]);
  if (b < 0x80) {
    ++i;
    return b;
  }
  int len = (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3 : (b >> 3) == 0x1E ? 4 : 0;
  if (len == 0 || i + static_cast<std::size_t>(len) > s.size()) {
    ++i;
    return 0xFFFD;
  }
  char32_t cp = b & (0x7F >> len);
  for (int k = 1; k < len; ++k) {
    auto c = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
    if ((c & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  i += static_cast<std::size_t>(len);
  return cp;
}

}  // namespace detail

/// Lowercased maximal runs of alphabetic characters. Digits, punctuation,
/// apostrophes and whitespace all separate tokens.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = detail::next_code_point(text, i);
    if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) {
      current.push_back(static_cast<char>(cp | 0x20));
    } else if (detail::is_latin_letter(cp)) {
      detail::append_utf8(current, detail::latin_lower(cp));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

class Vocabulary {
 public:
  Vocabulary() = default;

  /// `terms` and `doc_freq` are parallel arrays; term order defines indices.
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint64_t> doc_freq,
             std::uint64_t n_docs)
      : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)), n_docs_(n_docs) {
    if (terms_.size() != doc_freq_.size())
      throw ArgumentError("vocabulary terms and document frequencies differ in length");
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (doc_freq_[i] == 0 || doc_freq_[i] > n_docs_)
        throw SchemaError("document frequency of '" + terms_[i] + "' out of range");
      if (!index_.emplace(terms_[i], i).second)
        throw ConflictError("duplicate vocabulary term '" + terms_[i] + "'");
    }
  }

  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  std::uint64_t n_docs() const noexcept { return n_docs_; }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::uint64_t>& doc_freqs() const noexcept { return doc_freq_; }

  std::optional<std::size_t> find(std::string_view term) const {
    auto it = index_.find(std::string(term));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::uint64_t doc_freq(std::size_t index) const { return doc_freq_.at(index); }

  double idf(std::size_t index) const {
    return std::log(static_cast<double>(n_docs_) / static_cast<double>(doc_freq_.at(index)));
  }

  bool operator==(const Vocabulary& o) const {
    return terms_ == o.terms_ && doc_freq_ == o.doc_freq_ && n_docs_ == o.n_docs_;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint64_t> doc_freq_;
  std::uint64_t n_docs_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Sparse vector with strictly increasing indices and non-negative weights.
struct SparseTextVector {
  std::size_t dim = 0;
  std::vector<std::pair<std::size_t, double>> entries;

  bool is_zero() const noexcept { return entries.empty(); }

  double norm() const {
    double s = 0;
    for (const auto& [i, w] : entries) s += w * w;
    return std::sqrt(s);
  }

  std::vector<double> to_dense() const {
    std::vector<double> out(dim, 0.0);
    for (const auto& [i, w] : entries) out[i] = w;
    return out;
  }

  bool operator==(const SparseTextVector&) const = default;
};

namespace detail {

// Document frequency of every token over a list of documents.
template <typename TextOf>
std::map<std::string, std::uint64_t> document_frequencies(const Corpus& corpus, TextOf text_of) {
  std::map<std::string, std::uint64_t> df;
  for (const auto& s : corpus.samples) {
    auto tokens = tokenize(text_of(s));
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& t : tokens) ++df[t];
  }
  return df;
}

inline Vocabulary vocabulary_from_counts(std::map<std::string, std::uint64_t> df,
                                         std::uint64_t min_count,
                                         std::optional<std::size_t> cap,
                                         std::uint64_t n_docs) {
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [term, count] : df)
    if (count >= min_count) kept.emplace_back(term, count);
  if (cap && kept.size() > *cap) {
    std::stable_sort(kept.begin(), kept.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    kept.resize(*cap);
    std::sort(kept.begin(), kept.end());
  }
  std::vector<std::string> terms;
  std::vector<std::uint64_t> freqs;
  for (auto& [t, c] : kept) {
    terms.push_back(std::move(t));
    freqs.push_back(c);
  }
  return Vocabulary(std::move(terms), std::move(freqs), n_docs);
}

}  // namespace detail

/// Comment vocabulary: terms whose document frequency in `train` reaches
/// `min_count`. With `cap`, only the `cap` most frequent survive (ties go to
/// the lexicographically smaller term). Terms are stored in lexicographic
/// order.
inline Vocabulary build_comment_vocab(const Corpus& train, std::uint64_t min_count = 10,
                                      std::optional<std::size_t> cap = std::nullopt) {
  if (train.empty()) throw ArgumentError("cannot build a vocabulary from an empty corpus");
  auto df = detail::document_frequencies(
      train, [](const ArtworkTriplet& s) -> const std::string& { return s.comment; });
  return detail::vocabulary_from_counts(std::move(df), min_count, cap, train.size());
}

/// Title vocabulary: every alphabetic word of every training title.
inline Vocabulary build_title_vocab(const Corpus& train) {
  if (train.empty()) throw ArgumentError("cannot build a vocabulary from an empty corpus");
  auto df = detail::document_frequencies(train, [](const ArtworkTriplet& s) -> const std::string& {
    return s.attributes.title;
  });
  return detail::vocabulary_from_counts(std::move(df), 1, std::nullopt, train.size());
}

/// tf-idf with raw counts and natural-log idf, then l2-normalized. Text with
/// no weighted in-vocabulary token encodes to the zero vector.
inline SparseTextVector tfidf_encode(std::string_view text, const Vocabulary& vocab) {
  if (vocab.empty()) throw SchemaError("cannot encode against an empty vocabulary");
  std::map<std::size_t, std::uint64_t> counts;
  for (const auto& tok : tokenize(text))
    if (auto idx = vocab.find(tok)) ++counts[*idx];

  SparseTextVector out;
  out.dim = vocab.size();
  double sq = 0;
  for (auto [idx, tf] : counts) {
    double w = static_cast<double>(tf) * vocab.idf(idx);
    if (w <= 0) continue;
    out.entries.emplace_back(idx, w);
    sq += w * w;
  }
  if (!out.entries.empty()) {
    double inv = 1.0 / std::sqrt(sq);
    for (auto& e : out.entries) e.second *= inv;
  }
  return out;
}

/// c ⊕ a. Not renormalized.
inline SparseTextVector concat_text(const SparseTextVector& c, const SparseTextVector& a) {
  SparseTextVector out;
  out.dim = c.dim + a.dim;
  out.entries.reserve(c.entries.size() + a.entries.size());
  out.entries = c.entries;
  for (const auto& [i, w] : a.entries) out.entries.emplace_back(i + c.dim, w);
  return out;
}

// Vocabulary file: "#ndocs=<N>" header, then "term<TAB>doc_freq" per line.

inline std::string serialize_vocabulary(const Vocabulary& vocab) {
  std::string out = "#ndocs=" + std::to_string(vocab.n_docs()) + "\n";
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out += vocab.terms()[i];
    out.push_back('\t');
    out += std::to_string(vocab.doc_freq(i));
    out.push_back('\n');
  }
  return out;
}

inline Vocabulary parse_vocabulary(std::string_view text) {
  auto parse_u64 = [](std::string_view s, std::size_t line) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
      throw SchemaError("vocabulary line " + std::to_string(line) + ": bad count '" +
                        std::string(s) + "'");
    return v;
  };
  std::vector<std::string> terms;
  std::vector<std::uint64_t> freqs;
  std::optional<std::uint64_t> n_docs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (!line.starts_with("#ndocs="))
        throw SchemaError("vocabulary file must start with #ndocs=<N>");
      n_docs = parse_u64(line.substr(7), line_no);
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw SchemaError("vocabulary line " + std::to_string(line_no) + " has no tab");
    terms.emplace_back(line.substr(0, tab));
    freqs.push_back(parse_u64(line.substr(tab + 1), line_no));
  }
  if (!n_docs) throw SchemaError("vocabulary file must start with #ndocs=<N>");
  return Vocabulary(std::move(terms), std::move(freqs), *n_docs);
}

inline void save_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab) {
  io::write_file(path, serialize_vocabulary(vocab));
}

inline Vocabulary load_vocabulary(const std::filesystem::path& path) {
  return parse_vocabulary(io::read_file(path));
}

}  // namespace text2art

#endif  // TEXT2ART_TEXT_ENCODING_HPP
