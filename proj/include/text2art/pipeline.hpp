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

// Glue between the corpus, the encoders and the joint models.

#ifndef TEXT2ART_PIPELINE_HPP
#define TEXT2ART_PIPELINE_HPP

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "text2art/corpus.hpp"
#include "text2art/evaluation.hpp"
#include "text2art/models.hpp"
#include "text2art/text_encoding.hpp"
#include "text2art/visual_features.hpp"

namespace text2art {

struct TextVocabularies {
  Vocabulary comment;
  Vocabulary title;
};

/// t = tfidf(comment) ⊕ tfidf(title).
inline SparseTextVector encode_text(const TextVocabularies& vocabs, std::string_view comment,
                                    std::string_view title) {
  return concat_text(tfidf_encode(comment, vocabs.comment), tfidf_encode(title, vocabs.title));
}

inline Vector to_vector(const SparseTextVector& v) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(v.dim));
  for (const auto& [i, w] : v.entries) out[static_cast<Eigen::Index>(i)] = w;
  return out;
}

inline Vector to_vector(const DenseFeatureVector& v) { return to_vector(std::span<const double>(v.values)); }

/// Feature vector for a sample, looked up by id first and image_ref second.
inline const DenseFeatureVector* find_features(const FeatureStore& store, const ArtworkTriplet& s) {
  if (const auto* v = store.find(s.id)) return v;
  return store.find(s.image_ref);
}

/// Encodes every sample of `corpus`, in order. With `labels`, each pair
/// carries the class index of its attribute value (-1 when unseen).
inline EncodedSet encode_corpus(const Corpus& corpus, const TextVocabularies& vocabs,
                                const FeatureStore& features, const LabelMap* labels = nullptr) {
  EncodedSet out;
  out.comment_dim = vocabs.comment.size();
  std::vector<std::string> missing;
  for (const auto& s : corpus.samples) {
    const auto* f = find_features(features, s);
    if (!f) {
      missing.push_back(s.id);
      continue;
    }
    EncodedPair p;
    p.text = to_vector(encode_text(vocabs, s.comment, s.attributes.title));
    p.image = to_vector(*f);
    if (labels) {
      auto idx = labels->find(attribute_value(s.attributes, labels->attribute()));
      p.label = idx ? *idx : -1;
    }
    out.ids.push_back(s.id);
    out.pairs.push_back(std::move(p));
  }
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " sample(s) have no feature vector, e.g.";
    for (std::size_t i = 0; i < std::min<std::size_t>(3, missing.size()); ++i) msg += " " + missing[i];
    throw SchemaError(msg);
  }
  return out;
}

/// Projection rows for every pair; degenerate projections stay zero rows.
inline std::pair<Matrix, Matrix> project_all(const JointModel& model, const EncodedSet& set) {
  const auto n = static_cast<Eigen::Index>(set.size());
  const auto d = static_cast<Eigen::Index>(joint_dim(model));
  Matrix text(n, d), vis(n, d);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& p = set.pairs[static_cast<std::size_t>(k)];
    text.row(k) = embed_text(model, p.text).values.transpose();
    vis.row(k) = embed_image(model, p.image).values.transpose();
  }
  return {std::move(text), std::move(vis)};
}

inline ScoreMatrix score_model(const JointModel& model, const EncodedSet& set) {
  auto [text, vis] = project_all(model, set);
  return score_all(text, vis);
}

inline RetrievalReport evaluate_model(const JointModel& model, const EncodedSet& set) {
  return evaluate_retrieval(score_model(model, set));
}

/// Pool task over a test corpus and its encoding (same order).
inline PoolReport pool_eval(const JointModel& model, const Corpus& test, const EncodedSet& encoded,
                            const PoolTask& task) {
  if (test.size() != encoded.size()) throw ArgumentError("pool_eval: corpus and encoding differ in size");
  std::vector<std::string> types;
  for (const auto& s : test.samples) types.push_back(s.attributes.type);
  return pool_eval(score_model(model, encoded), types, task);
}

struct RetrievedItem {
  std::string id;
  double score = 0;
};

/// Top-k gallery items for a query projection, scores descending (ties keep
/// gallery order).
inline std::vector<RetrievedItem> top_k(const Vector& query, const Matrix& gallery,
                                        const std::vector<std::string>& ids, std::size_t k) {
  if (static_cast<std::size_t>(gallery.rows()) != ids.size())
    throw ArgumentError("top_k: gallery rows and ids differ");
  const Vector scores = gallery * query;
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[static_cast<Eigen::Index>(a)] > scores[static_cast<Eigen::Index>(b)];
  });
  order.resize(std::min(k, order.size()));
  std::vector<RetrievedItem> out;
  for (auto i : order) out.push_back({ids[i], scores[static_cast<Eigen::Index>(i)]});
  return out;
}

}  // namespace text2art

#endif  // TEXT2ART_PIPELINE_HPP
