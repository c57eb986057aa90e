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

// Synthetic artwork corpus with a latent class per sample. Comments are
// bags of class template words plus words from a shared noise pool; titles
// name the class; image features are a class centroid plus Gaussian noise.
// The class doubles as the Type attribute.

#ifndef TEXT2ART_SYNTHETIC_HPP
#define TEXT2ART_SYNTHETIC_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "text2art/corpus.hpp"
#include "text2art/error.hpp"
#include "text2art/visual_features.hpp"

namespace text2art {

struct SyntheticConfig {
  std::size_t n_samples = 256;
  std::size_t n_classes = 8;
  std::size_t image_dim = 256;
  std::size_t template_words = 6;    // distinct words per class
  std::size_t template_tokens = 4;   // drawn per comment
  std::size_t noise_words = 100;     // shared pool
  std::size_t noise_tokens = 10;     // drawn per comment
  double image_noise = 0.5;          // per-coordinate std-dev around the centroid
  std::uint64_t seed = 7;
};

struct SyntheticCorpus {
  Corpus corpus;
  FeatureStore features;
  std::vector<std::size_t> classes;  // latent class per sample
};

namespace detail {

inline std::string letters(std::size_t v, std::size_t width) {
  std::string s(width, 'a');
  for (std::size_t i = width; i-- > 0;) {
    s[i] = static_cast<char>('a' + v % 26);
    v /= 26;
  }
  return s;
}

inline std::string class_name(std::size_t c) {
  static const char* kNames[] = {"landscape", "religious", "mythological", "genre",
                                 "portrait",  "stilllife", "interior",     "historical"};
  if (c < std::size(kNames)) return kNames[c];
  return "kind" + letters(c, 3);
}

}  // namespace detail

inline SyntheticCorpus make_synthetic_corpus(const SyntheticConfig& cfg) {
  if (cfg.n_classes == 0 || cfg.n_samples == 0 || cfg.image_dim == 0 || cfg.template_words == 0)
    throw ArgumentError("synthetic corpus needs non-zero sizes");
  Rng rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::vector<double>> centroids(cfg.n_classes, std::vector<double>(cfg.image_dim));
  for (auto& c : centroids)
    for (auto& x : c) x = gauss(rng);

  SyntheticCorpus out;
  out.features = FeatureStore(static_cast<std::uint32_t>(cfg.image_dim));
  std::uniform_int_distribution<std::size_t> pick_template(0, cfg.template_words - 1);
  std::uniform_int_distribution<std::size_t> pick_noise(0, cfg.noise_words ? cfg.noise_words - 1 : 0);
  const char* kSchools[] = {"Dutch", "Flemish", "Italian"};
  const char* kTimeframes[] = {"1601-1650", "1651-1700"};

  for (std::size_t k = 0; k < cfg.n_samples; ++k) {
    const std::size_t c = k % cfg.n_classes;
    ArtworkTriplet t;
    t.id = "syn" + std::to_string(k);
    t.image_ref = "img" + std::to_string(k);

    std::string comment;
    auto add_word = [&](const std::string& w) {
      if (!comment.empty()) comment += ' ';
      comment += w;
    };
    for (std::size_t i = 0; i < cfg.template_tokens; ++i)
      add_word("t" + detail::letters(c, 2) + detail::letters(pick_template(rng), 2));
    for (std::size_t i = 0; i < cfg.noise_tokens && cfg.noise_words; ++i)
      add_word("n" + detail::letters(pick_noise(rng), 3));
    t.comment = comment + ".";

    const std::string name = detail::class_name(c);
    t.attributes.title = "A " + name + " scene";
    t.attributes.author = "Painter " + detail::letters(c, 1);
    t.attributes.type = name;
    t.attributes.school = kSchools[c % 3];
    t.attributes.timeframe = kTimeframes[c % 2];

    DenseFeatureVector f;
    f.values.resize(cfg.image_dim);
    for (std::size_t d = 0; d < cfg.image_dim; ++d)
      f.values[d] = static_cast<double>(
          static_cast<float>(centroids[c][d] + cfg.image_noise * gauss(rng)));
    out.features.add(t.id, std::move(f));
    out.classes.push_back(c);
    out.corpus.samples.push_back(std::move(t));
  }
  return out;
}

}  // namespace text2art

#endif  // TEXT2ART_SYNTHETIC_HPP
