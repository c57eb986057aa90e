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

#ifndef TEXT2ART_MODELS_PROJECTION_HPP
#define TEXT2ART_MODELS_PROJECTION_HPP

#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "text2art/error.hpp"
#include "text2art/numeric.hpp"

namespace text2art {

struct HeadCache {
  Vector tanh_out;
  Normalized out;
};

/// x -> l2_normalize(tanh(W x + b)). Used for both modality projections and
/// for the trainable comment/title encoders of the MLP text tower.
struct ProjectionHead {
  Matrix W;  // out x in
  Vector b;

  /// Weights and biases drawn from U(-1/sqrt(in), 1/sqrt(in)).
  static ProjectionHead initialized(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
    if (in_dim == 0 || out_dim == 0) throw ArgumentError("projection head needs non-zero dims");
    ProjectionHead h = zeros(in_dim, out_dim);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
    fill_uniform(h.W, bound, rng);
    fill_uniform(h.b, bound, rng);
    return h;
  }

  static ProjectionHead zeros(std::size_t in_dim, std::size_t out_dim) {
    return {Matrix::Zero(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(in_dim)),
            Vector::Zero(static_cast<Eigen::Index>(out_dim))};
  }

  std::size_t in_dim() const noexcept { return static_cast<std::size_t>(W.cols()); }
  std::size_t out_dim() const noexcept { return static_cast<std::size_t>(W.rows()); }

  Vector forward(const Vector& x, HeadCache& cache) const {
    cache.tanh_out = tanh_layer(linear(W, b, x));
    try {
      cache.out = l2_normalize(cache.tanh_out);
    } catch (const DegeneracyError&) {
      throw DegeneracyError("project: tanh output is the zero vector");
    }
    return cache.out.y;
  }

  Vector forward(const Vector& x) const {
    HeadCache cache;
    return forward(x, cache);
  }

  /// Accumulates parameter gradients into `grad`; returns dL/dx.
  Vector backward(const Vector& x, const HeadCache& cache, const Vector& grad_out,
                  ProjectionHead& grad) const {
    Vector g = l2_normalize_backward(cache.out, grad_out);
    g = tanh_backward(cache.tanh_out, g);
    return linear_backward(W, x, g, grad.W, grad.b);
  }

  void collect(std::vector<std::span<double>>& out) {
    out.push_back(as_span(W));
    out.push_back(as_span(b));
  }
};

inline Vector project(const ProjectionHead& head, const Vector& x) { return head.forward(x); }

enum class TextArch {
  kBow,  // projection head directly over the tf-idf concatenation
  kMlp   // comment and title encoders first, then the projection head
};

inline std::string_view arch_name(TextArch a) { return a == TextArch::kBow ? "bow" : "mlp"; }

inline TextArch parse_arch(std::string_view s) {
  if (s == "bow") return TextArch::kBow;
  if (s == "mlp") return TextArch::kMlp;
  throw ArgumentError("unknown text architecture '" + std::string(s) + "' (expected bow or mlp)");
}

struct TowerCache {
  Vector comment_in, title_in, hidden;
  HeadCache comment, title, head;
};

/// Text side of the joint model. Input is t = c ⊕ a with c occupying the
/// first `comment_dim` coordinates.
struct TextTower {
  TextArch arch = TextArch::kBow;
  std::size_t comment_dim = 0;
  ProjectionHead comment_encoder;  // MLP arch only
  ProjectionHead title_encoder;    // MLP arch only
  ProjectionHead head;

  static TextTower initialized(TextArch arch, std::size_t comment_dim, std::size_t title_dim,
                               std::size_t mlp_dim, std::size_t out_dim, Rng& rng) {
    TextTower t;
    t.arch = arch;
    t.comment_dim = comment_dim;
    if (arch == TextArch::kMlp) {
      if (comment_dim == 0 || title_dim == 0)
        throw ArgumentError("MLP text tower needs non-empty comment and title encodings");
      t.comment_encoder = ProjectionHead::initialized(comment_dim, mlp_dim, rng);
      t.title_encoder = ProjectionHead::initialized(title_dim, mlp_dim, rng);
      t.head = ProjectionHead::initialized(2 * mlp_dim, out_dim, rng);
    } else {
      t.head = ProjectionHead::initialized(comment_dim + title_dim, out_dim, rng);
    }
    return t;
  }

  TextTower zeros_like() const {
    TextTower t = *this;
    t.comment_encoder.W.setZero();
    t.comment_encoder.b.setZero();
    t.title_encoder.W.setZero();
    t.title_encoder.b.setZero();
    t.head.W.setZero();
    t.head.b.setZero();
    return t;
  }

  std::size_t in_dim() const noexcept {
    return arch == TextArch::kBow ? head.in_dim()
                                  : comment_encoder.in_dim() + title_encoder.in_dim();
  }

  Vector forward(const Vector& t, TowerCache& cache) const {
    if (static_cast<std::size_t>(t.size()) != in_dim())
      throw ArgumentError("text tower: input has dim " + std::to_string(t.size()) +
                          ", expected " + std::to_string(in_dim()));
    if (arch == TextArch::kBow) return head.forward(t, cache.head);
    const auto cd = static_cast<Eigen::Index>(comment_dim);
    cache.comment_in = t.head(cd);
    cache.title_in = t.tail(t.size() - cd);
    Vector c = comment_encoder.forward(cache.comment_in, cache.comment);
    Vector a = title_encoder.forward(cache.title_in, cache.title);
    cache.hidden.resize(c.size() + a.size());
    cache.hidden << c, a;
    return head.forward(cache.hidden, cache.head);
  }

  Vector forward(const Vector& t) const {
    TowerCache cache;
    return forward(t, cache);
  }

  void backward(const Vector& t, const TowerCache& cache, const Vector& grad_out,
                TextTower& grad) const {
    if (arch == TextArch::kBow) {
      head.backward(t, cache.head, grad_out, grad.head);
      return;
    }
    Vector gh = head.backward(cache.hidden, cache.head, grad_out, grad.head);
    const Eigen::Index mc = static_cast<Eigen::Index>(comment_encoder.out_dim());
    comment_encoder.backward(cache.comment_in, cache.comment, gh.head(mc), grad.comment_encoder);
    title_encoder.backward(cache.title_in, cache.title, gh.tail(gh.size() - mc),
                           grad.title_encoder);
  }

  void collect(std::vector<std::span<double>>& out) {
    if (arch == TextArch::kMlp) {
      comment_encoder.collect(out);
      title_encoder.collect(out);
    }
    head.collect(out);
  }
};

}  // namespace text2art

#endif  // TEXT2ART_MODELS_PROJECTION_HPP
