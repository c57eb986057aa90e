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

// Twin-tower joint embedding models trained with the cosine margin loss,
// optionally with attribute classifiers on the projections (AMD), and their
// mini-batch objective with analytic gradients.

#ifndef TEXT2ART_MODELS_CML_HPP
#define TEXT2ART_MODELS_CML_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "text2art/corpus.hpp"
#include "text2art/error.hpp"
#include "text2art/models/projection.hpp"
#include "text2art/numeric.hpp"

namespace text2art {

struct CmlConfig {
  std::size_t dim = 128;
  double margin = 0.1;
  TextArch arch = TextArch::kBow;
  std::size_t mlp_dim = 128;  // output width of the comment/title encoders
};

struct CmlModel {
  ProjectionHead vis_head;
  TextTower text_tower;
  double margin = 0.1;

  static CmlModel initialized(const CmlConfig& cfg, std::size_t image_dim, std::size_t comment_dim,
                              std::size_t title_dim, Rng& rng) {
    if (cfg.margin < 0 || cfg.margin >= 1) throw ArgumentError("margin must lie in [0, 1)");
    CmlModel m;
    m.margin = cfg.margin;
    m.vis_head = ProjectionHead::initialized(image_dim, cfg.dim, rng);
    m.text_tower =
        TextTower::initialized(cfg.arch, comment_dim, title_dim, cfg.mlp_dim, cfg.dim, rng);
    return m;
  }

  std::size_t dim() const noexcept { return vis_head.out_dim(); }

  Vector embed_image(const Vector& i) const { return vis_head.forward(i); }
  Vector embed_text(const Vector& t) const { return text_tower.forward(t); }

  CmlModel zeros_like() const {
    CmlModel g = *this;
    g.vis_head.W.setZero();
    g.vis_head.b.setZero();
    g.text_tower = text_tower.zeros_like();
    return g;
  }

  std::vector<std::span<double>> parameters() {
    std::vector<std::span<double>> out;
    vis_head.collect(out);
    text_tower.collect(out);
    return out;
  }
};

/// Bias-carrying linear classifier without activation.
struct Classifier {
  Matrix W;  // classes x dim
  Vector b;

  static Classifier initialized(std::size_t dim, std::size_t classes, Rng& rng) {
    if (classes == 0) throw ArgumentError("classifier needs at least one class");
    Classifier c{Matrix(static_cast<Eigen::Index>(classes), static_cast<Eigen::Index>(dim)),
                 Vector(static_cast<Eigen::Index>(classes))};
    const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
    fill_uniform(c.W, bound, rng);
    fill_uniform(c.b, bound, rng);
    return c;
  }

  std::size_t classes() const noexcept { return static_cast<std::size_t>(W.rows()); }
  Vector logits(const Vector& p) const { return linear(W, b, p); }

  std::size_t predict(const Vector& p) const {
    Eigen::Index best = 0;
    logits(p).maxCoeff(&best);
    return static_cast<std::size_t>(best);
  }
};

struct AmdConfig {
  CmlConfig cml;
  double alpha = 0.01;
};

struct AmdModel {
  CmlModel base;
  Classifier text_classifier;
  Classifier vis_classifier;
  double alpha = 0.01;
  Attribute attribute = Attribute::kType;
  std::vector<std::string> labels;  // class index -> attribute value

  std::size_t dim() const noexcept { return base.dim(); }
  Vector embed_image(const Vector& i) const { return base.embed_image(i); }
  Vector embed_text(const Vector& t) const { return base.embed_text(t); }

  AmdModel zeros_like() const {
    AmdModel g = *this;
    g.base = base.zeros_like();
    g.text_classifier.W.setZero();
    g.text_classifier.b.setZero();
    g.vis_classifier.W.setZero();
    g.vis_classifier.b.setZero();
    return g;
  }

  std::vector<std::span<double>> parameters() {
    auto out = base.parameters();
    out.push_back(as_span(text_classifier.W));
    out.push_back(as_span(text_classifier.b));
    out.push_back(as_span(vis_classifier.W));
    out.push_back(as_span(vis_classifier.b));
    return out;
  }
};

/// One mini-batch. Item k pairs texts[k] with images[k]; every item is a
/// positive pair, and `negatives` lists (text index, image index) pairs with
/// distinct indices.
struct PairBatch {
  std::vector<const Vector*> texts;
  std::vector<const Vector*> images;
  std::vector<int> labels;  // per item, AMD only
  std::vector<std::pair<std::size_t, std::size_t>> negatives;

  std::size_t size() const noexcept { return texts.size(); }
};

namespace detail {

// Shared forward/backward for CML and AMD. `clf_*` are null for plain CML.
// Loss is the mean over all pair terms (positives + negatives); the
// classifier terms ride along with the positive terms.
inline double joint_objective(const CmlModel& model, const PairBatch& batch,
                              const Classifier* clf_text, const Classifier* clf_vis, double alpha,
                              CmlModel* grad, Classifier* grad_clf_text,
                              Classifier* grad_clf_vis) {
  const std::size_t n = batch.size();
  if (n == 0 || batch.images.size() != n) throw ArgumentError("objective: malformed batch");
  const bool amd = clf_text != nullptr;
  if (amd && batch.labels.size() != n) throw ArgumentError("objective: AMD batch needs labels");

  std::vector<TowerCache> tcache(n);
  std::vector<HeadCache> vcache(n);
  std::vector<Vector> pt(n), pv(n);
  for (std::size_t i = 0; i < n; ++i) {
    pt[i] = model.text_tower.forward(*batch.texts[i], tcache[i]);
    pv[i] = model.vis_head.forward(*batch.images[i], vcache[i]);
  }

  const double w = 1.0 - 2.0 * alpha;
  const double terms = static_cast<double>(n + batch.negatives.size());
  const double inv = 1.0 / terms;
  const Eigen::Index D = static_cast<Eigen::Index>(model.dim());
  std::vector<Vector> gt(n, Vector::Zero(D)), gv(n, Vector::Zero(D));
  double loss = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const double c = pt[i].dot(pv[i]);
    loss += w * (1.0 - c);
    gt[i] -= (w * inv) * pv[i];
    gv[i] -= (w * inv) * pt[i];
    if (amd) {
      const auto label = batch.labels[i];
      if (label < 0 || static_cast<std::size_t>(label) >= clf_text->classes())
        throw ArgumentError("objective: label " + std::to_string(label) + " out of range");
      const auto cls = static_cast<std::size_t>(label);
      const Vector lt = clf_text->logits(pt[i]);
      const Vector lv = clf_vis->logits(pv[i]);
      loss += alpha * cross_entropy(lt, cls);
      loss += alpha * cross_entropy(lv, cls);
      const Vector dlt = (alpha * inv) * cross_entropy_backward(lt, cls);
      const Vector dlv = (alpha * inv) * cross_entropy_backward(lv, cls);
      if (grad) {
        gt[i] += linear_backward(clf_text->W, pt[i], dlt, grad_clf_text->W, grad_clf_text->b);
        gv[i] += linear_backward(clf_vis->W, pv[i], dlv, grad_clf_vis->W, grad_clf_vis->b);
      }
    }
  }
  for (auto [ti, vi] : batch.negatives) {
    if (ti >= n || vi >= n || ti == vi) throw ArgumentError("objective: bad negative pair");
    const double c = pt[ti].dot(pv[vi]);
    if (c > model.margin) {
      loss += w * (c - model.margin);
      gt[ti] += (w * inv) * pv[vi];
      gv[vi] += (w * inv) * pt[ti];
    }
  }

  if (grad) {
    for (std::size_t i = 0; i < n; ++i) {
      model.text_tower.backward(*batch.texts[i], tcache[i], gt[i], grad->text_tower);
      model.vis_head.backward(*batch.images[i], vcache[i], gv[i], grad->vis_head);
    }
  }
  return loss * inv;
}

}  // namespace detail

/// Mean cosine margin loss over the batch; accumulates gradients into `grad`
/// when given (shaped like `model`, e.g. from zeros_like()).
inline double cml_objective(const CmlModel& model, const PairBatch& batch,
                            CmlModel* grad = nullptr) {
  return detail::joint_objective(model, batch, nullptr, nullptr, 0.0, grad, nullptr, nullptr);
}

/// AMD batch objective: (1 - 2 alpha) weighted margin terms plus alpha
/// weighted classifier cross entropy on both projections of each positive.
inline double amd_objective(const AmdModel& model, const PairBatch& batch,
                            AmdModel* grad = nullptr) {
  return detail::joint_objective(model.base, batch, &model.text_classifier,
                                 &model.vis_classifier, model.alpha,
                                 grad ? &grad->base : nullptr,
                                 grad ? &grad->text_classifier : nullptr,
                                 grad ? &grad->vis_classifier : nullptr);
}

}  // namespace text2art

#endif  // TEXT2ART_MODELS_CML_HPP
