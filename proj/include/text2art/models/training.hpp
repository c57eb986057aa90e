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

// Mini-batch training of CML / AMD models with Adam, per-epoch validation
// and best-epoch model selection.

#ifndef TEXT2ART_MODELS_TRAINING_HPP
#define TEXT2ART_MODELS_TRAINING_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "text2art/error.hpp"
#include "text2art/evaluation.hpp"
#include "text2art/models/cml.hpp"
#include "text2art/numeric.hpp"

namespace text2art {

/// Encoded (text, image) training pair; `label` is the attribute class for
/// AMD, -1 when unused.
struct EncodedPair {
  Vector text;
  Vector image;
  int label = -1;
};

struct EncodedSet {
  std::vector<std::string> ids;
  std::vector<EncodedPair> pairs;
  std::size_t comment_dim = 0;  // leading text coordinates that encode the comment

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }
  std::size_t text_dim() const { return pairs.empty() ? 0 : static_cast<std::size_t>(pairs[0].text.size()); }
  std::size_t image_dim() const { return pairs.empty() ? 0 : static_cast<std::size_t>(pairs[0].image.size()); }
};

enum class ModelSelection {
  kBestValMedianRank,  // lowest val MR(t2i) + MR(i2t), ties by lower val loss
  kLastEpoch
};

struct TrainConfig {
  std::size_t batch_size = 32;
  double lr = 1e-4;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  std::size_t negatives_per_positive = 1;
  ModelSelection model_selection = ModelSelection::kBestValMedianRank;
  std::size_t patience = 20;  // epochs without improvement before stopping; 0 disables
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0;
  double val_mr_t2i = 0;
  double val_mr_i2t = 0;
  double val_loss = 0;

  bool operator==(const EpochRecord&) const = default;
};

template <typename Model>
struct TrainResult {
  Model model;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
};

/// `epoch,loss,val_mr_t2i,val_mr_i2t`
inline std::string history_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream out;
  out.precision(10);
  out << "epoch,loss,val_mr_t2i,val_mr_i2t\n";
  for (const auto& r : history)
    out << r.epoch << ',' << r.loss << ',' << r.val_mr_t2i << ',' << r.val_mr_i2t << '\n';
  return out.str();
}

/// Row-stacked projections of every pair in `set`.
template <typename Model>
std::pair<Matrix, Matrix> project_set(const Model& model, const EncodedSet& set) {
  const auto n = static_cast<Eigen::Index>(set.size());
  const auto d = static_cast<Eigen::Index>(model.dim());
  Matrix text(n, d), vis(n, d);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& p = set.pairs[static_cast<std::size_t>(k)];
    text.row(k) = model.embed_text(p.text).transpose();
    vis.row(k) = model.embed_image(p.image).transpose();
  }
  return {std::move(text), std::move(vis)};
}

/// Mean positive loss plus mean negative loss over every off-diagonal pair.
inline double full_margin_loss(const ScoreMatrix& s, double margin) {
  const Eigen::Index n = s.rows();
  double pos = 0, neg = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i == j)
        pos += 1.0 - s(i, j);
      else
        neg += std::max(0.0, s(i, j) - margin);
  pos /= static_cast<double>(n);
  if (n > 1) neg /= static_cast<double>(n * (n - 1));
  return pos + neg;
}

namespace detail {

inline void check_set(const EncodedSet& set, const char* what) {
  for (const auto& p : set.pairs)
    if (static_cast<std::size_t>(p.text.size()) != set.text_dim() ||
        static_cast<std::size_t>(p.image.size()) != set.image_dim())
      throw ArgumentError(std::string(what) + " set has inconsistent encoding dims");
}

// Split a shuffled index list into batches; a trailing singleton joins the
// previous batch since it cannot form a negative.
inline std::vector<std::vector<std::size_t>> make_batches(std::vector<std::size_t> order,
                                                          std::size_t batch_size) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < order.size(); s += batch_size)
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(s),
                     order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), s + batch_size)));
  if (out.size() > 1 && out.back().size() == 1) {
    out[out.size() - 2].push_back(out.back()[0]);
    out.pop_back();
  }
  return out;
}

inline PairBatch sample_batch(const EncodedSet& set, const std::vector<std::size_t>& idx,
                              std::size_t negatives_per_positive, Rng& rng) {
  PairBatch b;
  for (auto k : idx) {
    b.texts.push_back(&set.pairs[k].text);
    b.images.push_back(&set.pairs[k].image);
    b.labels.push_back(set.pairs[k].label);
  }
  const std::size_t n = idx.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < negatives_per_positive; ++r) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 2);
      std::size_t j = pick(rng);
      if (j >= i) ++j;
      b.negatives.emplace_back(i, j);  // text i vs image j
      b.negatives.emplace_back(j, i);  // text j vs image i
    }
  return b;
}

inline constexpr std::uint64_t kShuffleStream = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t kClassifierStream = 0xC2B2AE3D27D4EB4Full;

// Generic loop. `objective(model, batch, grad)` returns the batch loss.
template <typename Model, typename Objective>
TrainResult<Model> run_training(Model model, const EncodedSet& train, const EncodedSet& val,
                                const TrainConfig& cfg, double margin, Objective objective) {
  const bool select_best = cfg.model_selection == ModelSelection::kBestValMedianRank;
  Adam adam({cfg.lr});
  Rng rng(cfg.seed ^ kShuffleStream);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult<Model> result{model, {}, 0};
  double best_mr = std::numeric_limits<double>::infinity();
  double best_val_loss = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0;
    auto batches = make_batches(order, cfg.batch_size);
    for (const auto& idx : batches) {
      PairBatch batch = sample_batch(train, idx, cfg.negatives_per_positive, rng);
      Model grad = model.zeros_like();
      loss_sum += objective(model, batch, &grad);
      auto params = model.parameters();
      auto gparams = grad.parameters();
      std::vector<std::span<const double>> gconst(gparams.begin(), gparams.end());
      adam.step(params, gconst);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss_sum / static_cast<double>(batches.size());
    if (!val.empty()) {
      auto [tp, vp] = project_set(model, val);
      const ScoreMatrix s = score_all(tp, vp);
      rec.val_mr_t2i = median_rank(rank_queries(s, Direction::kTextToImage));
      rec.val_mr_i2t = median_rank(rank_queries(s, Direction::kImageToText));
      rec.val_loss = full_margin_loss(s, margin);
    }
    result.history.push_back(rec);

    if (!select_best) {
      result.model = model;
      result.best_epoch = epoch;
      continue;
    }
    const double mr = rec.val_mr_t2i + rec.val_mr_i2t;
    if (mr < best_mr || (mr == best_mr && rec.val_loss < best_val_loss)) {
      best_mr = mr;
      best_val_loss = rec.val_loss;
      result.model = model;
      result.best_epoch = epoch;
      stale = 0;
    } else if (cfg.patience > 0 && ++stale >= cfg.patience) {
      break;
    }
  }
  if (result.best_epoch == 0) result.model = model;
  return result;
}

inline void validate_training_inputs(const EncodedSet& train, const EncodedSet& val,
                                     const TrainConfig& cfg) {
  if (train.size() < 2) throw ArgumentError("training needs at least two pairs");
  if (cfg.batch_size < 2) throw ArgumentError("batch_size must be >= 2");
  if (cfg.negatives_per_positive == 0) throw ArgumentError("negatives_per_positive must be >= 1");
  if (cfg.lr < 0) throw ArgumentError("learning rate must be non-negative");
  if (cfg.model_selection == ModelSelection::kBestValMedianRank && val.empty())
    throw ArgumentError("validation split is empty; it is needed for model selection");
  check_set(train, "training");
  check_set(val, "validation");
  if (!val.empty() && (val.text_dim() != train.text_dim() || val.image_dim() != train.image_dim()))
    throw ArgumentError("validation encodings do not match training dims");
}

}  // namespace detail

inline TrainResult<CmlModel> train_cml(const EncodedSet& train, const EncodedSet& val,
                                       const TrainConfig& cfg, const CmlConfig& model_cfg) {
  detail::validate_training_inputs(train, val, cfg);
  Rng init(cfg.seed);
  auto model = CmlModel::initialized(model_cfg, train.image_dim(), train.comment_dim,
                                     train.text_dim() - train.comment_dim, init);
  return detail::run_training(std::move(model), train, val, cfg, model_cfg.margin,
                              [](const CmlModel& m, const PairBatch& b, CmlModel* g) {
                                return cml_objective(m, b, g);
                              });
}

/// `labels` names the classes; pair labels index into it.
inline TrainResult<AmdModel> train_amd(const EncodedSet& train, const EncodedSet& val,
                                       const TrainConfig& cfg, const AmdConfig& model_cfg,
                                       Attribute attribute, std::vector<std::string> labels) {
  detail::validate_training_inputs(train, val, cfg);
  if (labels.empty())
    throw ArgumentError("AMD training needs a label map for attribute " +
                        std::string(attribute_name(attribute)));
  if (model_cfg.alpha < 0 || model_cfg.alpha >= 0.5)
    throw ArgumentError("alpha must lie in [0, 0.5)");
  for (const auto& p : train.pairs)
    if (p.label < 0 || static_cast<std::size_t>(p.label) >= labels.size())
      throw ArgumentError("training pair without a valid attribute label");

  Rng init(cfg.seed);
  AmdModel model;
  model.base = CmlModel::initialized(model_cfg.cml, train.image_dim(), train.comment_dim,
                                     train.text_dim() - train.comment_dim, init);
  // Separate stream so the shared towers start exactly as in train_cml.
  Rng clf_rng(cfg.seed ^ detail::kClassifierStream);
  model.text_classifier = Classifier::initialized(model_cfg.cml.dim, labels.size(), clf_rng);
  model.vis_classifier = Classifier::initialized(model_cfg.cml.dim, labels.size(), clf_rng);
  model.alpha = model_cfg.alpha;
  model.attribute = attribute;
  model.labels = std::move(labels);
  return detail::run_training(std::move(model), train, val, cfg, model_cfg.cml.margin,
                              [](const AmdModel& m, const PairBatch& b, AmdModel* g) {
                                return amd_objective(m, b, g);
                              });
}

struct ClassifierAccuracy {
  double text = 0;
  double vis = 0;
};

/// Accuracy of both attribute classifiers on the labelled pairs of `set`.
inline ClassifierAccuracy classifier_accuracy(const AmdModel& model, const EncodedSet& set) {
  std::size_t n = 0, ok_t = 0, ok_v = 0;
  for (const auto& p : set.pairs) {
    if (p.label < 0) continue;
    ++n;
    const auto label = static_cast<std::size_t>(p.label);
    if (model.text_classifier.predict(model.embed_text(p.text)) == label) ++ok_t;
    if (model.vis_classifier.predict(model.embed_image(p.image)) == label) ++ok_v;
  }
  if (n == 0) throw ArgumentError("classifier_accuracy: no labelled pairs");
  return {static_cast<double>(ok_t) / static_cast<double>(n),
          static_cast<double>(ok_v) / static_cast<double>(n)};
}

}  // namespace text2art

#endif  // TEXT2ART_MODELS_TRAINING_HPP
