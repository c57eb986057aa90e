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

#ifndef TEXT2ART_MODELS_LOSSES_HPP
#define TEXT2ART_MODELS_LOSSES_HPP

#include <algorithm>
#include <cstddef>

#include "text2art/numeric.hpp"

namespace text2art {

/// Cosine margin loss for one (image, text) pair of unit projections:
/// 1 - cos for a matching pair, max(0, cos - margin) otherwise.
inline double cml_loss(const Vector& p_vis, const Vector& p_text, bool positive, double margin) {
  const double c = cosine(p_vis, p_text);
  return positive ? 1.0 - c : std::max(0.0, c - margin);
}

/// (1 - 2 alpha) * L_cml + alpha * CE(text logits) + alpha * CE(image logits).
inline double amd_loss(const Vector& p_text, const Vector& p_vis, const Vector& text_logits,
                       const Vector& vis_logits, std::size_t label_text, std::size_t label_vis,
                       bool positive, double margin, double alpha) {
  const double meta_text = cross_entropy(text_logits, label_text);
  const double meta_vis = cross_entropy(vis_logits, label_vis);
  return (1.0 - 2.0 * alpha) * cml_loss(p_vis, p_text, positive, margin) + alpha * meta_text +
         alpha * meta_vis;
}

}  // namespace text2art

#endif  // TEXT2ART_MODELS_LOSSES_HPP
