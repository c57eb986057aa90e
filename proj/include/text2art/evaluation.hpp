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

// Retrieval metrics over a text x image cosine score matrix: ground-truth
// ranks, recall@K, median rank, the uniform-random baseline and the
// 10-candidate pool task.

#ifndef TEXT2ART_EVALUATION_HPP
#define TEXT2ART_EVALUATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "text2art/error.hpp"
#include "text2art/numeric.hpp"

namespace text2art {

/// scores(k, j) = cos(text_k, image_j).
using ScoreMatrix = Matrix;

enum class Direction { kTextToImage, kImageToText };

inline std::string_view direction_name(Direction d) {
  return d == Direction::kTextToImage ? "t2i" : "i2t";
}

/// Pairwise cosines. Rows of both inputs are projections; each must be unit
/// norm, or exactly zero for a degenerate projection.
inline ScoreMatrix score_all(const Matrix& text_projections, const Matrix& vis_projections) {
  if (text_projections.cols() != vis_projections.cols())
    throw ArgumentError("score_all: text and image projections differ in dimension");
  auto check_rows = [](const Matrix& m, const char* what) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double n = m.row(i).norm();
      if (n != 0.0 && std::abs(n - 1.0) > kUnitTolerance)
        throw ContractError(std::string("score_all: ") + what + " row " + std::to_string(i) +
                            " is not unit norm");
    }
  };
  check_rows(text_projections, "text");
  check_rows(vis_projections, "image");
  ScoreMatrix s = text_projections * vis_projections.transpose();
  return s.cwiseMax(-1.0).cwiseMin(1.0);
}

/// 1-based rank of the ground-truth item per query. The truth for query k is
/// item k. Ties count against the query: rank = 1 + #{j != k : s_j >= s_k}.
inline std::vector<std::size_t> rank_queries(const ScoreMatrix& scores, Direction direction) {
  if (scores.rows() != scores.cols())
    throw ArgumentError("rank_queries: score matrix must be square (" +
                        std::to_string(scores.rows()) + "x" + std::to_string(scores.cols()) + ")");
  const Eigen::Index n = scores.rows();
  // Counting j = k as well (s_k >= s_k) supplies the leading 1.
  std::vector<std::size_t> ranks(static_cast<std::size_t>(n));
  if (direction == Direction::kTextToImage) {
    for (Eigen::Index k = 0; k < n; ++k)
      ranks[static_cast<std::size_t>(k)] =
          static_cast<std::size_t>((scores.row(k).array() >= scores(k, k)).count());
  } else {
    // Row-wise sweep; the scores are stored row-major.
    const Eigen::ArrayXd truth = scores.diagonal().array();
    Eigen::Array<std::size_t, Eigen::Dynamic, 1> above = Eigen::Array<std::size_t, Eigen::Dynamic, 1>::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j)
      above += (scores.row(j).transpose().array() >= truth).cast<std::size_t>();
    for (Eigen::Index k = 0; k < n; ++k) ranks[static_cast<std::size_t>(k)] = above[k];
  }
  return ranks;
}

inline double recall_at_k(const std::vector<std::size_t>& ranks, std::size_t k) {
  if (ranks.empty()) throw ArgumentError("recall_at_k: no ranks");
  auto hits = std::count_if(ranks.begin(), ranks.end(), [k](std::size_t r) { return r <= k; });
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

/// Middle order statistic; mean of the two middle ranks for even counts.
inline double median_rank(std::vector<std::size_t> ranks) {
  if (ranks.empty()) throw ArgumentError("median_rank: no ranks");
  const std::size_t n = ranks.size();
  auto mid = ranks.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(ranks.begin(), mid, ranks.end());
  const double upper = static_cast<double>(*mid);
  if (n % 2 == 1) return upper;
  const double lower = static_cast<double>(*std::max_element(ranks.begin(), mid));
  return 0.5 * (lower + upper);
}

inline constexpr std::size_t kRecallCutoffs[] = {1, 5, 10};

struct EvalReport {
  Direction direction = Direction::kTextToImage;
  std::map<std::size_t, double> r_at;
  double median_rank = 0;
  std::size_t n_queries = 0;
};

inline EvalReport make_report(Direction direction, const std::vector<std::size_t>& ranks) {
  EvalReport r;
  r.direction = direction;
  for (auto k : kRecallCutoffs) r.r_at[k] = recall_at_k(ranks, k);
  r.median_rank = median_rank(ranks);
  r.n_queries = ranks.size();
  return r;
}

inline EvalReport evaluate_direction(const ScoreMatrix& scores, Direction direction) {
  return make_report(direction, rank_queries(scores, direction));
}

struct RetrievalReport {
  EvalReport t2i;
  EvalReport i2t;
};

inline RetrievalReport evaluate_retrieval(const ScoreMatrix& scores) {
  return {evaluate_direction(scores, Direction::kTextToImage),
          evaluate_direction(scores, Direction::kImageToText)};
}

/// Means of R@K and MR over `trials` uniform-random n x n score matrices.
inline RetrievalReport random_baseline(std::size_t n, std::size_t trials, std::uint64_t seed) {
  if (n == 0 || trials == 0) throw ArgumentError("random_baseline: need n > 0 and trials > 0");
  Rng rng(seed);
  // 53 random mantissa bits per score: uniform on a 2^-53 grid in [0, 1).
  auto unif = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  ScoreMatrix scores(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  RetrievalReport acc;
  acc.t2i.direction = Direction::kTextToImage;
  acc.i2t.direction = Direction::kImageToText;
  for (auto k : kRecallCutoffs) acc.t2i.r_at[k] = acc.i2t.r_at[k] = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (Eigen::Index i = 0; i < scores.size(); ++i) scores.data()[i] = unif();
    auto rep = evaluate_retrieval(scores);
    for (auto k : kRecallCutoffs) {
      acc.t2i.r_at[k] += rep.t2i.r_at[k];
      acc.i2t.r_at[k] += rep.i2t.r_at[k];
    }
    acc.t2i.median_rank += rep.t2i.median_rank;
    acc.i2t.median_rank += rep.i2t.median_rank;
  }
  const double inv = 1.0 / static_cast<double>(trials);
  for (auto* r : {&acc.t2i, &acc.i2t}) {
    for (auto& [k, v] : r->r_at) v *= inv;
    r->median_rank *= inv;
    r->n_queries = n;
  }
  return acc;
}

// --- pool task --------------------------------------------------------------

enum class PoolLevel { kEasy, kDifficult };

inline std::string_view pool_level_name(PoolLevel l) {
  return l == PoolLevel::kEasy ? "easy" : "difficult";
}

struct PoolTask {
  PoolLevel level = PoolLevel::kEasy;
  std::size_t pool_size = 10;
  std::size_t n_queries = 100;
  std::uint64_t seed = 0;
};

struct PoolTypeStats {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct PoolReport {
  PoolLevel level = PoolLevel::kEasy;
  std::uint64_t seed = 0;
  std::size_t answered = 0;
  std::size_t correct = 0;
  std::size_t skipped = 0;
  std::map<std::string, PoolTypeStats> per_type;
  std::vector<std::string> diagnostics;  // one per distinct skipped query

  double accuracy() const {
    return answered ? static_cast<double>(correct) / static_cast<double>(answered) : 0.0;
  }
};

/// Pick-one-of-N task: for a text query k, the truth image k competes with
/// pool_size-1 distractors (uniform over all other images for the easy
/// level; uniform among images sharing k's type for the difficult level).
/// A query is correct only if the truth strictly outscores every distractor.
/// Queries are drawn without replacement while they last, then with
/// replacement.
inline PoolReport pool_eval(const ScoreMatrix& scores, const std::vector<std::string>& types,
                            const PoolTask& task) {
  if (scores.rows() != scores.cols())
    throw ArgumentError("pool_eval: score matrix must be square");
  const std::size_t n = static_cast<std::size_t>(scores.rows());
  if (types.size() != n) throw ArgumentError("pool_eval: need one type label per sample");
  if (task.pool_size < 2) throw ArgumentError("pool_eval: pool_size must be >= 2");
  if (n == 0) throw ArgumentError("pool_eval: empty test set");

  std::unordered_map<std::string, std::vector<std::size_t>> by_type;
  for (std::size_t i = 0; i < n; ++i) by_type[types[i]].push_back(i);

  Rng rng(task.seed);
  std::vector<std::size_t> queries;
  {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    while (queries.size() < task.n_queries) {
      std::shuffle(all.begin(), all.end(), rng);
      const std::size_t take = std::min(all.size(), task.n_queries - queries.size());
      queries.insert(queries.end(), all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take));
    }
  }

  PoolReport report;
  report.level = task.level;
  report.seed = task.seed;
  const std::size_t need = task.pool_size - 1;
  std::vector<std::size_t> candidates;
  std::vector<bool> reported(n, false);
  for (std::size_t q : queries) {
    candidates.clear();
    if (task.level == PoolLevel::kEasy) {
      for (std::size_t j = 0; j < n; ++j)
        if (j != q) candidates.push_back(j);
    } else {
      for (std::size_t j : by_type[types[q]])
        if (j != q) candidates.push_back(j);
    }
    if (candidates.size() < need) {
      ++report.skipped;
      if (reported[q]) continue;
      reported[q] = true;
      report.diagnostics.push_back("query " + std::to_string(q) + " (type '" + types[q] +
                                   "'): only " + std::to_string(candidates.size()) +
                                   " distractors available, need " + std::to_string(need));
      continue;
    }
    // Partial Fisher-Yates: the first `need` slots become the distractors.
    for (std::size_t i = 0; i < need; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
      std::swap(candidates[i], candidates[pick(rng)]);
    }
    const auto qi = static_cast<Eigen::Index>(q);
    const double truth = scores(qi, qi);
    bool correct = true;
    for (std::size_t i = 0; i < need; ++i)
      if (scores(qi, static_cast<Eigen::Index>(candidates[i])) >= truth) {
        correct = false;
        break;
      }
    ++report.answered;
    auto& stats = report.per_type[types[q]];
    ++stats.total;
    if (correct) {
      ++report.correct;
      ++stats.correct;
    }
  }
  return report;
}

// --- report output ----------------------------------------------------------

/// CSV rows `metric,direction,value`.
inline std::string report_csv(const RetrievalReport& rep) {
  std::ostringstream out;
  out << "metric,direction,value\n";
  out << std::setprecision(10);
  for (const auto* r : {&rep.t2i, &rep.i2t}) {
    for (const auto& [k, v] : r->r_at)
      out << "R@" << k << ',' << direction_name(r->direction) << ',' << v << '\n';
    out << "MR," << direction_name(r->direction) << ',' << r->median_rank << '\n';
  }
  return out.str();
}

/// Two-block table: R@1 R@5 R@10 MR for text-to-image, then image-to-text.
inline std::string report_table(const RetrievalReport& rep, std::string_view label) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "Model" << " | " << std::setw(31) << "Text-to-Image"
      << " | " << "Image-to-Text" << '\n';
  out << std::setw(12) << "" << " | ";
  for (int block = 0; block < 2; ++block) {
    out << std::setw(7) << "R@1" << std::setw(7) << "R@5" << std::setw(7) << "R@10"
        << std::setw(10) << "MR";
    if (block == 0) out << " | ";
  }
  out << '\n' << std::string(80, '-') << '\n';
  out << std::setw(12) << label << " | ";
  out << std::fixed;
  for (const auto* r : {&rep.t2i, &rep.i2t}) {
    out << std::setprecision(4) << std::setw(7) << r->r_at.at(1) << std::setw(7) << r->r_at.at(5)
        << std::setw(7) << r->r_at.at(10) << std::setprecision(1) << std::setw(10)
        << r->median_rank;
    if (r == &rep.t2i) out << " | ";
  }
  out << '\n';
  return out.str();
}

}  // namespace text2art

#endif  // TEXT2ART_EVALUATION_HPP
