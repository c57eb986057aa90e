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

// Scoring, ranking, recall/median rank, the pool task and retrieval helpers.

#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "text2art/evaluation.hpp"
#include "text2art/pipeline.hpp"

namespace {

using namespace text2art;

TEST(ScoreAll, SmallCases) {
  Matrix one(1, 1);
  one << 1.0;
  EXPECT_EQ(score_all(one, one)(0, 0), 1.0);
  EXPECT_EQ(score_all(Matrix::Identity(3, 3), Matrix::Identity(3, 3)), Matrix::Identity(3, 3));
  EXPECT_THROW(score_all(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), ArgumentError);
  EXPECT_THROW(score_all(2 * Matrix::Identity(2, 2), Matrix::Identity(2, 2)), ContractError);
  // A zero row is the degenerate projection and scores 0 everywhere.
  Matrix z = Matrix::Identity(2, 2);
  z.row(1).setZero();
  EXPECT_EQ(score_all(z, Matrix::Identity(2, 2)).row(1).norm(), 0.0);
}

TEST(ScoreAll, NaiveLoopAndTransposeProperty) {
  for (std::uint64_t seed = 0; seed < gen::kPropertySeeds; ++seed) {
    Rng rng(seed);
    const std::size_t n = gen::index(rng, 1, 6), m = gen::index(rng, 1, 6), d = gen::index(rng, 1, 5);
    Matrix a = gen::unit_rows(rng, n, d), b = gen::unit_rows(rng, m, d);
    ScoreMatrix s = score_all(a, b);
    for (Eigen::Index i = 0; i < s.rows(); ++i)
      for (Eigen::Index j = 0; j < s.cols(); ++j) {
        double dot = 0;
        for (Eigen::Index k = 0; k < a.cols(); ++k) dot += a(i, k) * b(j, k);
        EXPECT_NEAR(s(i, j), dot, 1e-14);
        EXPECT_LE(std::abs(s(i, j)), 1.0);
      }
    EXPECT_EQ(score_all(b, a), s.transpose()) << "seed " << seed;
  }
}

TEST(RankQueries, IdentityAndHandCases) {
  auto r = rank_queries(Matrix::Identity(4, 4), Direction::kTextToImage);
  EXPECT_EQ(r, (std::vector<std::size_t>{1, 1, 1, 1}));

  // Truth for query 0 is third best.
  ScoreMatrix s(3, 3);
  s << 0.1, 0.5, 0.3,
       0.0, 0.9, 0.2,
       0.7, 0.0, 0.8;
  EXPECT_EQ(rank_queries(s, Direction::kTextToImage), (std::vector<std::size_t>{3, 1, 1}));
  EXPECT_EQ(rank_queries(s, Direction::kImageToText), (std::vector<std::size_t>{2, 1, 1}));
  EXPECT_THROW(rank_queries(ScoreMatrix::Zero(2, 3), Direction::kTextToImage), ArgumentError);
}

TEST(RankQueries, TiesCountAgainstTheQuery) {
  for (std::size_t n : {1, 2, 7}) {
    ScoreMatrix c = ScoreMatrix::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), 0.3);
    for (auto rank : rank_queries(c, Direction::kTextToImage)) EXPECT_EQ(rank, n);
    for (auto rank : rank_queries(c, Direction::kImageToText)) EXPECT_EQ(rank, n);
  }
}

TEST(RankQueries, MatchesFullSortOracleProperty) {
  for (std::uint64_t seed = 0; seed < gen::kPropertySeeds; ++seed) {
    Rng rng(seed);
    ScoreMatrix s = gen::mat(rng, 50, 50);
    if (seed % 2 == 0) s = (s * 4).array().round() / 4;  // heavy ties
    for (bool t2i : {true, false}) {
      const auto dir = t2i ? Direction::kTextToImage : Direction::kImageToText;
      const auto got = rank_queries(s, dir);
      const auto want = oracle::ranks(s, t2i);
      EXPECT_EQ(got, want) << "seed " << seed;
      for (std::size_t k : {1, 5, 10, 50})
        EXPECT_EQ(recall_at_k(got, k), oracle::recall(want, k));
      EXPECT_EQ(median_rank(got), oracle::median(want));
    }
  }
}

TEST(RankQueries, InvariantUnderMonotoneTransformProperty) {
  for (std::uint64_t seed = 0; seed < gen::kPropertySeeds; ++seed) {
    Rng rng(seed);
    ScoreMatrix s = gen::mat(rng, 12, 12);
    ScoreMatrix t = (3.0 * s.array() + 1.0).exp().matrix();
    EXPECT_EQ(rank_queries(s, Direction::kTextToImage), rank_queries(t, Direction::kTextToImage));
    EXPECT_EQ(rank_queries(s, Direction::kImageToText), rank_queries(t, Direction::kImageToText));
    // i2t ranks of s are the t2i ranks of its transpose.
    ScoreMatrix st = s.transpose();
    EXPECT_EQ(rank_queries(s, Direction::kImageToText), rank_queries(st, Direction::kTextToImage));
  }
}

TEST(Recall, HandCases) {
  const std::vector<std::size_t> r{1, 5, 100};
  EXPECT_DOUBLE_EQ(recall_at_k(r, 1), 1.0 / 3);
  EXPECT_DOUBLE_EQ(recall_at_k(r, 5), 2.0 / 3);
  EXPECT_DOUBLE_EQ(recall_at_k(r, 10), 2.0 / 3);
  EXPECT_DOUBLE_EQ(median_rank(r), 5.0);
  EXPECT_EQ(recall_at_k({1, 1, 1, 1}, 1), 1.0);
  EXPECT_EQ(median_rank({1, 1, 1, 1}), 1.0);
  EXPECT_EQ(median_rank({4, 1, 2, 9}), 3.0);
  EXPECT_THROW(recall_at_k({}, 1), ArgumentError);
  EXPECT_THROW(median_rank({}), ArgumentError);
}

TEST(Recall, MonotoneInKProperty) {
  for (std::uint64_t seed = 0; seed < gen::kPropertySeeds; ++seed) {
    Rng rng(seed);
    const std::size_t n = gen::index(rng, 1, 40);
    std::vector<std::size_t> r(n);
    for (auto& x : r) x = gen::index(rng, 1, n);
    double prev = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      const double v = recall_at_k(r, k);
      EXPECT_GE(v, prev);
      prev = v;
    }
    EXPECT_EQ(recall_at_k(r, n), 1.0);
    const double mr = median_rank(r);
    EXPECT_GE(mr, 1.0);
    EXPECT_LE(mr, static_cast<double>(n));
  }
}

TEST(Report, CsvAndTable) {
  ScoreMatrix s = ScoreMatrix::Identity(4, 4);
  s(0, 1) = 2.0;  // query 0 ranks 2nd in t2i; image 1 ranks 2nd in i2t
  auto rep = evaluate_retrieval(s);
  EXPECT_EQ(rep.t2i.r_at.at(1), 0.75);
  EXPECT_EQ(rep.t2i.n_queries, 4u);
  EXPECT_EQ(report_csv(rep),
            "metric,direction,value\n"
            "R@1,t2i,0.75\nR@5,t2i,1\nR@10,t2i,1\nMR,t2i,1\n"
            "R@1,i2t,0.75\nR@5,i2t,1\nR@10,i2t,1\nMR,i2t,1\n");
  const std::string table = report_table(rep, "toy");
  EXPECT_NE(table.find("Text-to-Image"), std::string::npos);
  EXPECT_NE(table.find("toy          | 0.7500 1.0000 1.0000 1.0"), std::string::npos) << table;
}

TEST(RandomBaseline, SmallNIsNearChance) {
  auto rep = random_baseline(20, 300, 5);
  EXPECT_NEAR(rep.t2i.r_at.at(1), 1.0 / 20, 0.01);
  EXPECT_NEAR(rep.i2t.r_at.at(5), 5.0 / 20, 0.02);
  EXPECT_NEAR(rep.t2i.median_rank, 10.5, 1.0);
  EXPECT_EQ(rep.t2i.n_queries, 20u);
  EXPECT_THROW(random_baseline(0, 1, 0), ArgumentError);
}

// --- pool task -------------------------------------------------------------

std::vector<std::string> cycle_types(std::size_t n, std::size_t k) {
  std::vector<std::string> t;
  for (std::size_t i = 0; i < n; ++i) t.push_back("type" + std::to_string(i % k));
  return t;
}

TEST(PoolEval, StrictDiagonalAlwaysWins) {
  ScoreMatrix s = ScoreMatrix::Identity(30, 30);
  auto rep = pool_eval(s, cycle_types(30, 3), {PoolLevel::kEasy, 10, 100, 1});
  EXPECT_EQ(rep.answered, 100u);
  EXPECT_EQ(rep.accuracy(), 1.0);
  std::size_t total = 0;
  for (const auto& [type, st] : rep.per_type) total += st.total;
  EXPECT_EQ(total, 100u);
}

TEST(PoolEval, TiesWithADistractorAreWrong) {
  ScoreMatrix s = ScoreMatrix::Constant(10, 10, 0.5);
  auto rep = pool_eval(s, cycle_types(10, 1), {PoolLevel::kEasy, 10, 20, 2});
  EXPECT_EQ(rep.answered, 20u);
  EXPECT_EQ(rep.correct, 0u);
}

TEST(PoolEval, RandomScorerIsNearOneInTen) {
  Rng rng(11);
  ScoreMatrix s = gen::mat(rng, 200, 200);
  auto rep = pool_eval(s, cycle_types(200, 5), {PoolLevel::kEasy, 10, 1000, 3});
  EXPECT_EQ(rep.answered, 1000u);
  EXPECT_NEAR(rep.accuracy(), 0.1, 0.03);
}

TEST(PoolEval, DifficultPoolsOnlyUseSameTypeDistractors) {
  // Each query's truth scores 0.5, every same-type image 0, every other-type
  // image 1. Difficult pools contain no other-type image, so they always win;
  // easy pools almost never do.
  const std::size_t n = 40;
  auto types = cycle_types(n, 2);
  ScoreMatrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          i == j ? 0.5 : (types[i] == types[j] ? 0.0 : 1.0);
  auto hard = pool_eval(s, types, {PoolLevel::kDifficult, 10, 100, 4});
  EXPECT_EQ(hard.answered, 100u);
  EXPECT_EQ(hard.accuracy(), 1.0);
  auto easy = pool_eval(s, types, {PoolLevel::kEasy, 10, 100, 4});
  EXPECT_LT(easy.accuracy(), 0.05);
}

TEST(PoolEval, DifficultLevelSkipsSmallTypesWithDiagnostics) {
  std::vector<std::string> types(12, "big");
  types[3] = "rare";
  types[7] = "rare";
  auto rep = pool_eval(ScoreMatrix::Identity(12, 12), types, {PoolLevel::kDifficult, 10, 50, 6});
  EXPECT_EQ(rep.answered + rep.skipped, 50u);
  EXPECT_GT(rep.skipped, 0u);
  EXPECT_EQ(rep.per_type.count("rare"), 0u);
  EXPECT_EQ(rep.diagnostics.size(), 2u);
  for (const auto& d : rep.diagnostics) {
    EXPECT_NE(d.find("'rare'"), std::string::npos) << d;
    EXPECT_NE(d.find("only 1 distractors"), std::string::npos) << d;
  }
}

TEST(PoolEval, DeterministicAndValidated) {
  Rng rng(12);
  ScoreMatrix s = gen::mat(rng, 25, 25);
  auto types = cycle_types(25, 4);
  PoolTask task{PoolLevel::kEasy, 10, 60, 9};
  auto a = pool_eval(s, types, task), b = pool_eval(s, types, task);
  EXPECT_EQ(a.correct, b.correct);
  EXPECT_THROW(pool_eval(s, cycle_types(24, 4), task), ArgumentError);
  EXPECT_THROW(pool_eval(s, types, {PoolLevel::kEasy, 1, 10, 0}), ArgumentError);
  EXPECT_THROW(pool_eval(ScoreMatrix::Zero(2, 3), {"a", "b"}, task), ArgumentError);
}

// --- pipeline helpers -----------------------------------------------------------

TEST(TopK, OrderAndTruncation) {
  Matrix g(4, 2);
  g << 1, 0,
       0, 1,
       std::sqrt(0.5), std::sqrt(0.5),
       -1, 0;
  std::vector<std::string> ids{"a", "b", "c", "d"};
  auto top = top_k(Vector::Unit(2, 0), g, ids, 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].id, "a");
  EXPECT_EQ(top[1].id, "c");
  auto all = top_k(Vector::Unit(2, 0), g, ids, 100);
  ASSERT_EQ(all.size(), 4u);
  EXPECT_EQ(all[3].id, "d");
  EXPECT_EQ(all[1].id, "c");
  EXPECT_EQ(all[2].id, "b");
  EXPECT_THROW(top_k(Vector::Unit(2, 0), g, {"a"}, 1), ArgumentError);
}

TEST(EncodeCorpus, FeaturesByIdOrImageRefAndMissingError) {
  SyntheticConfig cfg;
  cfg.n_samples = 16;
  auto syn = make_synthetic_corpus(cfg);
  TextVocabularies v{build_comment_vocab(syn.corpus, 2), build_title_vocab(syn.corpus)};
  auto set = encode_corpus(syn.corpus, v, syn.features);
  EXPECT_EQ(set.size(), 16u);
  EXPECT_EQ(set.comment_dim, v.comment.size());
  EXPECT_EQ(set.text_dim(), v.comment.size() + v.title.size());
  EXPECT_EQ(set.pairs[0].label, -1);

  FeatureStore by_ref(syn.features.dim());
  for (const auto& s : syn.corpus.samples) by_ref.add(s.image_ref, syn.features.at(s.id));
  EXPECT_EQ(encode_corpus(syn.corpus, v, by_ref).pairs[5].image, set.pairs[5].image);

  FeatureStore partial(syn.features.dim());
  partial.add(syn.corpus.samples[0].id, syn.features.at(syn.corpus.samples[0].id));
  try {
    encode_corpus(syn.corpus, v, partial);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("15 sample(s)"), std::string::npos) << e.what();
  }
}

TEST(EncodeText, ConcatenatesCommentAndTitle) {
  auto s = gen::synthetic_splits();
  const auto& sample = s.parts[0].samples[0];
  Vector t = to_vector(encode_text(s.vocabs, sample.comment, sample.attributes.title));
  EXPECT_EQ(t, s.train.pairs[0].text);
  EXPECT_NEAR(t.head(static_cast<Eigen::Index>(s.train.comment_dim)).norm(), 1.0, 1e-12);
  EXPECT_NEAR(t.tail(static_cast<Eigen::Index>(s.vocabs.title.size())).norm(), 1.0, 1e-12);
}

}  // namespace
