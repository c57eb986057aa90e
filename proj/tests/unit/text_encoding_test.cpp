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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "text2art/text_encoding.hpp"

namespace {

using namespace text2art;
using Tokens = std::vector<std::string>;

Corpus corpus_of(const std::vector<std::string>& comments,
                 const std::vector<std::string>& titles = {}) {
  Corpus c;
  for (std::size_t i = 0; i < comments.size(); ++i) {
    ArtworkTriplet t;
    t.id = "d" + std::to_string(i);
    t.comment = comments[i];
    t.attributes.title = i < titles.size() ? titles[i] : "Untitled";
    c.samples.push_back(t);
  }
  return c;
}

// --- tokenize -----------------------------------------------------------------

TEST(Tokenize, PunctuationAndDigitsSeparate) {
  EXPECT_EQ(tokenize("Still-Life, 1890!"), (Tokens{"still", "life"}));
}

TEST(Tokenize, EmptyText) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, ApostropheSplits) {
  EXPECT_EQ(tokenize("Van Gogh's Portrait"), (Tokens{"van", "gogh", "s", "portrait"}));
}

TEST(Tokenize, AccentedLettersAreLetters) {
  EXPECT_EQ(tokenize("Gemäldegalerie"), (Tokens{"gemäldegalerie"}));
  EXPECT_EQ(tokenize("ÉCOLE de Fontainebleau"), (Tokens{"école", "de", "fontainebleau"}));
  EXPECT_EQ(tokenize("a—b"), (Tokens{"a", "b"}));  // dash is not a letter
}

// --- vocabularies -------------------------------------------------------------

TEST(CommentVocab, TwelveIdenticalDocuments) {
  auto v = build_comment_vocab(corpus_of(std::vector<std::string>(12, "madonna")), 10);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.terms()[0], "madonna");
  EXPECT_EQ(v.doc_freq(0), 12u);
  EXPECT_EQ(v.n_docs(), 12u);
}

TEST(CommentVocab, NineDocumentsIsBelowThreshold) {
  std::vector<std::string> docs(20, "common");
  for (int i = 0; i < 9; ++i) docs[static_cast<std::size_t>(i)] += " rare";
  auto v = build_comment_vocab(corpus_of(docs), 10);
  EXPECT_TRUE(v.find("common").has_value());
  EXPECT_FALSE(v.find("rare").has_value());
}

TEST(CommentVocab, CountsDocumentsNotOccurrences) {
  std::vector<std::string> docs(10, "x");
  docs[0] = "gold gold gold gold gold gold gold gold gold gold gold";
  auto v = build_comment_vocab(corpus_of(docs), 10);
  EXPECT_FALSE(v.find("gold").has_value());
}

TEST(CommentVocab, CapMatchesBruteForceTally) {
  for (std::uint64_t seed = 0; seed < gen::kPropertySeeds; ++seed) {
    Rng rng(seed);
    std::vector<std::string> docs;
    std::vector<Tokens> tokenized;
    for (int d = 0; d < 50; ++d) {
      Tokens toks;
      std::string text;
      for (std::size_t i = gen::index(rng, 0, 12); i > 0; --i) {
        toks.push_back(gen::word(rng, 5, 2));
        text += toks.back() + (i % 3 ? " " : ", ");
      }
      docs.push_back(text);
      tokenized.push_back(toks);
    }
    auto v = build_comment_vocab(corpus_of(docs), 1, 5);

    // Oracle: rank (df desc, term asc), keep five, report in term order.
    auto df = oracle::doc_freq(tokenized);
    std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (ranked.size() > 5) ranked.resize(5);
    std::sort(ranked.begin(), ranked.end());

    ASSERT_EQ(v.size(), ranked.size()) << "seed " << seed;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      EXPECT_EQ(v.terms()[i], ranked[i].first) << "seed " << seed;
      EXPECT_EQ(v.doc_freq(i), ranked[i].second);
    }
  }
}

TEST(CommentVocab, EmptyCorpusIsAnError) {
  EXPECT_THROW(build_comment_vocab(Corpus{}), ArgumentError);
  EXPECT_THROW(build_title_vocab(Corpus{}), ArgumentError);
}

TEST(TitleVocab, TwoTitles) {
  auto v = build_title_vocab(corpus_of({"x", "y"}, {"Portrait", "Portrait of a Girl"}));
  EXPECT_EQ(v.terms(), (Tokens{"a", "girl", "of", "portrait"}));
  EXPECT_EQ(v.doc_freq(*v.find("portrait")), 2u);
}

TEST(TitleVocab, EmptyAfterTokenizingFailsAtEncodeTime) {
  Vocabulary v;
  ASSERT_NO_THROW(v = build_title_vocab(corpus_of({"x"}, {"1890 - ?"})));
  EXPECT_TRUE(v.empty());
  EXPECT_THROW(tfidf_encode("anything", v), SchemaError);
}

TEST(TitleVocab, MatchesSetUnion) {
  for (std::uint64_t seed = 0; seed < gen::kPropertySeeds; ++seed) {
    Rng rng(seed);
    std::vector<std::string> titles;
    std::set<std::string> expected;
    for (int i = 0; i < 20; ++i) {
      std::string t;
      for (std::size_t w = gen::index(rng, 1, 5); w > 0; --w) {
        auto word = gen::word(rng);
        expected.insert(word);
        word[0] = static_cast<char>(word[0] - 'a' + 'A');
        t += word + (w > 1 ? " " : "");
      }
      titles.push_back(t);
    }
    auto v = build_title_vocab(corpus_of(std::vector<std::string>(20, "c"), titles));
    EXPECT_EQ(v.terms(), Tokens(expected.begin(), expected.end())) << "seed " << seed;
  }
}

TEST(VocabularyFile, RoundTripAndMalformedInput) {
  auto v = build_title_vocab(corpus_of({"x", "y", "z"}, {"Saint Jerome", "Saint Anne", "Venus"}));
  EXPECT_EQ(parse_vocabulary(serialize_vocabulary(v)), v);
  EXPECT_EQ(serialize_vocabulary(v).substr(0, 9), "#ndocs=3\n");
  EXPECT_THROW(parse_vocabulary("anne\t1\n"), SchemaError);
  EXPECT_THROW(parse_vocabulary("#ndocs=3\nanne 1\n"), SchemaError);
  EXPECT_THROW(parse_vocabulary("#ndocs=3\nanne\t4\n"), SchemaError);
  EXPECT_THROW(parse_vocabulary("#ndocs=3\nanne\t1\nanne\t2\n"), ConflictError);
}

// --- tf-idf -------------------------------------------------------------------

TEST(Tfidf, AllOutOfVocabularyIsZero) {
  auto v = build_title_vocab(corpus_of({"x", "y"}, {"Saint Jerome", "Venus"}));
  auto e = tfidf_encode("completely unknown words", v);
  EXPECT_TRUE(e.is_zero());
  EXPECT_EQ(e.dim, v.size());
}

TEST(Tfidf, SingleTokenHasUnitWeight) {
  auto v = build_title_vocab(corpus_of({"x", "y"}, {"Saint Jerome", "Venus"}));
  auto e = tfidf_encode("Jerome!", v);
  ASSERT_EQ(e.entries.size(), 1u);
  EXPECT_EQ(e.entries[0].first, *v.find("jerome"));
  EXPECT_DOUBLE_EQ(e.entries[0].second, 1.0);
}

TEST(Tfidf, ThreeDocumentToyCorpus) {
  // df: apple 2, banana 2, cherry 1, date 1; N = 3.
  auto v = build_comment_vocab(
      corpus_of({"apple banana", "apple cherry cherry", "banana date"}), 1);
  ASSERT_EQ(v.terms(), (Tokens{"apple", "banana", "cherry", "date"}));
  auto e = tfidf_encode("Cherry, apple; cherry.", v);
  const double w_apple = 1 * std::log(3.0 / 2.0);
  const double w_cherry = 2 * std::log(3.0 / 1.0);
  const double norm = std::sqrt(w_apple * w_apple + w_cherry * w_cherry);
  ASSERT_EQ(e.entries.size(), 2u);
  EXPECT_EQ(e.entries[0].first, 0u);
  EXPECT_EQ(e.entries[1].first, 2u);
  EXPECT_NEAR(e.entries[0].second * norm, w_apple, 1e-12);
  EXPECT_NEAR(e.entries[1].second * norm, w_cherry, 1e-12);
}

struct RandomVocab {
  Vocabulary vocab;
  std::vector<std::string> docs;
};

RandomVocab random_vocab(Rng& rng) {
  RandomVocab out;
  const std::size_t n = gen::index(rng, 2, 30);
  for (std::size_t d = 0; d < n; ++d) {
    std::string text = "ubiquitous";  // in every document
    for (std::size_t i = gen::index(rng, 0, 10); i > 0; --i) text += " " + gen::word(rng, 6, 2);
    out.docs.push_back(text);
  }
  out.vocab = build_comment_vocab(corpus_of(out.docs), 1);
  return out;
}

TEST(Tfidf, NormIsZeroOrOneProperty) {
  for (std::uint64_t seed = 0; seed < gen::kPropertySeeds; ++seed) {
    Rng rng(seed);
    auto rv = random_vocab(rng);
    std::string query;
    for (std::size_t i = gen::index(rng, 0, 8); i > 0; --i) query += gen::word(rng, 8, 2) + " ";
    auto e = tfidf_encode(query, rv.vocab);
    const double n = e.norm();
    EXPECT_TRUE(n == 0.0 || std::abs(n - 1.0) < 1e-6) << "seed " << seed << " norm " << n;
    for (std::size_t i = 1; i < e.entries.size(); ++i)
      EXPECT_LT(e.entries[i - 1].first, e.entries[i].first);
    for (const auto& [idx, w] : e.entries) {
      EXPECT_LT(idx, e.dim);
      EXPECT_GT(w, 0.0);
    }
  }
}

TEST(Tfidf, TermInEveryDocumentNeverAppearsProperty) {
  for (std::uint64_t seed = 0; seed < gen::kPropertySeeds; ++seed) {
    Rng rng(seed);
    auto rv = random_vocab(rng);
    const auto idx = rv.vocab.find("ubiquitous");
    ASSERT_TRUE(idx.has_value());
    EXPECT_EQ(rv.vocab.idf(*idx), 0.0);
    for (const auto& doc : rv.docs)
      for (const auto& [i, w] : tfidf_encode(doc, rv.vocab).entries) EXPECT_NE(i, *idx);
  }
}

TEST(Tfidf, InvariantToOrderAndPunctuationProperty) {
  for (std::uint64_t seed = 0; seed < gen::kPropertySeeds; ++seed) {
    Rng rng(seed);
    auto rv = random_vocab(rng);
    auto toks = tokenize(rv.docs[gen::index(rng, 0, rv.docs.size() - 1)]);
    std::string plain, noisy;
    for (const auto& t : toks) plain += t + " ";
    std::shuffle(toks.begin(), toks.end(), rng);
    const char* seps[] = {", ", "! ", "--", " 42 ", "'", "\n"};
    for (const auto& t : toks) {
      std::string upper = t;
      upper[0] = static_cast<char>(upper[0] - 'a' + 'A');
      noisy += upper + seps[gen::index(rng, 0, 5)];
    }
    EXPECT_EQ(tfidf_encode(plain, rv.vocab), tfidf_encode(noisy, rv.vocab)) << "seed " << seed;
  }
}

// --- concatenation ------------------------------------------------------------

TEST(ConcatText, Dimensions) {
  SparseTextVector c{3, {{1, 1.0}}}, a{2, {{0, 1.0}}};
  auto t = concat_text(c, a);
  EXPECT_EQ(t.dim, 5u);
  EXPECT_EQ(t.entries, (std::vector<std::pair<std::size_t, double>>{{1, 1.0}, {3, 1.0}}));
}

TEST(ConcatText, ZeroInputs) {
  auto t = concat_text(SparseTextVector{4, {}}, SparseTextVector{6, {}});
  EXPECT_EQ(t.dim, 10u);
  EXPECT_TRUE(t.is_zero());
}

TEST(ConcatText, MatchesDenseConcatenationProperty) {
  for (std::uint64_t seed = 0; seed < gen::kPropertySeeds; ++seed) {
    Rng rng(seed);
    auto sparse = [&](std::size_t dim) {
      SparseTextVector v{dim, {}};
      for (std::size_t i = 0; i < dim; ++i)
        if (gen::index(rng, 0, 2) == 0) v.entries.emplace_back(i, gen::vec(rng, 1, 0.01, 1.0)[0]);
      return v;
    };
    auto c = sparse(gen::index(rng, 0, 8));
    auto a = sparse(gen::index(rng, 0, 8));
    auto dense = c.to_dense();
    auto tail = a.to_dense();
    dense.insert(dense.end(), tail.begin(), tail.end());
    auto t = concat_text(c, a);
    EXPECT_EQ(t.to_dense(), dense) << "seed " << seed;
    // The comment prefix is carried over exactly.
    SparseTextVector prefix{c.dim, {}};
    for (const auto& e : t.entries)
      if (e.first < c.dim) prefix.entries.push_back(e);
    EXPECT_EQ(prefix, c);
  }
}

}  // namespace
