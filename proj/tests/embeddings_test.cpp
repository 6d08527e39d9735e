#include "densray/embeddings.hpp"
#include "densray/error.hpp"
#include "densray/text.hpp"
#include "support/worlds.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <set>

namespace densray {
namespace {

TEST(Word2VecText, MinimalFile) {
  const Embeddings emb = parse_word2vec_text("2 3\na 1 0 0\nb 0 1 0");
  ASSERT_EQ(emb.size(), 2u);
  EXPECT_EQ(emb.dim(), 3u);
  EXPECT_EQ(emb.vocab[0], "a");
  EXPECT_EQ(emb.vocab[1], "b");
  EXPECT_EQ(emb.vocab.index("b"), 1u);
  EXPECT_EQ(emb.matrix.data()(1, 1), 1.0);
  EXPECT_FALSE(emb.matrix.normalized());
}

TEST(Word2VecText, DuplicateTokenRejected) {
  EXPECT_THROW(parse_word2vec_text("2 3\na 1 0 0\na 0 1 0"), DataError);
}

TEST(Word2VecText, MalformedInputsRejected) {
  EXPECT_THROW(parse_word2vec_text(""), DataError);
  EXPECT_THROW(parse_word2vec_text("2\na 1"), DataError);
  EXPECT_THROW(parse_word2vec_text("2 2\na 1 0"), DataError);            // short file
  EXPECT_THROW(parse_word2vec_text("1 2\na 1 0 0"), DataError);          // too many values
  EXPECT_THROW(parse_word2vec_text("1 2\na 1"), DataError);              // too few values
  EXPECT_THROW(parse_word2vec_text("1 2\na b 1 0"), DataError);          // internal space in token
  EXPECT_THROW(parse_word2vec_text("1 2\na 1 nan"), DataError);
  EXPECT_THROW(parse_word2vec_text("1 2\na 1 inf"), DataError);
  EXPECT_THROW(parse_word2vec_text("1 2\na 1 x"), DataError);
  EXPECT_THROW(parse_word2vec_text("1 2\na 0 0"), DataError);            // zero row
}

TEST(Word2VecText, CrlfAndTrailingSpace) {
  const Embeddings emb = parse_word2vec_text("2 2\r\na 1 0 \r\nb 0.5 -2e-1\r\n");
  ASSERT_EQ(emb.size(), 2u);
  EXPECT_EQ(emb.matrix.data()(1, 1), -0.2);
}

TEST(Word2VecText, TruncationKeepsFileOrder) {
  std::string text = "50 2\n";
  for (int i = 0; i < 50; ++i) text += "t" + std::to_string(i) + " 1 " + std::to_string(i) + "\n";
  const Embeddings emb = parse_word2vec_text(text, LoadOptions{20, false});
  ASSERT_EQ(emb.size(), 20u);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(emb.vocab[i], "t" + std::to_string(i));
  // Rows past the budget are never inspected.
  EXPECT_NO_THROW(parse_word2vec_text("3 1\na 1\nb 2\nc bogus", LoadOptions{2, false}));
}

TEST(Word2VecText, LowercaseKeepsFirstOfCollidingRows) {
  const Embeddings emb = parse_word2vec_text("3 1\nApple 1\napple 2\nPear 3", LoadOptions{{}, true});
  ASSERT_EQ(emb.size(), 2u);
  EXPECT_EQ(emb.vocab[0], "apple");
  EXPECT_EQ(emb.row("apple")[0], 1.0);
  EXPECT_TRUE(emb.vocab.contains("pear"));
  EXPECT_FALSE(parse_word2vec_text("1 1\nApple 1").vocab.contains("apple"));
}

TEST(Word2VecText, RoundTripThroughFile) {
  std::mt19937_64 rng(7);
  std::vector<std::string> words{"x", "y\xc3\xa9", "z"};
  const Embeddings emb = testing::make_embeddings(words, testing::random_gaussian(rng, 3, 5));
  const auto path = std::filesystem::temp_directory_path() / "densray_roundtrip.txt";
  save_word2vec_text(path, emb);
  const Embeddings back = load_word2vec_text(path);
  std::filesystem::remove(path);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back.vocab[i], words[i]);
  EXPECT_LE((back.matrix.data() - emb.matrix.data()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(back.matrix.data(), emb.matrix.data());  // 17 digits round-trip exactly
}

TEST(Word2VecText, MissingFileIsDataError) {
  EXPECT_THROW(load_word2vec_text("/nonexistent/emb.txt"), DataError);
}

TEST(Vocabulary, InvariantsHold) {
  EXPECT_THROW(Vocabulary(std::vector<std::string>{}), DataError);
  EXPECT_THROW(Vocabulary({"a", "a"}), DataError);
  const Vocabulary v({"c", "a", "b"});
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v.index(v[i]), i);
  EXPECT_FALSE(v.find("zz").has_value());
  EXPECT_THROW(v.index("zz"), DataError);
}

TEST(EmbeddingMatrix, RejectsNonFiniteAndFalseNormalizedFlag) {
  RowMatrix m(1, 2);
  m << std::nan(""), 0.0;
  EXPECT_THROW(EmbeddingMatrix{m}, DataError);
  m << 3.0, 4.0;
  EXPECT_THROW(EmbeddingMatrix(m, true), DataError);
}

TEST(NormalizeRows, Examples) {
  RowMatrix m(3, 4);
  m << 3, 4, 0, 0,  //
      1, 0, 0, 0,   //
      1, 1, 1, 1;
  const EmbeddingMatrix n = normalize_rows(EmbeddingMatrix(m));
  EXPECT_TRUE(n.normalized());
  EXPECT_DOUBLE_EQ(n.data()(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(n.data()(0, 1), 0.8);
  EXPECT_EQ(n.data()(1, 0), 1.0);
  for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(n.data()(2, j), 0.5);
}

TEST(NormalizeRows, IdempotentAndRejectsZeroRows) {
  std::mt19937_64 rng(3);
  const EmbeddingMatrix once = normalize_rows(EmbeddingMatrix(testing::random_gaussian(rng, 50, 7)));
  const EmbeddingMatrix twice = normalize_rows(once);
  EXPECT_LE((once.data() - twice.data()).cwiseAbs().maxCoeff(), 1e-12);

  RowMatrix z = RowMatrix::Zero(2, 2);
  z(0, 0) = 1.0;
  // The matrix type itself allows zero rows; normalization refuses them.
  EXPECT_THROW(normalize_rows(EmbeddingMatrix(z)), DataError);
}

TEST(Cosine, Examples) {
  const std::vector<double> e1{1, 0}, e2{0, 1}, diag{1, 1};
  EXPECT_EQ(cosine(e1, e2), 0.0);
  EXPECT_EQ(cosine(e1, e1), 1.0);
  EXPECT_NEAR(cosine(diag, e1), 0.7071, 1e-4);
}

TEST(Cosine, ErrorsAndClamping) {
  const std::vector<double> z{0, 0}, e1{1, 0}, three{1, 0, 0};
  EXPECT_THROW(cosine(z, e1), UsageError);
  EXPECT_THROW(cosine(e1, three), UsageError);
  const std::vector<double> v{0.1, 0.7, 0.3};
  const double c = cosine(v, v);
  EXPECT_LE(c, 1.0);
  EXPECT_GE(c, -1.0);
}

TEST(Nearest, SelfExclusion) {
  const Embeddings emb =
      normalize_rows(parse_word2vec_text("4 2\na 1 0\nb 0.9 0.1\nc 0 1\nd -1 0"));
  const auto n = nearest(emb, std::vector<double>(emb.row("a").begin(), emb.row("a").end()), {"a"}, 1);
  ASSERT_EQ(n.size(), 1u);
  EXPECT_EQ(n[0].token, "b");
}

TEST(Nearest, OrthonormalSpace) {
  const Embeddings emb = normalize_rows(parse_word2vec_text("3 3\na 1 0 0\nb 0 1 0\nc 0 0 1"));
  const std::vector<double> q{0, 1, 0};
  const auto n = nearest(emb, q, {}, 3);
  EXPECT_EQ(n[0].token, "b");
  EXPECT_EQ(n[0].similarity, 1.0);
  // Ties among a and c resolve by vocabulary order.
  EXPECT_EQ(n[1].token, "a");
  EXPECT_EQ(n[2].token, "c");
}

TEST(Nearest, MatchesExhaustiveScan) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Embeddings emb = testing::make_embeddings({"p", "q", "r", "s", "t"},
                                                    testing::random_gaussian(rng, 5, 4), true);
    const Vector query = testing::random_unit(rng, 4);
    const std::vector<double> qv(query.data(), query.data() + query.size());
    const auto got = nearest(emb, qv, {"r"}, 4);

    std::vector<std::pair<double, std::string>> oracle;
    for (std::size_t i = 0; i < emb.size(); ++i) {
      if (emb.vocab[i] == "r") continue;
      double dot = 0.0, nq = 0.0, nr = 0.0;
      for (int j = 0; j < 4; ++j) {
        dot += emb.matrix.data()(static_cast<Eigen::Index>(i), j) * qv[static_cast<std::size_t>(j)];
        nq += qv[static_cast<std::size_t>(j)] * qv[static_cast<std::size_t>(j)];
        nr += std::pow(emb.matrix.data()(static_cast<Eigen::Index>(i), j), 2);
      }
      oracle.emplace_back(dot / std::sqrt(nq * nr), emb.vocab[i]);
    }
    std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_EQ(got[i].token, oracle[i].second);
      EXPECT_NEAR(got[i].similarity, oracle[i].first, 1e-12);
    }
  }
}

TEST(Nearest, FullScanIsSortedPermutation) {
  std::mt19937_64 rng(5);
  std::vector<std::string> words;
  for (int i = 0; i < 30; ++i) words.push_back("w" + std::to_string(i));
  const Embeddings emb = testing::make_embeddings(words, testing::random_gaussian(rng, 30, 6), true);
  const Vector q = testing::random_unit(rng, 6);
  const auto all = nearest(emb, std::vector<double>(q.data(), q.data() + 6), {}, 30);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < all.size(); ++i) {
    seen.insert(all[i].token);
    if (i) EXPECT_LE(all[i].similarity, all[i - 1].similarity);
  }
  EXPECT_EQ(seen.size(), 30u);
}

TEST(Nearest, Preconditions) {
  const Embeddings raw = parse_word2vec_text("2 2\na 1 0\nb 0 2");
  const std::vector<double> q{1, 0};
  EXPECT_THROW(nearest(raw, q, {}, 1), UsageError);
  const Embeddings emb = normalize_rows(raw);
  EXPECT_THROW(nearest(emb, q, {"a"}, 2), UsageError);
  EXPECT_NO_THROW(nearest(emb, q, {"a", "unknown"}, 1));
}

TEST(TextHelpers, ParseAndFormat) {
  double v = 0.0;
  EXPECT_TRUE(parse_double("+1.5e2", v));
  EXPECT_EQ(v, 150.0);
  EXPECT_FALSE(parse_double("1.5x", v));
  EXPECT_FALSE(parse_double("", v));
  EXPECT_EQ(format_fixed(-0.0, 3), "0.000");
  EXPECT_EQ(format_fixed(std::nan(""), 3), "nan");
  EXPECT_EQ(format_fixed(1.0 / 3.0, 4), "0.3333");
  const auto lines = split_lines("a\r\nb\n");
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "a");
}

}  // namespace
}  // namespace densray
