#include "densray/debias.hpp"
#include "densray/error.hpp"
#include "support/worlds.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace densray {
namespace {

using testing::gender_world;

double row_cosine(const Embeddings& emb, const std::string& a, const std::string& b) {
  const Vector u = emb.row(a).transpose();
  const Vector v = emb.row(b).transpose();
  return u.dot(v) / (u.norm() * v.norm());
}

TEST(GenderPairs, Parse) {
  const BinarySignal s = parse_gender_pairs("# comment\nhe\tshe\n\nking\tqueen\n");
  EXPECT_EQ(s.positives, (std::vector<std::string>{"he", "king"}));
  EXPECT_EQ(s.negatives, (std::vector<std::string>{"she", "queen"}));
  EXPECT_THROW(parse_gender_pairs("he she\n"), DataError);
  EXPECT_THROW(parse_gender_pairs("# only comments\n"), DataError);
}

TEST(Wordlist, Examples) {
  EXPECT_EQ(parse_wordlist_json(R"(["nurse","engineer"])"), (std::vector<std::string>{"nurse", "engineer"}));
  EXPECT_EQ(parse_wordlist_json(R"([["nurse",1,1],["engineer",0,0]])"),
            (std::vector<std::string>{"nurse", "engineer"}));
  EXPECT_EQ(parse_wordlist_json(R"(["nurse",["nurse",2],"cook"])"), (std::vector<std::string>{"nurse", "cook"}));
}

TEST(Wordlist, Errors) {
  EXPECT_THROW(parse_wordlist_json("[]"), DataError);
  EXPECT_THROW(parse_wordlist_json("[\"nurse\""), DataError);
  EXPECT_THROW(parse_wordlist_json(R"({"a": 1})"), DataError);
  EXPECT_THROW(parse_wordlist_json("[[]]"), DataError);
  EXPECT_THROW(parse_wordlist_json("[[1, \"x\"]]"), DataError);
  EXPECT_THROW(parse_wordlist_json("[3]"), DataError);
}

TEST(Debias, ZeroDropKeepsSimilarities) {
  const auto w = gender_world(51);
  const DebiasResult r = debias(w.emb, w.pairs, 0);
  EXPECT_EQ(r.complement.dim(), w.emb.dim());
  for (const auto& job : w.occupations) {
    EXPECT_NEAR(row_cosine(r.complement, job, "man"), row_cosine(w.emb, job, "man"), 1e-12);
    EXPECT_NEAR(row_cosine(r.rotated, job, "woman"), row_cosine(w.emb, job, "woman"), 1e-12);
  }
}

TEST(Debias, ComplementShapeAndRows) {
  const auto w = gender_world(52);
  const DebiasResult r = debias(w.emb, w.pairs, 2);
  EXPECT_EQ(r.complement.dim(), w.emb.dim() - 2);
  EXPECT_EQ(r.complement.vocab.words(), w.emb.vocab.words());
  const RowMatrix expected = (w.emb.matrix.data() * r.rotation.q).rightCols(w.emb.dim() - 2);
  EXPECT_LE((r.complement.matrix.data() - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_FALSE(r.complement.matrix.normalized());

  const DebiasResult renorm = debias(w.emb, w.pairs, 1, WeightMode::fixed(0.5, 0.5), true);
  EXPECT_TRUE(renorm.complement.matrix.normalized());
  for (Eigen::Index i = 0; i < renorm.complement.matrix.rows(); ++i)
    EXPECT_NEAR(renorm.complement.matrix.row(i).norm(), 1.0, 1e-12);
}

TEST(Debias, DropBounds) {
  const auto w = gender_world(53);
  EXPECT_THROW(debias(w.emb, w.pairs, w.emb.dim()), UsageError);
  EXPECT_THROW(debias(w.emb, w.pairs, -1), UsageError);
  BinarySignal bad = w.pairs;
  bad.positives.push_back("not-a-word");
  EXPECT_THROW(debias(w.emb, bad, 1), DataError);
}

TEST(Debias, PlantedGenderRemoved) {
  const auto w = gender_world(54);
  const DebiasResult r = debias(w.emb, w.pairs, 1);
  EXPECT_GE(std::abs(r.rotation.q.col(0).dot(w.direction)), 0.99);
  const double before = signal_strength(w.emb, w.pairs);
  const double after = signal_strength(r.complement, w.pairs);
  EXPECT_LE(after, 0.1 * before);

  const BiasReport rep = bias_report(w.emb, r.complement, "man", "woman", w.occupations, 5);
  EXPECT_LE(mean_abs_bias(rep, "complement"), 0.25 * mean_abs_bias(rep, "original"));
}

TEST(BiasReport, RowsAreExactDifferences) {
  const auto w = gender_world(55);
  const DebiasResult r = debias(w.emb, w.pairs, 1);
  const BiasReport rep = bias_report(w.emb, r.complement, "man", "woman", w.occupations, 3);
  ASSERT_EQ(rep.rows.size(), 2 * w.occupations.size());
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.bias, row.sim_a - row.sim_b);
    const Embeddings& space = row.space == "original" ? w.emb : r.complement;
    EXPECT_NEAR(row.sim_a, row_cosine(space, row.token, "man"), 1e-12);
    EXPECT_NEAR(row.sim_b, row_cosine(space, row.token, "woman"), 1e-12);
  }
}

TEST(BiasReport, SlicesSortedAndSized) {
  const auto w = gender_world(56);
  const DebiasResult r = debias(w.emb, w.pairs, 1);
  const BiasReport rep = bias_report(w.emb, r.complement, "man", "woman", w.occupations, 5);
  ASSERT_EQ(rep.slices.size(), 4u);
  for (const auto& slice : rep.slices) {
    ASSERT_EQ(slice.rows.size(), 5u);
    for (std::size_t i = 1; i < slice.rows.size(); ++i) EXPECT_GE(slice.rows[i - 1].bias, slice.rows[i].bias);
    double max_bias = -1e300, min_bias = 1e300;
    for (const auto& row : rep.rows) {
      if (row.space != slice.space) continue;
      max_bias = std::max(max_bias, row.bias);
      min_bias = std::min(min_bias, row.bias);
    }
    if (slice.which == "top") EXPECT_EQ(slice.rows.front().bias, max_bias);
    if (slice.which == "bottom") EXPECT_EQ(slice.rows.back().bias, min_bias);
  }
}

TEST(BiasReport, ProbeSelfBias) {
  const auto w = gender_world(57);
  const DebiasResult r = debias(w.emb, w.pairs, 1);
  const BiasReport rep = bias_report(w.emb, r.complement, "man", "woman", {"man"}, 1);
  ASSERT_EQ(rep.rows.size(), 2u);
  const BiasRow& row = rep.rows[0];
  EXPECT_EQ(row.space, "original");
  EXPECT_NEAR(row.sim_a, 1.0, 1e-12);
  EXPECT_NEAR(row.bias, 1.0 - row_cosine(w.emb, "man", "woman"), 1e-12);
  EXPECT_GT(row.bias, 0.0);
}

TEST(BiasReport, Errors) {
  const auto w = gender_world(58);
  const DebiasResult r = debias(w.emb, w.pairs, 1);
  EXPECT_THROW(bias_report(w.emb, r.complement, "king", "woman", w.occupations, 5), DataError);
  std::vector<std::string> list{w.occupations[0], "ghost"};
  EXPECT_THROW(bias_report(w.emb, r.complement, "man", "woman", list, 2), DataError);
  const BiasReport rep = bias_report(w.emb, r.complement, "man", "woman", list, 1);
  EXPECT_EQ(rep.missing, std::vector<std::string>{"ghost"});
}

TEST(BiasReport, Formats) {
  BiasReport rep;
  rep.rows = {{"nurse", "original", 0.25, 0.5, -0.25}};
  rep.slices = {{"original", "top", {rep.rows[0]}}};
  EXPECT_EQ(format_bias_csv(rep), "token,space,sim_A,sim_B,bias\nnurse,original,0.250000,0.500000,-0.250000\n");
  EXPECT_EQ(format_bias_slices(rep),
            "space\tslice\trank\ttoken\tsim_A\tsim_B\tbias\noriginal\ttop\t1\tnurse\t0.250000\t0.500000\t-0.250000\n");
}

TEST(BiasReport, PureFunctionOfInputs) {
  const auto w = gender_world(59);
  const DebiasResult r = debias(w.emb, w.pairs, 1);
  const auto a = format_bias_csv(bias_report(w.emb, r.complement, "man", "woman", w.occupations, 5));
  const auto b = format_bias_csv(bias_report(w.emb, r.complement, "man", "woman", w.occupations, 5));
  EXPECT_EQ(a, b);
}

}  // namespace
}  // namespace densray
