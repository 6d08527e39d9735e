#pragma once

#include "densray/densray.hpp"
#include "densray/linear_models.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace densray {

enum class AnalogyGroup { kInflectional, kDerivational, kEncyclopedia, kLexicography, kGoogle };

std::string_view group_name(AnalogyGroup g);

struct AnalogyPair {
  std::string left;
  std::vector<std::string> right;  ///< accepted answers; the first is canonical
};

struct AnalogyCategory {
  std::string name;
  AnalogyGroup group = AnalogyGroup::kGoogle;
  std::vector<AnalogyPair> pairs;
};

/// Google Analogy questions file. Each category's pair list is the set of
/// distinct (w1, w2) and (w3, w4) pairs of its question lines.
std::vector<AnalogyCategory> parse_google_analogy(const std::filesystem::path& path);
std::vector<AnalogyCategory> parse_google_analogy_text(std::string_view text);

/// BATS directory (searched recursively for *.txt); one category per file,
/// sorted by file name. Lines are `left<TAB>right1/right2/...`.
std::vector<AnalogyCategory> parse_bats(const std::filesystem::path& dir);
AnalogyCategory parse_bats_file(std::string_view text, std::string name);

/// Leave-one-pair-out split. Train pairs share no word with the test pair.
struct LooSplit {
  std::vector<AnalogyPair> train;
  AnalogyPair test;
  bool skipped = false;  ///< fewer than 2 train pairs remain
};
LooSplit loo_protocol(const AnalogyCategory& cat, std::size_t test_index);

enum class Space { kOriginal, kComplement };

std::string_view space_name(Space s);

struct AnalogyOptions {
  WeightMode weights = WeightMode::fixed(0.5, 0.5);
  Hyperparams hp;
  bool exclude_query = true;
  bool exclude_train = true;
};

/// Left/right word classes of a training set (in-vocabulary words only);
/// words in both classes are dropped from both. `train_words` keeps every
/// in-vocabulary word of the train pairs for candidate exclusion.
struct AnalogyClasses {
  std::vector<std::string> left;
  std::vector<std::string> right;
  std::vector<std::string> train_words;
};
AnalogyClasses analogy_classes(const Embeddings& emb, const std::vector<AnalogyPair>& train);

/// Unit interpretable direction for the right-vs-left split (method: densray or svm).
Vector interpretable_direction(const Embeddings& emb, const AnalogyClasses& classes, Method method,
                               std::uint64_t seed, const AnalogyOptions& options);

/// IntCos scores for every vocabulary word: the min-max normalized (and
/// oriented) interpretable coordinate times the cosine to `query`, computed in
/// the full rotated space or in its complement. Excluded words score -inf.
Vector intcos_scores(const Embeddings& emb, const AnalogyClasses& classes, const Vector& direction,
                     std::string_view query, Space space, const AnalogyOptions& options);

/// LRCos scores: P(right | v) * cos(query, v); excluded words score -inf.
Vector lrcos_scores(const Embeddings& emb, const AnalogyClasses& classes, const LinearModel& model,
                    std::string_view query, const AnalogyOptions& options);

/// Highest score, ties to the lower vocabulary index.
std::string argmax_token(const Embeddings& emb, const Vector& scores);

std::string intcos_predict(const Embeddings& emb, const std::vector<AnalogyPair>& train,
                           std::string_view query, Method method, Space space, std::uint64_t seed,
                           const AnalogyOptions& options = {});
std::string lrcos_predict(const Embeddings& emb, const std::vector<AnalogyPair>& train,
                          std::string_view query, std::uint64_t seed,
                          const AnalogyOptions& options = {});

struct CosineStats {
  double inter = 0.0;
  double intra_left = 0.0;
  double intra_right = 0.0;
};
/// inter: mean cos(left, first right) over pairs; intra: mean over unordered
/// distinct word pairs of each class. Missing words are skipped; NaN when no
/// pair is available.
CosineStats cosine_stats(const AnalogyCategory& cat, const Embeddings& emb);

/// One evaluated scorer, e.g. IntCos-DensRay in the complement space.
struct AnalogyColumn {
  bool lrcos = false;
  Method method = Method::kDensRay;
  Space space = Space::kOriginal;
  std::string name() const;
};

/// Builds columns from method names (intcos-densray, intcos-svm, lrcos) and
/// spaces (original, complement). Throws UsageError on unknown names.
std::vector<AnalogyColumn> analogy_columns(const std::vector<std::string>& methods,
                                           const std::vector<std::string>& spaces);

struct CategoryResult {
  std::string name;
  AnalogyGroup group = AnalogyGroup::kGoogle;
  CosineStats stats;
  std::vector<std::size_t> correct;  ///< per column
  std::size_t n_evaluated = 0;
  std::size_t n_skipped = 0;
  double precision(std::size_t column) const;
};

struct FoldRecord {
  std::size_t category = 0;
  std::size_t test_index = 0;
  AnalogyPair test;
  std::vector<std::string> train_words;
  std::vector<std::string> predictions;  ///< per column
};

struct AnalogyReport {
  std::vector<AnalogyColumn> columns;
  std::vector<CategoryResult> categories;
};

/// Runs every column on every LOO fold. Pairs whose left word or every right
/// variant is out of vocabulary are skipped and counted, as are folds with
/// fewer than 2 train pairs. Fold seeds derive from (seed, category, fold).
AnalogyReport evaluate(const std::vector<AnalogyCategory>& datasets, const Embeddings& emb,
                       const std::vector<AnalogyColumn>& columns, std::uint64_t seed,
                       const AnalogyOptions& options = {}, std::vector<FoldRecord>* folds = nullptr);

struct AnalogySummary {
  std::vector<double> micro;       ///< per column, correct / evaluated over all folds
  std::vector<double> macro_mean;  ///< per column, mean over categories
  std::vector<double> macro_std;   ///< population std over categories
};
AnalogySummary summarize(const AnalogyReport& report);

/// TSV: kind, name, group, n_evaluated, n_skipped, inter, intraL, intraR and one
/// precision column per scorer. Category rows, then group means (when groups
/// other than GA are present), then micro mean, macro mean and macro std.
std::string format_analogy_report(const AnalogyReport& report);

}  // namespace densray
