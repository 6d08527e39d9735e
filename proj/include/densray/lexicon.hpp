#pragma once

#include "densray/densray.hpp"
#include "densray/linear_models.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace densray {

enum class LexiconKind { kBinary, kContinuous };

LexiconKind parse_lexicon_kind(std::string_view name);

struct Lexicon {
  std::vector<std::pair<std::string, double>> entries;
  LexiconKind kind = LexiconKind::kBinary;
  std::string name;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
};

/// TSV `token<TAB>score`, '#' comments and blank lines skipped. Binary
/// lexicons accept -1, 0 (neutral) and +1. The lexicon is named after the
/// file stem.
Lexicon load_lexicon(const std::filesystem::path& path, LexiconKind kind);
Lexicon parse_lexicon(std::string_view text, LexiconKind kind, std::string name);

/// First occurrence wins.
Lexicon dedup(const Lexicon& lex);

/// Drops entries with score 0. Throws DataError if nothing remains.
Lexicon remove_neutral(const Lexicon& lex);

/// Lower-middle median for even counts. Entries above it map to +1, below it
/// to -1, equal to it are dropped.
double lower_median(std::vector<double> values);
Lexicon binarize_median(const Lexicon& lex);

/// Removes from `train` every token that also occurs in `test`.
std::pair<Lexicon, Lexicon> split_disjoint(const Lexicon& train, const Lexicon& test);

BinarySignal to_binary_signal(const Lexicon& lex);
ContinuousSignal to_continuous_signal(const Lexicon& lex);

/// Tie-corrected Kendall tau-b in O(n log n).
double kendall_tau(std::span<const double> a, std::span<const double> b);

/// Pair counts behind tau-b.
struct TauCounts {
  std::int64_t pairs = 0;    ///< n (n - 1) / 2
  std::int64_t ties_a = 0;   ///< pairs tied in a (including joint ties)
  std::int64_t ties_b = 0;   ///< pairs tied in b (including joint ties)
  std::int64_t ties_ab = 0;  ///< pairs tied in both
  std::int64_t discordant = 0;
};
TauCounts kendall_counts(std::span<const double> a, std::span<const double> b);
/// tau-b from counts: (C - D) / sqrt((C + D + T_a)(C + D + T_b)).
double tau_b_from_counts(const TauCounts& c);

struct InductionResult {
  std::vector<std::pair<std::string, double>> predicted;
  double tau = 0.0;
  std::size_t n_test = 0;
  std::size_t skipped = 0;
};

/// Scores test words along an interpretable direction. Predictions are
/// (E Q)[w, 0] for rotations and w.e + b for models, sign-flipped if needed so
/// that train positives score higher on average than train negatives.
InductionResult induce(const Embeddings& emb, const Rotation& rot, const BinarySignal& train,
                       const Lexicon& test);
InductionResult induce(const Embeddings& emb, const LinearModel& model, const BinarySignal& train,
                       const Lexicon& test);

/// Cleaned train/test data shared by every method.
struct PreparedLexicon {
  std::string name;
  Lexicon train_binary;      ///< dedup, neutral removal, binarization, overlap removal
  Lexicon train_continuous;  ///< original scores on exactly the train_binary tokens
  Lexicon test;              ///< dedup, neutral removal for binary kinds
};

/// dedup -> neutral removal -> binarization -> overlap removal, then restricts
/// train tokens to the vocabulary.
PreparedLexicon prepare_lexicon(const Embeddings& emb, const Lexicon& train, const Lexicon& test);

struct InductionOptions {
  WeightMode weights = WeightMode::fixed(0.5, 0.5);
  Hyperparams hp;
  std::uint64_t seed = 0;
};

/// Trains `method` on the prepared train lexicon and evaluates on its test part.
/// SVR trains on train_continuous; the others on train_binary.
InductionResult run_induction(const Embeddings& emb, const PreparedLexicon& data, Method method,
                              const InductionOptions& options);

struct InductionRow {
  std::string name;
  std::string method;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t skipped = 0;
  double tau = 0.0;
};

/// TSV with columns name, method, n_train, n_test, skipped, tau.
std::string format_induction_report(const std::vector<InductionRow>& rows);

}  // namespace densray
