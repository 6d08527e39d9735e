#pragma once

#include "densray/densray.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace densray {

/// Gender pair file: `male<TAB>female` per line, '#' comments and blank lines
/// skipped. Left words become positives, right words negatives.
BinarySignal parse_gender_pairs(std::string_view text, std::string name = "gender");
BinarySignal load_gender_pairs(const std::filesystem::path& path);

/// JSON array of strings, or of arrays whose first element is a string.
/// Order is kept and duplicates dropped.
std::vector<std::string> parse_wordlist_json(std::string_view text);
std::vector<std::string> load_wordlist_json(const std::filesystem::path& path);

struct DebiasResult {
  Rotation rotation;
  Embeddings rotated;     ///< E Q
  Embeddings complement;  ///< E Q without its first k_drop columns
};

/// DensRay rotation on the gender signal, then removal of the leading k_drop
/// dimensions. k_drop must be below the embedding dimension.
DebiasResult debias(const Embeddings& emb, const BinarySignal& gender, Eigen::Index k_drop,
                    const WeightMode& w = WeightMode::fixed(0.5, 0.5), bool renormalize = false);

/// Largest eigenvalue of the DensRay matrix of `signal` in `emb`: how strongly
/// the signal is still linearly separable.
double signal_strength(const Embeddings& emb, const BinarySignal& signal,
                       const WeightMode& w = WeightMode::fixed(0.5, 0.5));

struct BiasRow {
  std::string token;
  std::string space;
  double sim_a = 0.0;
  double sim_b = 0.0;
  double bias = 0.0;  ///< sim_a - sim_b
};

struct BiasSlice {
  std::string space;
  std::string which;  ///< "top" or "bottom"
  std::vector<BiasRow> rows;  ///< bias descending
};

struct BiasReport {
  std::string probe_a;
  std::string probe_b;
  std::vector<BiasRow> rows;  ///< every found token, original space first
  std::vector<BiasSlice> slices;
  std::vector<std::string> missing;  ///< wordlist tokens not in the vocabulary
};

/// Cosine of each wordlist token to both probes in both spaces, and the k most
/// and least biased tokens per space. Throws DataError when a probe is missing
/// or fewer than k wordlist tokens are in the vocabulary.
BiasReport bias_report(const Embeddings& original, const Embeddings& complement,
                       const std::string& probe_a, const std::string& probe_b,
                       const std::vector<std::string>& wordlist, std::size_t k);

/// Mean |bias| of the rows of one space.
double mean_abs_bias(const BiasReport& report, std::string_view space);

/// `token,space,sim_A,sim_B,bias` for every row.
std::string format_bias_csv(const BiasReport& report);
/// `space slice rank token sim_A sim_B bias` for the top/bottom slices.
std::string format_bias_slices(const BiasReport& report);

}  // namespace densray
