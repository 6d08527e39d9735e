#pragma once

#include "densray/embeddings.hpp"
#include "densray/symmetric_eig.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace densray {

/// Two disjoint, non-empty word classes (l = +1 for positives, -1 for negatives).
struct BinarySignal {
  std::string name = "signal";
  std::vector<std::string> positives;
  std::vector<std::string> negatives;
};

/// Real-valued word annotation.
struct ContinuousSignal {
  std::string name = "signal";
  std::vector<std::pair<std::string, double>> scores;
};

using Signal = std::variant<BinarySignal, ContinuousSignal>;

/// Weights for different-class and same-class pairs.
struct WeightMode {
  enum class Kind { kFixed, kAveraged };
  Kind kind = Kind::kFixed;
  double alpha_different = 0.5;
  double alpha_same = 0.5;

  static WeightMode fixed(double alpha_different, double alpha_same);
  /// alpha_different = 1 / |L_diff|, alpha_same = 1 / |L_same|, counted over
  /// ordered pairs with self-pairs included in L_same.
  static WeightMode averaged();
  /// Parses "fixed:<a>,<b>" or "averaged".
  static WeightMode parse(std::string_view text);
  std::string to_string() const;
};

enum class Method { kDensRay, kSvm, kSvr, kLogReg };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

/// Orthogonal d x d matrix; column 0 is the interpretable direction.
struct Rotation {
  Matrix q;
  /// Per-column eigenvalues; empty unless method is kDensRay.
  Vector eigenvalues;
  Method method = Method::kDensRay;
  std::string signal_name;

  Eigen::Index dim() const noexcept { return q.rows(); }
  Vector direction() const { return q.col(0); }
};

/// Difference-vector matrix for a binary signal, summed over ordered pairs:
///   A = a_diff * sum_{l(v) != l(w)} d d^T - a_same * sum_{l(v) == l(w)} d d^T,
/// d = e_v - e_w. `fast` uses the expansion through class sums and second
/// moments, O(n d^2); otherwise pairs are enumerated, O(n^2 d^2).
SymmetricMatrix build_A_binary(const Embeddings& emb, const BinarySignal& sig, const WeightMode& w,
                               bool fast = true);

/// A = sum_{(v,w)} -l(v) l(w) d_vw d_vw^T over ordered pairs.
SymmetricMatrix build_A_continuous(const Embeddings& emb, const ContinuousSignal& sig,
                                   bool fast = true);

/// Row-level variants used once tokens are resolved. Rows need not be unit.
SymmetricMatrix build_A_binary(const RowMatrix& positives, const RowMatrix& negatives,
                               const WeightMode& w, bool fast = true);
SymmetricMatrix build_A_continuous(const RowMatrix& rows, const Vector& scores, bool fast = true);

/// Eigenvectors of A, descending. Weight mode is ignored for continuous signals.
Rotation densray(const Embeddings& emb, const Signal& signal, const WeightMode& w = {});

/// Applies DensRay to each signal in order inside the orthogonal complement of
/// the columns already fixed, keeping the first k_per_signal[i] directions.
/// The trailing columns are the remaining eigenvectors of the last signal.
Rotation iterate_signals(const Embeddings& emb, const std::vector<Signal>& signals,
                         const std::vector<Eigen::Index>& k_per_signal, const WeightMode& w = {});

/// E Q.
EmbeddingMatrix project(const EmbeddingMatrix& matrix, const Rotation& rot);
Embeddings project(const Embeddings& emb, const Rotation& rot);

/// Drops the first `drop` columns. Rows are not renormalized unless asked.
EmbeddingMatrix complement(const EmbeddingMatrix& projected, Eigen::Index drop,
                           bool renormalize = false);
Embeddings complement(const Embeddings& projected, Eigen::Index drop, bool renormalize = false);

/// Rotation text format:
///   densray <d> <method> <signal_name>
///   <eigenvalues...> | -
///   d rows of d values
void save_rotation(const std::filesystem::path& path, const Rotation& rot);
std::string format_rotation(const Rotation& rot);
Rotation load_rotation(const std::filesystem::path& path);
Rotation parse_rotation(std::string_view text);

/// Resolves tokens to embedding rows; throws DataError on unknown tokens.
RowMatrix gather_rows(const Embeddings& emb, const std::vector<std::string>& tokens);

}  // namespace densray
