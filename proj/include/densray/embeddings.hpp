#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace densray {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Ordered list of unique tokens. Tokens are compared byte-exact.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> words);

  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::string& operator[](std::size_t i) const { return words_[i]; }

  std::optional<std::size_t> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }
  /// Throws DataError for unknown tokens.
  std::size_t index(std::string_view token) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
};

/// n x d matrix of finite reals; immutable after construction.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /// Throws DataError if any entry is non-finite. When `normalized` is true the
  /// caller asserts unit rows; this is checked within 1e-6.
  explicit EmbeddingMatrix(RowMatrix data, bool normalized = false);

  Eigen::Index rows() const noexcept { return data_.rows(); }
  Eigen::Index dim() const noexcept { return data_.cols(); }
  bool normalized() const noexcept { return normalized_; }
  const RowMatrix& data() const noexcept { return data_; }
  auto row(Eigen::Index i) const { return data_.row(i); }

 private:
  RowMatrix data_;
  bool normalized_ = false;
};

/// A vocabulary paired with its embedding rows.
struct Embeddings {
  Vocabulary vocab;
  EmbeddingMatrix matrix;

  Eigen::Index dim() const noexcept { return matrix.dim(); }
  std::size_t size() const noexcept { return vocab.size(); }
  auto row(std::string_view token) const {
    return matrix.row(static_cast<Eigen::Index>(vocab.index(token)));
  }
};

struct LoadOptions {
  std::optional<std::size_t> max_rows;
  /// Lowercase tokens (ASCII only). Later rows whose lowercased token
  /// collides with an earlier one are dropped.
  bool lowercase = false;
};

/// Reads the word2vec text format: a "<n> <d>" header followed by rows of
/// "<token> <f1> ... <fd>". Rows are returned unnormalized; exactly zero rows
/// are rejected.
Embeddings load_word2vec_text(const std::filesystem::path& path, const LoadOptions& options = {});
Embeddings parse_word2vec_text(std::string_view text, const LoadOptions& options = {});

/// Writes the word2vec text format with 17 significant digits.
void save_word2vec_text(const std::filesystem::path& path, const Embeddings& emb);
std::string format_word2vec_text(const Embeddings& emb);

/// Scales every row to unit Euclidean norm. Throws DataError on a zero row.
EmbeddingMatrix normalize_rows(const EmbeddingMatrix& matrix);
Embeddings normalize_rows(const Embeddings& emb);

/// Cosine similarity clamped to [-1, 1].
double cosine(std::span<const double> u, std::span<const double> v);

template <typename A, typename B>
double cosine(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v) {
  const auto flat = [](const auto& x) {
    Vector r(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) r[i] = x(i);
    return r;
  };
  const Vector a = flat(u);
  const Vector b = flat(v);
  return cosine(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

struct Neighbor {
  std::string token;
  double similarity;
};

/// The k rows most cosine-similar to `query`, descending; ties go to the lower
/// vocabulary index. Requires a normalized matrix.
std::vector<Neighbor> nearest(const Embeddings& emb, std::span<const double> query,
                              const std::unordered_set<std::string>& exclude, std::size_t k);

}  // namespace densray
