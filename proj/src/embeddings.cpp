#include "densray/embeddings.hpp"

#include "densray/error.hpp"
#include "densray/text.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace densray {

namespace {

// Splits on single spaces. A single trailing space is tolerated; empty fields
// elsewhere (double spaces) are kept so the caller can reject them.
std::vector<std::string_view> split_spaces(std::string_view line) {
  if (!line.empty() && line.back() == ' ') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(' ', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
  });
  return out;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}
  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) {
      line = text_.substr(pos_);
      pos_ = text_.size();
    } else {
      line = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
    }
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no_;
    return true;
  }
  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  if (words_.empty()) throw DataError("vocabulary must contain at least one token");
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second)
      throw DataError("duplicate token '" + words_[i] + "'");
  }
}

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::index(std::string_view token) const {
  const auto found = find(token);
  if (!found) throw DataError("unknown token '" + std::string(token) + "'");
  return *found;
}

EmbeddingMatrix::EmbeddingMatrix(RowMatrix data, bool normalized)
    : data_(std::move(data)), normalized_(normalized) {
  if (!data_.allFinite()) throw DataError("embedding matrix contains non-finite values");
  if (normalized_) {
    for (Eigen::Index i = 0; i < data_.rows(); ++i) {
      if (std::abs(data_.row(i).norm() - 1.0) > 1e-6)
        throw DataError("row " + std::to_string(i) + " is not unit norm");
    }
  }
}

Embeddings parse_word2vec_text(std::string_view text, const LoadOptions& options) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.next(line)) throw DataError("empty embedding file");

  const auto header = split_spaces(line);
  std::size_t n = 0;
  std::size_t d = 0;
  if (header.size() != 2 || !parse_size(header[0], n) || !parse_size(header[1], d) || d == 0)
    throw DataError(where(1) + "expected header '<n> <d>'");

  const std::size_t wanted = options.max_rows ? std::min(n, *options.max_rows) : n;
  if (wanted == 0) throw DataError("no rows requested");

  RowMatrix data(static_cast<Eigen::Index>(wanted), static_cast<Eigen::Index>(d));
  std::vector<std::string> words;
  words.reserve(wanted);
  std::unordered_set<std::string> seen;
  seen.reserve(wanted);

  Eigen::Index row = 0;
  std::size_t consumed = 0;
  while (consumed < wanted) {
    if (!reader.next(line)) {
      throw DataError("header promises " + std::to_string(n) + " rows but file has " +
                      std::to_string(consumed));
    }
    ++consumed;
    const auto fields = split_spaces(line);
    if (fields.size() != d + 1) {
      throw DataError(where(reader.line_no()) + "expected token and " + std::to_string(d) +
                      " values, got " + std::to_string(fields.size()) + " fields");
    }
    if (fields[0].empty()) throw DataError(where(reader.line_no()) + "empty token");

    std::string token = options.lowercase ? ascii_lower(fields[0]) : std::string(fields[0]);
    if (seen.contains(token)) {
      if (options.lowercase) continue;
      throw DataError(where(reader.line_no()) + "duplicate token '" + token + "'");
    }

    bool all_zero = true;
    for (std::size_t j = 0; j < d; ++j) {
      double v = 0.0;
      if (!parse_double(fields[j + 1], v))
        throw DataError(where(reader.line_no()) + "invalid number '" + std::string(fields[j + 1]) + "'");
      if (!std::isfinite(v)) throw DataError(where(reader.line_no()) + "non-finite value");
      data(row, static_cast<Eigen::Index>(j)) = v;
      all_zero = all_zero && v == 0.0;
    }
    if (all_zero) throw DataError(where(reader.line_no()) + "zero vector for '" + token + "'");

    seen.insert(token);
    words.push_back(std::move(token));
    ++row;
  }
  data.conservativeResize(row, Eigen::NoChange);
  return Embeddings{Vocabulary(std::move(words)), EmbeddingMatrix(std::move(data))};
}

Embeddings load_word2vec_text(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embeddings '" + path.filename().string() + "'");

  // Read only as much of the file as the row budget needs.
  std::string text;
  std::string line;
  std::size_t lines_wanted = std::numeric_limits<std::size_t>::max();
  std::size_t lines_read = 0;
  while (lines_read < lines_wanted && std::getline(in, line)) {
    if (lines_read == 0 && options.max_rows) {
      std::istringstream header(line);
      std::size_t n = 0;
      if (header >> n) lines_wanted = 1 + std::min(n, *options.max_rows);
    }
    text += line;
    text += '\n';
    ++lines_read;
  }
  return parse_word2vec_text(text, options);
}

std::string format_word2vec_text(const Embeddings& emb) {
  const auto& m = emb.matrix.data();
  std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out += emb.vocab[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out += ' ';
      out += format_double(m(i, j), 17);
    }
    out += '\n';
  }
  return out;
}

void save_word2vec_text(const std::filesystem::path& path, const Embeddings& emb) {
  write_file(path, format_word2vec_text(emb));
}

EmbeddingMatrix normalize_rows(const EmbeddingMatrix& matrix) {
  RowMatrix data = matrix.data();
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double norm = data.row(i).norm();
    if (norm == 0.0) throw DataError("cannot normalize zero row " + std::to_string(i));
    data.row(i) /= norm;
  }
  return EmbeddingMatrix(std::move(data), true);
}

Embeddings normalize_rows(const Embeddings& emb) {
  return Embeddings{emb.vocab, normalize_rows(emb.matrix)};
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw UsageError("cosine: dimension mismatch");
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw UsageError("cosine: zero vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

std::vector<Neighbor> nearest(const Embeddings& emb, std::span<const double> query,
                              const std::unordered_set<std::string>& exclude, std::size_t k) {
  const auto& m = emb.matrix.data();
  if (!emb.matrix.normalized()) throw UsageError("nearest: embeddings must be normalized");
  if (static_cast<Eigen::Index>(query.size()) != m.cols())
    throw UsageError("nearest: dimension mismatch");

  std::size_t excluded = 0;
  for (const auto& token : exclude) excluded += emb.vocab.contains(token) ? 1 : 0;
  if (k > emb.size() - excluded) throw UsageError("nearest: k exceeds candidate count");

  const Eigen::Map<const Vector> q(query.data(), static_cast<Eigen::Index>(query.size()));
  const double qn = q.norm();
  if (qn == 0.0) throw UsageError("nearest: zero query");

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(emb.size() - excluded);
  for (std::size_t i = 0; i < emb.size(); ++i) {
    if (!exclude.empty() && exclude.contains(emb.vocab[i])) continue;
    const double sim = std::clamp(m.row(static_cast<Eigen::Index>(i)).dot(q) / qn, -1.0, 1.0);
    scored.emplace_back(sim, i);
  }
  const auto better = [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                    better);

  std::vector<Neighbor> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back({emb.vocab[scored[i].second], scored[i].first});
  return out;
}

}  // namespace densray
