#include "densray/densray.hpp"

#include "densray/error.hpp"
#include "densray/text.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace densray {

WeightMode WeightMode::fixed(double alpha_different, double alpha_same) {
  if (!(alpha_different >= 0.0 && alpha_different <= 1.0 && alpha_same >= 0.0 && alpha_same <= 1.0))
    throw UsageError("fixed weights must lie in [0, 1]");
  return WeightMode{Kind::kFixed, alpha_different, alpha_same};
}

WeightMode WeightMode::averaged() { return WeightMode{Kind::kAveraged, 0.0, 0.0}; }

WeightMode WeightMode::parse(std::string_view text) {
  if (text == "averaged") return averaged();
  constexpr std::string_view prefix = "fixed:";
  if (text.starts_with(prefix)) {
    const auto parts = split(text.substr(prefix.size()), ',');
    double a = 0.0;
    double b = 0.0;
    if (parts.size() == 2 && parse_double(parts[0], a) && parse_double(parts[1], b))
      return fixed(a, b);
  }
  throw UsageError("weight mode must be 'averaged' or 'fixed:<a_diff>,<a_same>'");
}

std::string WeightMode::to_string() const {
  if (kind == Kind::kAveraged) return "averaged";
  return "fixed:" + format_double(alpha_different) + "," + format_double(alpha_same);
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kDensRay: return "densray";
    case Method::kSvm: return "svm";
    case Method::kSvr: return "svr";
    case Method::kLogReg: return "logreg";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "densray") return Method::kDensRay;
  if (name == "svm") return Method::kSvm;
  if (name == "svr") return Method::kSvr;
  if (name == "logreg") return Method::kLogReg;
  throw UsageError("unknown method '" + std::string(name) + "'");
}

RowMatrix gather_rows(const Embeddings& emb, const std::vector<std::string>& tokens) {
  RowMatrix rows(static_cast<Eigen::Index>(tokens.size()), emb.dim());
  for (std::size_t i = 0; i < tokens.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) = emb.row(tokens[i]);
  return rows;
}

namespace {

void check_binary_tokens(const BinarySignal& sig) {
  if (sig.positives.empty() || sig.negatives.empty())
    throw DataError("signal '" + sig.name + "': both classes must be non-empty");
  std::unordered_set<std::string_view> seen;
  for (const auto& t : sig.positives)
    if (!seen.insert(t).second) throw DataError("signal '" + sig.name + "': duplicate token '" + t + "'");
  for (const auto& t : sig.negatives)
    if (!seen.insert(t).second)
      throw DataError("signal '" + sig.name + "': token '" + t + "' is duplicated or in both classes");
}

// sum_{x in X, y in Y} (x - y)(x - y)^T
Matrix cross_pair_sum(const RowMatrix& x, const RowMatrix& y) {
  const Matrix sx = x.transpose() * x;
  const Matrix sy = y.transpose() * y;
  const Vector mx = x.colwise().sum().transpose();
  const Vector my = y.colwise().sum().transpose();
  const Matrix cross = mx * my.transpose();
  return static_cast<double>(y.rows()) * sx + static_cast<double>(x.rows()) * sy - cross -
         cross.transpose();
}

}  // namespace

SymmetricMatrix build_A_binary(const RowMatrix& positives, const RowMatrix& negatives,
                               const WeightMode& w, bool fast) {
  const Eigen::Index np = positives.rows();
  const Eigen::Index nn = negatives.rows();
  if (np == 0 || nn == 0) throw DataError("both classes must be non-empty");
  if (positives.cols() != negatives.cols()) throw UsageError("class dimension mismatch");
  const Eigen::Index d = positives.cols();

  double a_diff = w.alpha_different;
  double a_same = w.alpha_same;
  if (w.kind == WeightMode::Kind::kAveraged) {
    a_diff = 1.0 / (2.0 * static_cast<double>(np) * static_cast<double>(nn));
    a_same = 1.0 / (static_cast<double>(np) * np + static_cast<double>(nn) * nn);
  }

  if (fast) {
    const Matrix diff = 2.0 * cross_pair_sum(positives, negatives);
    const Matrix same = cross_pair_sum(positives, positives) + cross_pair_sum(negatives, negatives);
    return SymmetricMatrix(a_diff * diff - a_same * same);
  }

  RowMatrix all(np + nn, d);
  all << positives, negatives;
  Matrix diff = Matrix::Zero(d, d);
  Matrix same = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < all.rows(); ++i) {
    for (Eigen::Index j = 0; j < all.rows(); ++j) {
      if (i == j) continue;  // self-pairs are in L_same but contribute zero
      const Vector dv = (all.row(i) - all.row(j)).transpose();
      if ((i < np) != (j < np))
        diff.noalias() += dv * dv.transpose();
      else
        same.noalias() += dv * dv.transpose();
    }
  }
  return SymmetricMatrix(a_diff * diff - a_same * same);
}

SymmetricMatrix build_A_continuous(const RowMatrix& rows, const Vector& scores, bool fast) {
  if (rows.rows() < 2) throw DataError("continuous signal needs at least 2 labeled words");
  if (rows.rows() != scores.size()) throw UsageError("score count does not match row count");
  if (!scores.allFinite()) throw DataError("continuous signal has non-finite scores");
  const Eigen::Index d = rows.cols();

  if (fast) {
    // sum_{v,w} -l_v l_w (e_v - e_w)(e_v - e_w)^T = 2 m m^T - 2 (sum l) T,
    // T = sum l_v e_v e_v^T, m = sum l_v e_v.
    const double total = scores.sum();
    const Matrix t = rows.transpose() * scores.asDiagonal() * rows;
    const Vector m = rows.transpose() * scores;
    return SymmetricMatrix(2.0 * (m * m.transpose()) - 2.0 * total * t);
  }

  Matrix a = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.rows(); ++j) {
      if (i == j) continue;
      const Vector dv = (rows.row(i) - rows.row(j)).transpose();
      a.noalias() -= (scores[i] * scores[j]) * (dv * dv.transpose());
    }
  }
  return SymmetricMatrix(a);
}

SymmetricMatrix build_A_binary(const Embeddings& emb, const BinarySignal& sig, const WeightMode& w,
                               bool fast) {
  check_binary_tokens(sig);
  return build_A_binary(gather_rows(emb, sig.positives), gather_rows(emb, sig.negatives), w, fast);
}

SymmetricMatrix build_A_continuous(const Embeddings& emb, const ContinuousSignal& sig, bool fast) {
  std::vector<std::string> tokens;
  Vector scores(static_cast<Eigen::Index>(sig.scores.size()));
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < sig.scores.size(); ++i) {
    if (!seen.insert(sig.scores[i].first).second)
      throw DataError("signal '" + sig.name + "': duplicate token '" + sig.scores[i].first + "'");
    tokens.push_back(sig.scores[i].first);
    scores[static_cast<Eigen::Index>(i)] = sig.scores[i].second;
  }
  return build_A_continuous(gather_rows(emb, tokens), scores, fast);
}

namespace {

std::string signal_name(const Signal& s) {
  return std::visit([](const auto& sig) { return sig.name; }, s);
}

std::vector<std::string> labeled_tokens(const Signal& s) {
  std::vector<std::string> out;
  if (const auto* b = std::get_if<BinarySignal>(&s)) {
    out = b->positives;
    out.insert(out.end(), b->negatives.begin(), b->negatives.end());
  } else {
    for (const auto& [token, score] : std::get<ContinuousSignal>(s).scores) out.push_back(token);
  }
  return out;
}

SymmetricMatrix build_A(const Embeddings& emb, const Signal& signal, const WeightMode& w) {
  return std::visit(
      [&](const auto& sig) -> SymmetricMatrix {
        using T = std::decay_t<decltype(sig)>;
        if constexpr (std::is_same_v<T, BinarySignal>)
          return build_A_binary(emb, sig, w, true);
        else
          return build_A_continuous(emb, sig, true);
      },
      signal);
}

}  // namespace

Rotation densray(const Embeddings& emb, const Signal& signal, const WeightMode& w) {
  const EigenBasis basis = eig_symmetric(build_A(emb, signal, w));
  return Rotation{basis.vectors, basis.values, Method::kDensRay, signal_name(signal)};
}

Rotation iterate_signals(const Embeddings& emb, const std::vector<Signal>& signals,
                         const std::vector<Eigen::Index>& k_per_signal, const WeightMode& w) {
  const Eigen::Index d = emb.dim();
  if (signals.empty()) throw UsageError("iterate_signals: no signals");
  if (signals.size() != k_per_signal.size())
    throw UsageError("iterate_signals: one k per signal required");
  Eigen::Index budget = 0;
  for (const auto k : k_per_signal) {
    if (k < 1) throw UsageError("iterate_signals: k must be positive");
    budget += k;
  }
  if (budget > d) throw UsageError("iterate_signals: total k exceeds dimension");

  Matrix q(d, d);
  Vector values(d);
  Matrix residual = Matrix::Identity(d, d);  // orthonormal basis of the free subspace
  Eigen::Index filled = 0;
  std::string name;

  for (std::size_t s = 0; s < signals.size(); ++s) {
    const Eigen::Index k = k_per_signal[s];
    const Eigen::Index r = residual.cols();
    // Labeled rows expressed in residual coordinates.
    const auto tokens = labeled_tokens(signals[s]);
    const Embeddings local{Vocabulary(tokens),
                           EmbeddingMatrix(RowMatrix(gather_rows(emb, tokens) * residual))};
    const EigenBasis basis = eig_symmetric(build_A(local, signals[s], w));

    q.middleCols(filled, k) = residual * basis.vectors.leftCols(k);
    values.segment(filled, k) = basis.values.head(k);
    filled += k;
    const Matrix rest = residual * basis.vectors.rightCols(r - k);
    if (s + 1 == signals.size()) {
      q.rightCols(r - k) = rest;
      values.tail(r - k) = basis.values.tail(r - k);
    }
    residual = rest;
    name += (s ? "+" : "") + signal_name(signals[s]);
  }
  for (Eigen::Index j = 0; j < d; ++j) normalize_sign(q.col(j));
  return Rotation{q, values, Method::kDensRay, name};
}

EmbeddingMatrix project(const EmbeddingMatrix& matrix, const Rotation& rot) {
  if (matrix.dim() != rot.dim()) throw UsageError("project: dimension mismatch");
  RowMatrix out = matrix.data() * rot.q;
  return EmbeddingMatrix(std::move(out), matrix.normalized());
}

Embeddings project(const Embeddings& emb, const Rotation& rot) {
  return Embeddings{emb.vocab, project(emb.matrix, rot)};
}

EmbeddingMatrix complement(const EmbeddingMatrix& projected, Eigen::Index drop, bool renormalize) {
  if (drop < 0 || drop >= projected.dim())
    throw UsageError("complement: drop must be in [0, d)");
  RowMatrix out = projected.data().rightCols(projected.dim() - drop);
  EmbeddingMatrix result(std::move(out));
  return renormalize ? normalize_rows(result) : result;
}

Embeddings complement(const Embeddings& projected, Eigen::Index drop, bool renormalize) {
  return Embeddings{projected.vocab, complement(projected.matrix, drop, renormalize)};
}

std::string format_rotation(const Rotation& rot) {
  if (rot.signal_name.empty() || has_whitespace(rot.signal_name))
    throw UsageError("rotation signal name must be a non-empty token without whitespace");
  const Eigen::Index d = rot.dim();
  std::string out = "densray " + std::to_string(d) + " " + std::string(method_name(rot.method)) +
                    " " + rot.signal_name + "\n";
  if (rot.eigenvalues.size() == 0) {
    out += "-\n";
  } else {
    out += join_doubles(std::span<const double>(rot.eigenvalues.data(), static_cast<std::size_t>(d)));
    out += '\n';
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    const Vector row = rot.q.row(i).transpose();
    out += join_doubles(std::span<const double>(row.data(), static_cast<std::size_t>(d)));
    out += '\n';
  }
  return out;
}

void save_rotation(const std::filesystem::path& path, const Rotation& rot) {
  write_file(path, format_rotation(rot));
}

Rotation parse_rotation(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw DataError("rotation file is empty");
  const auto header = split_whitespace(lines[0]);
  std::size_t d = 0;
  if (header.size() != 4 || header[0] != "densray" || !parse_size(header[1], d) || d == 0)
    throw DataError("rotation header must be 'densray <d> <method> <signal_name>'");
  if (lines.size() < d + 2) throw DataError("rotation file is truncated");

  Rotation rot;
  rot.method = parse_method(header[2]);
  rot.signal_name = std::string(header[3]);
  const auto di = static_cast<Eigen::Index>(d);
  if (lines[1] != "-") {
    const auto values = parse_doubles(lines[1]);
    if (values.size() != d) throw DataError("rotation eigenvalue count mismatch");
    rot.eigenvalues = Eigen::Map<const Vector>(values.data(), di);
  }
  rot.q.resize(di, di);
  for (std::size_t i = 0; i < d; ++i) {
    const auto values = parse_doubles(lines[i + 2]);
    if (values.size() != d) throw DataError("rotation row " + std::to_string(i) + " has wrong length");
    for (std::size_t j = 0; j < d; ++j)
      rot.q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[j];
  }
  if (!rot.q.allFinite()) throw DataError("rotation contains non-finite values");
  if (orthogonality_error(rot.q) > 1e-8) throw NumericError("rotation matrix is not orthogonal");
  return rot;
}

Rotation load_rotation(const std::filesystem::path& path) { return parse_rotation(read_file(path)); }

}  // namespace densray
