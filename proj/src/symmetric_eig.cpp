#include "densray/symmetric_eig.hpp"

#include "densray/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace densray {

SymmetricMatrix::SymmetricMatrix(Matrix data) : data_(std::move(data)) {
  if (data_.rows() != data_.cols()) throw UsageError("symmetric matrix must be square");
  if (data_.rows() == 0) throw UsageError("symmetric matrix must be non-empty");
  if (!data_.allFinite()) throw NumericError("symmetric matrix contains non-finite entries");
  const double scale = 1.0 + data_.cwiseAbs().maxCoeff();
  const double asym = (data_ - data_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale) throw UsageError("matrix is not symmetric");
  data_ = (0.5 * (data_ + data_.transpose())).eval();
}

void normalize_sign(Eigen::Ref<Vector> v) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      arg = i;
    }
  }
  if (v.size() > 0 && v[arg] < 0.0) v = -v;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

// Applies the rotation zeroing a(p,q) to both sides of `a` and accumulates it
// into `v`. Standard Rutishauser formulation.
void rotate(Matrix& a, Matrix& v, Eigen::Index p, Eigen::Index q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  for (Eigen::Index k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

EigenBasis eig_symmetric(const SymmetricMatrix& sym, const JacobiOptions& options) {
  Matrix a = sym.data();
  const Eigen::Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);

  const double threshold = options.tolerance * std::max(1.0, a.norm());
  int sweep = 0;
  while (off_diagonal_norm(a) > threshold) {
    if (sweep == options.max_sweeps)
      throw NumericError("Jacobi eigensolver did not converge in " +
                         std::to_string(options.max_sweeps) + " sweeps");
    ++sweep;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Skip entries that are negligible relative to both diagonals.
        if (sweep > 4 && std::abs(a(p, p)) + 100.0 * std::abs(apq) == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + 100.0 * std::abs(apq) == std::abs(a(q, q))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        rotate(a, v, p, q);
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

  EigenBasis out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  out.sweeps = sweep;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values[k] = a(src, src);
    out.vectors.col(k) = v.col(src);
    normalize_sign(out.vectors.col(k));
  }
  return out;
}

double orthogonality_error(const Matrix& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

Matrix complete_orthogonal(const Vector& q, std::uint64_t seed) {
  const Eigen::Index d = q.size();
  if (d == 0) throw UsageError("complete_orthogonal: empty vector");
  if (!q.allFinite() || std::abs(q.norm() - 1.0) > 1e-8)
    throw UsageError("complete_orthogonal: q must be a unit vector");

  constexpr int kRetryBudget = 32;
  constexpr double kMinResidual = 1e-8;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Matrix out(d, d);
  out.col(0) = q;
  for (Eigen::Index j = 1; j < d; ++j) {
    int attempts = 0;
    while (true) {
      Vector c(d);
      for (Eigen::Index i = 0; i < d; ++i) c[i] = gauss(rng);
      const double drawn = c.norm();
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index k = 0; k < j; ++k) c -= out.col(k).dot(c) * out.col(k);
      const double residual = c.norm();
      if (residual > kMinResidual * std::max(1.0, drawn)) {
        out.col(j) = c / residual;
        break;
      }
      if (++attempts == kRetryBudget)
        throw NumericError("complete_orthogonal: degenerate random draws");
    }
  }
  // Column 0 is kept bit-identical to q.
  out.col(0) = q;
  return out;
}

}  // namespace densray
