#pragma once

#include "densray/embeddings.hpp"

#include <cstdint>

namespace densray {

/// A square real matrix checked for symmetry on construction:
/// |a_ij - a_ji| <= 1e-9 * (1 + max|a|). The stored matrix is symmetrized.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(Matrix data);

  Eigen::Index dim() const noexcept { return data_.rows(); }
  const Matrix& data() const noexcept { return data_; }

 private:
  Matrix data_;
};

/// Eigenvalues in descending order; column i of `vectors` belongs to values[i].
/// Each eigenvector is sign-normalized so that its entry of largest magnitude
/// (first such index on ties) is positive.
struct EigenBasis {
  Vector values;
  Matrix vectors;
  int sweeps = 0;
};

struct JacobiOptions {
  /// Convergence when the off-diagonal Frobenius norm drops below
  /// tolerance * max(1, ||A||_F).
  double tolerance = 1e-12;
  int max_sweeps = 100;
};

/// Full eigendecomposition by cyclic Jacobi rotations.
EigenBasis eig_symmetric(const SymmetricMatrix& a, const JacobiOptions& options = {});

/// Flips v so its largest-magnitude entry is positive.
void normalize_sign(Eigen::Ref<Vector> v);

/// Extends unit vector q to a d x d orthogonal matrix whose first column is q.
/// Remaining columns come from seeded Gaussian draws, orthonormalized by
/// modified Gram-Schmidt (two passes); draws whose residual norm is below
/// 1e-8 are redrawn.
Matrix complete_orthogonal(const Vector& q, std::uint64_t seed);

/// max_ij |(Q^T Q - I)_ij|
double orthogonality_error(const Matrix& q);

}  // namespace densray
