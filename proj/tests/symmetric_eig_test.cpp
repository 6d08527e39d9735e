#include "densray/error.hpp"
#include "densray/symmetric_eig.hpp"
#include "support/worlds.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace densray {
namespace {

using testing::random_symmetric;

// Roots of the characteristic polynomial of a symmetric matrix with d <= 3,
// descending. The 3x3 case uses the trigonometric solution of the depressed cubic.
std::vector<double> char_poly_roots(const Matrix& a) {
  const auto d = a.rows();
  if (d == 1) return {a(0, 0)};
  if (d == 2) {
    const double mean = (a(0, 0) + a(1, 1)) / 2.0;
    const double r = std::hypot((a(0, 0) - a(1, 1)) / 2.0, a(0, 1));
    return {mean + r, mean - r};
  }
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = a.trace() / 3.0;
  if (p1 == 0.0) {
    std::vector<double> v{a(0, 0), a(1, 1), a(2, 2)};
    std::sort(v.rbegin(), v.rend());
    return v;
  }
  const double p2 = std::pow(a(0, 0) - q, 2) + std::pow(a(1, 1) - q, 2) + std::pow(a(2, 2) - q, 2) + 2 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const Matrix b = (a - q * Matrix::Identity(3, 3)) / p;
  const double det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                     b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                     b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  const double r = std::clamp(det / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double l1 = q + 2 * p * std::cos(phi);
  const double l3 = q + 2 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  return {l1, 3 * q - l1 - l3, l3};
}

TEST(EigSymmetric, Identity) {
  const EigenBasis e = eig_symmetric(SymmetricMatrix(Matrix::Identity(3, 3)));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(e.values[i], 1.0);
  EXPECT_LE(orthogonality_error(e.vectors), 1e-12);
}

TEST(EigSymmetric, WorkedTwoByTwo) {
  Matrix a(2, 2);
  a << 4, 4, 4, 4;
  const EigenBasis e = eig_symmetric(SymmetricMatrix(a));
  EXPECT_NEAR(e.values[0], 8.0, 1e-12);
  EXPECT_NEAR(e.values[1], 0.0, 1e-12);
  EXPECT_NEAR(e.vectors(0, 0), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(e.vectors(1, 0), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(EigSymmetric, RandomSixBySixReconstruction) {
  std::mt19937_64 rng(6);
  const SymmetricMatrix a = random_symmetric(rng, 6);
  const EigenBasis e = eig_symmetric(a);
  const Matrix rec = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
  EXPECT_LE((rec - a.data()).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(EigSymmetric, PropertiesOnRandomMatrices) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> dim(1, 24);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = dim(rng);
    const SymmetricMatrix a = random_symmetric(rng, d, trial % 2 ? 1.0 : 100.0);
    const EigenBasis e = eig_symmetric(a);
    const Matrix& v = e.vectors;
    EXPECT_LE(orthogonality_error(v), 1e-8);
    for (Eigen::Index i = 1; i < d; ++i) EXPECT_GE(e.values[i - 1], e.values[i]);
    for (Eigen::Index i = 0; i < d; ++i) {
      const Vector residual = a.data() * v.col(i) - e.values[i] * v.col(i);
      EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-7 * (1 + std::abs(e.values[i])));
      // Sign convention: the largest-magnitude entry (first on ties) is positive.
      Eigen::Index arg = 0;
      v.col(i).cwiseAbs().maxCoeff(&arg);
      EXPECT_GT(v(arg, i), 0.0);
    }
    const double trace = a.data().trace();
    EXPECT_NEAR(e.values.sum(), trace, 1e-7 * (1 + std::abs(trace)));
  }
}

TEST(EigSymmetric, MatchesCharacteristicPolynomialForSmallDims) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const auto d = 1 + trial % 3;
    const SymmetricMatrix a = random_symmetric(rng, d, 3.0);
    const EigenBasis e = eig_symmetric(a);
    const auto roots = char_poly_roots(a.data());
    for (Eigen::Index i = 0; i < d; ++i) EXPECT_NEAR(e.values[i], roots[static_cast<std::size_t>(i)], 1e-8);
  }
}

TEST(EigSymmetric, SpectrumInvariantUnderOrthogonalConjugation) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const SymmetricMatrix a = random_symmetric(rng, 8);
    const Matrix r = complete_orthogonal(testing::random_unit(rng, 8), 100 + static_cast<std::uint64_t>(trial));
    const Matrix conj = r * a.data() * r.transpose();
    const EigenBasis e1 = eig_symmetric(a);
    const EigenBasis e2 = eig_symmetric(SymmetricMatrix((conj + conj.transpose()) / 2.0));
    EXPECT_LE((e1.values - e2.values).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(EigSymmetric, DegenerateSpectrumProjector) {
  // diag(2, 2, 1) conjugated by a rotation: the top eigenspace is 2-dimensional,
  // so only its projector is determined.
  std::mt19937_64 rng(12);
  const Matrix r = complete_orthogonal(testing::random_unit(rng, 3), 5);
  Vector diag(3);
  diag << 2, 2, 1;
  const Matrix a = r * diag.asDiagonal() * r.transpose();
  const EigenBasis e = eig_symmetric(SymmetricMatrix((a + a.transpose()) / 2.0));
  const Matrix p_expected = r.leftCols(2) * r.leftCols(2).transpose();
  const Matrix p_got = e.vectors.leftCols(2) * e.vectors.leftCols(2).transpose();
  EXPECT_LE((p_expected - p_got).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(EigSymmetric, Deterministic) {
  std::mt19937_64 rng(13);
  const SymmetricMatrix a = random_symmetric(rng, 12);
  const EigenBasis e1 = eig_symmetric(a);
  const EigenBasis e2 = eig_symmetric(a);
  EXPECT_EQ(e1.values, e2.values);
  EXPECT_EQ(e1.vectors, e2.vectors);
}

TEST(EigSymmetric, InputValidation) {
  Matrix a(2, 2);
  a << 1, 2, 3, 1;
  EXPECT_THROW(SymmetricMatrix{a}, UsageError);
  a << 1, std::nan(""), std::nan(""), 1;
  EXPECT_THROW(SymmetricMatrix{a}, NumericError);
  EXPECT_THROW(SymmetricMatrix(Matrix(2, 3)), UsageError);
  EXPECT_THROW(SymmetricMatrix(Matrix(0, 0)), UsageError);
  // Asymmetry within tolerance is accepted and symmetrized.
  a << 1, 2, 2 + 1e-12, 1;
  const SymmetricMatrix s(a);
  EXPECT_EQ(s.data()(0, 1), s.data()(1, 0));
}

TEST(EigSymmetric, SweepBudgetExhaustionIsNumericError) {
  std::mt19937_64 rng(14);
  const SymmetricMatrix a = random_symmetric(rng, 10);
  EXPECT_THROW(eig_symmetric(a, JacobiOptions{1e-12, 1}), NumericError);
}

TEST(NormalizeSign, FirstLargestWins) {
  Vector v(3);
  v << 0.5, -0.5, 0.1;
  normalize_sign(v);
  EXPECT_GT(v[0], 0.0);
  v << -0.5, 0.5, 0.1;
  normalize_sign(v);
  EXPECT_GT(v[0], 0.0);
  EXPECT_LT(v[1], 0.0);
}

TEST(CompleteOrthogonal, AxisVector) {
  Vector q = Vector::Zero(3);
  q[0] = 1.0;
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    const Matrix m = complete_orthogonal(q, seed);
    EXPECT_LE(orthogonality_error(m), 1e-8);
    EXPECT_EQ(Vector(m.col(0)), q);
  }
}

TEST(CompleteOrthogonal, DeterministicAndOrthogonal) {
  std::mt19937_64 rng(15);
  const Vector q = testing::random_unit(rng, 10);
  const Matrix a = complete_orthogonal(q, 7);
  const Matrix b = complete_orthogonal(q, 7);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, complete_orthogonal(q, 8));
  EXPECT_LE(orthogonality_error(a), 1e-8);
  EXPECT_EQ(Vector(a.col(0)), q);  // bit-identical first column
}

TEST(CompleteOrthogonal, RejectsNonUnit) {
  Vector q = Vector::Ones(3);
  EXPECT_THROW(complete_orthogonal(q, 0), UsageError);
}

TEST(CompleteOrthogonal, OneDimensional) {
  Vector q(1);
  q << 1.0;
  const Matrix m = complete_orthogonal(q, 0);
  ASSERT_EQ(m.rows(), 1);
  EXPECT_EQ(m(0, 0), 1.0);
}

}  // namespace
}  // namespace densray
