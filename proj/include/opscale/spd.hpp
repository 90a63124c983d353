#pragma once

// Dense symmetric positive definite linear algebra: Cholesky factors,
// triangular inversion, symmetric eigendecomposition, real matrix powers and
// the geodesic of the Hilbert (affine-invariant) metric.

#include <Eigen/Dense>

namespace opscale {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Absolute per-entry tolerance on |S(i,j) - S(j,i)| accepted by SpdMatrix.
inline constexpr double kSymmetryTolerance = 1e-12;

/// Eigenvalues at or below this fraction of the largest one are treated as
/// nonpositive by spd_power and geodesic_sharp.
inline constexpr double kEigenvalueFloor = 1e-14;

bool all_finite(const Matrix& a);

/// Returns (S + S^T) / 2.
Matrix symmetrized(const Matrix& s);

/// Lower-triangular matrix with strictly positive diagonal.
class LowerTriangular {
 public:
  /// Throws InvalidArgument if `data` is not square, has a nonzero entry above
  /// the diagonal, or a diagonal entry that is not strictly positive.
  explicit LowerTriangular(Matrix data);

  Index dim() const { return data_.rows(); }
  const Matrix& matrix() const { return data_; }

 private:
  Matrix data_;
};

/// Symmetric positive definite matrix. The lower Cholesky factor is computed
/// on construction (that is the definiteness check) and kept.
class SpdMatrix {
 public:
  /// Accepts `s` if it is square, finite and symmetric to within
  /// kSymmetryTolerance per entry; stores its exact symmetric part.
  /// Throws InvalidArgument on shape/symmetry problems and
  /// NotPositiveDefinite if the Cholesky factorization fails.
  explicit SpdMatrix(const Matrix& s);

  /// Stores (s + s^T)/2 without the symmetry tolerance check. Used for
  /// matrices that are symmetric in exact arithmetic but were assembled in
  /// floating point (Gram sums, products V D V^T).
  static SpdMatrix from_symmetric_part(const Matrix& s);

  static SpdMatrix identity(Index dim);

  Index dim() const { return data_.rows(); }
  const Matrix& matrix() const { return data_; }
  const LowerTriangular& cholesky() const { return chol_; }

 private:
  SpdMatrix(Matrix symmetric, LowerTriangular chol);

  Matrix data_;
  LowerTriangular chol_;
};

/// The unique lower-triangular C with positive diagonal and C C^T = S.
LowerTriangular cholesky_lower(const SpdMatrix& s);

/// Cholesky factor of the exact symmetric part of `s`. Throws
/// NotPositiveDefinite on a nonpositive or non-finite pivot.
LowerTriangular cholesky_lower(const Matrix& s);

/// Inverse of a lower-triangular factor. Throws Singular if a diagonal entry
/// is zero or non-finite (which the LowerTriangular invariant already rules
/// out for valid inputs, but the check also catches overflow in the result).
LowerTriangular tri_solve_inverse(const LowerTriangular& l);

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // orthogonal, column j pairs with values(j)
};

/// Eigendecomposition of a symmetric matrix. Only the lower triangle of `s`
/// is read. Throws NoConvergence if the QR iteration fails.
SymmetricEigen sym_eigen(const Matrix& s);

/// S^w = V diag(lambda^w) V^T for any finite real w. Throws
/// NotPositiveDefinite if the smallest eigenvalue is at or below
/// kEigenvalueFloor * lambda_max; eigenvalues are never clamped.
SpdMatrix spd_power(const SpdMatrix& s, double w);

/// X #_w Xt = X^{1/2} (X^{-1/2} Xt X^{-1/2})^w X^{1/2}.
///
/// w = 0 gives X and w = 1 gives Xt (up to rounding). Defined for every real
/// w; values outside [0, 1] extrapolate along the geodesic, which is what
/// overrelaxation uses.
SpdMatrix geodesic_sharp(const SpdMatrix& x, const SpdMatrix& xt, double w);

/// n x n Hilbert matrix, H(i, j) = 1 / (i + j + 1) with 0-based indices.
Matrix hilbert(Index n);

}  // namespace opscale
