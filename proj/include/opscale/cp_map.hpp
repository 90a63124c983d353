#pragma once

// The completely positive map Phi(Y) = sum_i A_i Y A_i^T defined by a tuple of
// m x n matrices, its adjoint, scalings A_i -> L A_i R^T, and the residual
// ("grad norm") of the doubly balanced conditions
//
//   sum_i A_i A_i^T = I_m / m,     sum_i A_i^T A_i = I_n / n.

#include <span>
#include <vector>

#include "opscale/spd.hpp"

namespace opscale {

/// Matrices A_1..A_k, all m x n, finite, with Phi(I_n) and Phi*(I_m) positive
/// definite. The latter is what makes every Sinkhorn-type update well defined.
class ScalingProblem {
 public:
  /// Throws InvalidArgument on an empty tuple, ragged shapes or non-finite
  /// entries, NotPositiveDefinite if Phi(I) or Phi*(I) is singular.
  explicit ScalingProblem(std::vector<Matrix> matrices);

  Index m() const { return m_; }
  Index n() const { return n_; }
  Index k() const { return static_cast<Index>(matrices_.size()); }

  std::span<const Matrix> matrices() const { return matrices_; }
  const Matrix& operator[](Index i) const { return matrices_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<Matrix> matrices_;
  Index m_ = 0;
  Index n_ = 0;
};

/// Left factor L (m x m) and right factor R (n x n) of a scaling.
struct ScalingPair {
  Matrix left;
  Matrix right;

  static ScalingPair identity(Index m, Index n);

  /// True when both factors are finite and have smallest singular value > 0.
  bool invertible() const;
};

// Phi and Phi* on a raw matrix tuple; the ScalingProblem overloads forward
// here. Results are symmetrized and must be positive definite.
SpdMatrix phi(std::span<const Matrix> a, const Matrix& y);
SpdMatrix phi_adjoint(std::span<const Matrix> a, const Matrix& x);

SpdMatrix phi(const ScalingProblem& p, const SpdMatrix& y);
SpdMatrix phi_adjoint(const ScalingProblem& p, const SpdMatrix& x);

/// Returns the problem with matrices L A_i R^T. The input is not modified.
ScalingProblem apply_scaling(const ScalingProblem& p, const ScalingPair& s);

/// L A_i R^T for every i, without the well-posedness check of ScalingProblem.
std::vector<Matrix> scaled_matrices(std::span<const Matrix> a, const Matrix& left,
                                    const Matrix& right);

/// sqrt(||sum A A^T - I/m||_F^2 + ||sum A^T A - I/n||_F^2).
double grad_norm(std::span<const Matrix> a);
double grad_norm(const ScalingProblem& p);

/// Result of turning an operator-scaling solution for A_i = x_i e_i^T into a
/// frame scaling: sum_i alpha_i^2 (P x_i)(P x_i)^T = I_n and
/// alpha_i^2 |P x_i|^2 = n / k.
struct FrameScaling {
  Matrix p;
  std::vector<double> alpha;
};

/// Relative off-diagonal magnitude (against ||R||_F) that frame_recover
/// still accepts as diagonal.
inline constexpr double kDiagonalTolerance = 1e-8;

/// P = sqrt(n) L and alpha_i = sqrt((R^T R)_ii), where (L, R) scales the
/// frame problem (L is n x n, R is k x k). Throws NotDiagonal if some
/// off-diagonal entry of R exceeds kDiagonalTolerance * ||R||_F.
FrameScaling frame_recover(const Matrix& left, const Matrix& right);

/// Frobenius norms of the defects in the two frame conditions.
struct FrameResidual {
  double tight = 0.0;        // ||sum alpha_i^2 (P x_i)(P x_i)^T - I_n||_F
  double equal_norm = 0.0;   // sqrt(sum_i (alpha_i^2 |P x_i|^2 - n/k)^2)
  double combined() const;   // sqrt(tight^2 + equal_norm^2)
};

FrameResidual frame_residual(std::span<const Vector> vectors, const FrameScaling& f);

}  // namespace opscale
