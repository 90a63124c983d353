#include "opscale/spd.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "opscale/errors.hpp"

namespace opscale {
namespace {

void require_square(const Matrix& a, const char* what) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw InvalidArgument(std::string(what) + ": expected a nonempty square matrix, got " +
                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

Matrix factor_lower(const Matrix& sym) {
  if (!all_finite(sym)) throw NotPositiveDefinite("cholesky: non-finite entry");
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("cholesky: nonpositive pivot");
  Matrix l = llt.matrixL();
  for (Index i = 0; i < l.rows(); ++i) {
    if (!(l(i, i) > 0.0) || !std::isfinite(l(i, i))) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(i) + " is not positive");
    }
  }
  return l;
}

// V diag(f(lambda)) V^T, symmetrized.
template <typename F>
Matrix spectral_apply(const SymmetricEigen& eig, F&& f) {
  Vector mapped = eig.values.unaryExpr(std::forward<F>(f));
  return symmetrized(eig.vectors * mapped.asDiagonal() * eig.vectors.transpose());
}

void require_positive_spectrum(const SymmetricEigen& eig, const char* what) {
  const double top = eig.values(0);
  const double bottom = eig.values(eig.values.size() - 1);
  if (!(top > 0.0) || !(bottom > kEigenvalueFloor * top)) {
    throw NotPositiveDefinite(std::string(what) + ": eigenvalue " + std::to_string(bottom) +
                              " not positive relative to " + std::to_string(top));
  }
}

const Matrix& checked_symmetric(const Matrix& s) {
  require_square(s, "SpdMatrix");
  if (!s.allFinite()) throw InvalidArgument("SpdMatrix: non-finite entry");
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance) {
    throw InvalidArgument("SpdMatrix: asymmetry " + std::to_string(asym) + " exceeds tolerance");
  }
  return s;
}

}  // namespace

bool all_finite(const Matrix& a) { return a.allFinite(); }

Matrix symmetrized(const Matrix& s) { return 0.5 * (s + s.transpose()); }

LowerTriangular::LowerTriangular(Matrix data) : data_(std::move(data)) {
  require_square(data_, "LowerTriangular");
  for (Index i = 0; i < data_.rows(); ++i) {
    if (!(data_(i, i) > 0.0)) {
      throw InvalidArgument("LowerTriangular: diagonal entry " + std::to_string(i) +
                            " is not positive");
    }
    for (Index j = i + 1; j < data_.cols(); ++j) {
      if (data_(i, j) != 0.0) throw InvalidArgument("LowerTriangular: nonzero above diagonal");
    }
  }
}

SpdMatrix::SpdMatrix(Matrix symmetric, LowerTriangular chol)
    : data_(std::move(symmetric)), chol_(std::move(chol)) {}

SpdMatrix::SpdMatrix(const Matrix& s) : SpdMatrix(from_symmetric_part(checked_symmetric(s))) {}

SpdMatrix SpdMatrix::from_symmetric_part(const Matrix& s) {
  require_square(s, "SpdMatrix");
  Matrix sym = symmetrized(s);
  Matrix l = factor_lower(sym);
  return SpdMatrix(std::move(sym), LowerTriangular(std::move(l)));
}

SpdMatrix SpdMatrix::identity(Index dim) {
  return SpdMatrix(Matrix::Identity(dim, dim), LowerTriangular(Matrix::Identity(dim, dim)));
}

LowerTriangular cholesky_lower(const SpdMatrix& s) { return s.cholesky(); }

LowerTriangular cholesky_lower(const Matrix& s) {
  require_square(s, "cholesky_lower");
  return LowerTriangular(factor_lower(symmetrized(s)));
}

LowerTriangular tri_solve_inverse(const LowerTriangular& l) {
  const Matrix& a = l.matrix();
  for (Index i = 0; i < a.rows(); ++i) {
    if (a(i, i) == 0.0 || !std::isfinite(a(i, i))) {
      throw Singular("tri_solve_inverse: diagonal entry " + std::to_string(i));
    }
  }
  Matrix inv = a.triangularView<Eigen::Lower>().solve(Matrix::Identity(a.rows(), a.cols()));
  inv.triangularView<Eigen::StrictlyUpper>().setZero();
  if (!all_finite(inv)) throw Singular("tri_solve_inverse: inverse overflowed");
  return LowerTriangular(std::move(inv));
}

SymmetricEigen sym_eigen(const Matrix& s) {
  require_square(s, "sym_eigen");
  if (!all_finite(s)) throw InvalidArgument("sym_eigen: non-finite entry");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    // Eigen's tridiagonal QR gives up after 30 sweeps per eigenvalue.
    throw NoConvergence("sym_eigen: QR iteration exceeded 30*n sweeps for n = " +
                        std::to_string(s.rows()));
  }
  // Eigen returns ascending order.
  return {solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
}

SpdMatrix spd_power(const SpdMatrix& s, double w) {
  if (!std::isfinite(w)) throw InvalidArgument("spd_power: exponent must be finite");
  const SymmetricEigen eig = sym_eigen(s.matrix());
  require_positive_spectrum(eig, "spd_power");
  return SpdMatrix::from_symmetric_part(
      spectral_apply(eig, [w](double lambda) { return std::pow(lambda, w); }));
}

SpdMatrix geodesic_sharp(const SpdMatrix& x, const SpdMatrix& xt, double w) {
  if (x.dim() != xt.dim()) throw InvalidArgument("geodesic_sharp: dimension mismatch");
  if (!std::isfinite(w)) throw InvalidArgument("geodesic_sharp: exponent must be finite");
  const SymmetricEigen eig = sym_eigen(x.matrix());
  require_positive_spectrum(eig, "geodesic_sharp");
  const Matrix root = spectral_apply(eig, [](double lambda) { return std::sqrt(lambda); });
  const Matrix inv_root =
      spectral_apply(eig, [](double lambda) { return 1.0 / std::sqrt(lambda); });
  const SpdMatrix inner =
      SpdMatrix::from_symmetric_part(inv_root * xt.matrix() * inv_root);
  return SpdMatrix::from_symmetric_part(root * spd_power(inner, w).matrix() * root);
}

Matrix hilbert(Index n) {
  if (n < 1) throw InvalidArgument("hilbert: n must be positive");
  Matrix h(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) h(i, j) = 1.0 / static_cast<double>(i + j + 1);
  }
  return h;
}

}  // namespace opscale
