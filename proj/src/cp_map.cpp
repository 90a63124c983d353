#include "opscale/cp_map.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "opscale/errors.hpp"

namespace opscale {
namespace {

std::string shape(const Matrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

void require_tuple(std::span<const Matrix> a) {
  if (a.empty()) throw InvalidArgument("matrix tuple is empty");
}

}  // namespace

ScalingProblem::ScalingProblem(std::vector<Matrix> matrices) : matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw InvalidArgument("ScalingProblem: k must be at least 1");
  m_ = matrices_.front().rows();
  n_ = matrices_.front().cols();
  if (m_ == 0 || n_ == 0) throw InvalidArgument("ScalingProblem: empty matrix");
  for (std::size_t i = 0; i < matrices_.size(); ++i) {
    const Matrix& a = matrices_[i];
    if (a.rows() != m_ || a.cols() != n_) {
      throw InvalidArgument("ScalingProblem: matrix " + std::to_string(i) + " is " + shape(a) +
                            ", expected " + shape(matrices_.front()));
    }
    if (!all_finite(a)) {
      throw InvalidArgument("ScalingProblem: matrix " + std::to_string(i) + " has non-finite entries");
    }
  }
  try {
    phi(matrices_, Matrix::Identity(n_, n_));
    phi_adjoint(matrices_, Matrix::Identity(m_, m_));
  } catch (const NotPositiveDefinite&) {
    throw NotPositiveDefinite("ScalingProblem: Phi(I) or Phi*(I) is not positive definite");
  }
}

ScalingPair ScalingPair::identity(Index m, Index n) {
  return {Matrix::Identity(m, m), Matrix::Identity(n, n)};
}

bool ScalingPair::invertible() const {
  auto ok = [](const Matrix& f) {
    if (f.rows() == 0 || f.rows() != f.cols() || !all_finite(f)) return false;
    Eigen::JacobiSVD<Matrix> svd(f);
    return svd.singularValues()(svd.singularValues().size() - 1) > 0.0;
  };
  return ok(left) && ok(right);
}

SpdMatrix phi(std::span<const Matrix> a, const Matrix& y) {
  require_tuple(a);
  if (y.rows() != a.front().cols() || y.cols() != a.front().cols()) {
    throw InvalidArgument("phi: Y is " + shape(y) + ", A_i are " + shape(a.front()));
  }
  Matrix sum = Matrix::Zero(a.front().rows(), a.front().rows());
  for (const Matrix& ai : a) sum.noalias() += ai * y * ai.transpose();
  return SpdMatrix::from_symmetric_part(sum);
}

SpdMatrix phi_adjoint(std::span<const Matrix> a, const Matrix& x) {
  require_tuple(a);
  if (x.rows() != a.front().rows() || x.cols() != a.front().rows()) {
    throw InvalidArgument("phi_adjoint: X is " + shape(x) + ", A_i are " + shape(a.front()));
  }
  Matrix sum = Matrix::Zero(a.front().cols(), a.front().cols());
  for (const Matrix& ai : a) sum.noalias() += ai.transpose() * x * ai;
  return SpdMatrix::from_symmetric_part(sum);
}

SpdMatrix phi(const ScalingProblem& p, const SpdMatrix& y) { return phi(p.matrices(), y.matrix()); }

SpdMatrix phi_adjoint(const ScalingProblem& p, const SpdMatrix& x) {
  return phi_adjoint(p.matrices(), x.matrix());
}

std::vector<Matrix> scaled_matrices(std::span<const Matrix> a, const Matrix& left,
                                    const Matrix& right) {
  require_tuple(a);
  if (left.rows() != a.front().rows() || left.cols() != a.front().rows() ||
      right.rows() != a.front().cols() || right.cols() != a.front().cols()) {
    throw InvalidArgument("scaling factors " + shape(left) + ", " + shape(right) +
                          " do not match " + shape(a.front()));
  }
  std::vector<Matrix> out;
  out.reserve(a.size());
  for (const Matrix& ai : a) out.emplace_back(left * ai * right.transpose());
  return out;
}

ScalingProblem apply_scaling(const ScalingProblem& p, const ScalingPair& s) {
  return ScalingProblem(scaled_matrices(p.matrices(), s.left, s.right));
}

double grad_norm(std::span<const Matrix> a) {
  require_tuple(a);
  const Index m = a.front().rows();
  const Index n = a.front().cols();
  Matrix left = Matrix::Zero(m, m);
  Matrix right = Matrix::Zero(n, n);
  for (const Matrix& ai : a) {
    left.noalias() += ai * ai.transpose();
    right.noalias() += ai.transpose() * ai;
  }
  left.diagonal().array() -= 1.0 / static_cast<double>(m);
  right.diagonal().array() -= 1.0 / static_cast<double>(n);
  return std::sqrt(left.squaredNorm() + right.squaredNorm());
}

double grad_norm(const ScalingProblem& p) { return grad_norm(p.matrices()); }

FrameScaling frame_recover(const Matrix& left, const Matrix& right) {
  if (left.rows() == 0 || left.rows() != left.cols() || right.rows() == 0 ||
      right.rows() != right.cols()) {
    throw InvalidArgument("frame_recover: factors must be square");
  }
  const double scale = right.norm();
  Matrix off = right;
  off.diagonal().setZero();
  const double worst = off.cwiseAbs().maxCoeff();
  if (worst > kDiagonalTolerance * scale) {
    throw NotDiagonal("frame_recover: off-diagonal entry " + std::to_string(worst) +
                      " of R exceeds " + std::to_string(kDiagonalTolerance) + " * ||R||_F");
  }
  FrameScaling out;
  out.p = std::sqrt(static_cast<double>(left.rows())) * left;
  const Matrix gram = right.transpose() * right;
  out.alpha.reserve(static_cast<std::size_t>(right.rows()));
  for (Index i = 0; i < right.rows(); ++i) out.alpha.push_back(std::sqrt(gram(i, i)));
  return out;
}

double FrameResidual::combined() const { return std::hypot(tight, equal_norm); }

FrameResidual frame_residual(std::span<const Vector> vectors, const FrameScaling& f) {
  if (vectors.size() != f.alpha.size()) {
    throw InvalidArgument("frame_residual: " + std::to_string(vectors.size()) + " vectors but " +
                          std::to_string(f.alpha.size()) + " weights");
  }
  const Index n = f.p.rows();
  const double target = static_cast<double>(n) / static_cast<double>(vectors.size());
  Matrix frame = -Matrix::Identity(n, n);
  double equal_sq = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != f.p.cols()) throw InvalidArgument("frame_residual: vector size");
    const Vector px = f.p * vectors[i];
    const double a2 = f.alpha[i] * f.alpha[i];
    frame.noalias() += a2 * px * px.transpose();
    const double d = a2 * px.squaredNorm() - target;
    equal_sq += d * d;
  }
  return {frame.norm(), std::sqrt(equal_sq)};
}

}  // namespace opscale
