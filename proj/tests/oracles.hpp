#pragma once

// Test-side reference constructions. They use std::mt19937_64 and plain
// Eigen decompositions, never the library's generators or SPD routines.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

  Matrix gaussian(Eigen::Index rows, Eigen::Index cols) {
    Matrix g(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = normal();
    }
    return g;
  }

  Matrix orthogonal(Eigen::Index dim) {
    Eigen::HouseholderQR<Matrix> qr(gaussian(dim, dim));
    return qr.householderQ() * Matrix::Identity(dim, dim);
  }

  /// Q diag(lambda) Q^T with eigenvalues spread log-uniformly over [1/cond, 1].
  Matrix spd(Eigen::Index dim, double cond = 100.0) {
    const Matrix q = orthogonal(dim);
    Vector lambda(dim);
    for (Eigen::Index i = 0; i < dim; ++i) lambda(i) = std::pow(cond, -uniform(0.0, 1.0));
    Matrix s = q * lambda.asDiagonal() * q.transpose();
    return 0.5 * (s + s.transpose());
  }

  /// Lower triangular with diagonal in [0.5, 2] and off-diagonal entries N(0, 0.3^2).
  Matrix lower(Eigen::Index dim) {
    Matrix l = Matrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      l(i, i) = uniform(0.5, 2.0);
      for (Eigen::Index j = 0; j < i; ++j) l(i, j) = 0.3 * normal();
    }
    return l;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

inline double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / b.norm(); }

inline Vector singular_values(const Matrix& a) { return Eigen::JacobiSVD<Matrix>(a).singularValues(); }

inline double condition(const Matrix& a) {
  const Vector s = singular_values(a);
  return s(0) / s(s.size() - 1);
}

/// k square matrices Q_i / sqrt(n k): both Gram sums equal I / n exactly in
/// exact arithmetic.
inline std::vector<Matrix> balanced(Rng& rng, Eigen::Index n, int k) {
  std::vector<Matrix> out;
  for (int i = 0; i < k; ++i) out.push_back(rng.orthogonal(n) / std::sqrt(static_cast<double>(n * k)));
  return out;
}

/// Direct evaluation of the grad norm formula, entry by entry.
inline double grad_norm(const std::vector<Matrix>& a) {
  const Eigen::Index m = a.front().rows();
  const Eigen::Index n = a.front().cols();
  double left = 0.0;
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) {
      double s = r == c ? -1.0 / static_cast<double>(m) : 0.0;
      for (const Matrix& ai : a) s += ai.row(r).dot(ai.row(c));
      left += s * s;
    }
  }
  double right = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      double s = r == c ? -1.0 / static_cast<double>(n) : 0.0;
      for (const Matrix& ai : a) s += ai.col(r).dot(ai.col(c));
      right += s * s;
    }
  }
  return std::sqrt(left + right);
}

}  // namespace oracle
