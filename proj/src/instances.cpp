#include "opscale/instances.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opscale/errors.hpp"

namespace opscale {

Matrix haar_orthogonal(Index dim, CounterRng& rng) {
  if (dim < 1) throw InvalidArgument("haar_orthogonal: dim must be positive");
  Matrix z(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) z(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const auto r = qr.matrixQR().diagonal();
  for (Index j = 0; j < dim; ++j) {
    if (r(j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Matrix haar_orthogonal(Index dim, Seed seed) {
  CounterRng rng(seed, RngDomain::kGeneric, 0);
  return haar_orthogonal(dim, rng);
}

ScalingProblem hilbert_instance(Index n, Index k, Seed seed) {
  if (n < 1 || k < 1) throw InvalidArgument("hilbert_instance: n and k must be positive");
  const Matrix h = hilbert(n);
  std::vector<Matrix> matrices;
  matrices.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    CounterRng rng(seed, RngDomain::kHilbertFactors, static_cast<std::uint32_t>(i));
    matrices.emplace_back(haar_orthogonal(n, rng) * h);
  }
  return ScalingProblem(std::move(matrices));
}

void FrameSpec::validate() const {
  if (n < 1) throw InvalidArgument("frame: n must be positive");
  if (k < n) throw InvalidArgument("frame: k must be at least n");
  if (!(kappa > 1.0) || !std::isfinite(kappa)) throw InvalidArgument("frame: kappa must exceed 1");
}

FrameInstance frame_instance(const FrameSpec& spec, Seed seed) {
  spec.validate();
  const Index n = spec.n;
  const Index k = spec.k;
  CounterRng left_rng(seed, RngDomain::kFrameLeft, 0);
  CounterRng right_rng(seed, RngDomain::kFrameRight, 0);
  const Matrix q = haar_orthogonal(k, left_rng);
  const Matrix p = haar_orthogonal(n, right_rng);
  const Vector d = Vector::LinSpaced(n, 1.0 / spec.kappa, 1.0);
  const Matrix b = q.leftCols(n) * d.asDiagonal() * p.transpose();

  std::vector<Vector> vectors;
  std::vector<Matrix> matrices;
  vectors.reserve(static_cast<std::size_t>(k));
  matrices.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    Vector x = b.row(i).transpose();
    const double norm = x.norm();
    if (norm < 1e-300) throw DegenerateRow("frame: row " + std::to_string(i) + " of B vanishes");
    x /= norm;
    if (spec.extreme && i == 0) x = Vector::Unit(n, 0);
    Matrix a = Matrix::Zero(n, k);
    a.col(i) = x;
    matrices.push_back(std::move(a));
    vectors.push_back(std::move(x));
  }
  return {ScalingProblem(std::move(matrices)), std::move(vectors)};
}

std::vector<Vector> frame_vectors(const ScalingProblem& p) {
  if (p.k() != p.n()) {
    throw InvalidArgument("frame_vectors: expected k = " + std::to_string(p.n()) + " matrices");
  }
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(p.k()));
  for (Index i = 0; i < p.k(); ++i) out.emplace_back(p[i].col(i));
  return out;
}

ScalingProblem conditioned_instance(Index m, Index n, Index k, double cond, Seed seed) {
  if (m < 1 || n < 1 || k < 1) throw InvalidArgument("conditioned_instance: empty dimensions");
  if (!(cond >= 1.0) || !std::isfinite(cond)) {
    throw InvalidArgument("conditioned_instance: cond must be >= 1");
  }
  const Index r = std::min(m, n);
  const Vector sigma = Vector::LinSpaced(r, 1.0, 1.0 / cond);
  Matrix s = Matrix::Zero(m, n);
  s.topLeftCorner(r, r) = sigma.asDiagonal();
  std::vector<Matrix> matrices;
  matrices.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    const auto base = static_cast<std::uint32_t>(2 * i);
    CounterRng u_rng(seed, RngDomain::kConditioned, base);
    CounterRng v_rng(seed, RngDomain::kConditioned, base + 1);
    const Matrix u = haar_orthogonal(m, u_rng);
    const Matrix v = haar_orthogonal(n, v_rng);
    matrices.emplace_back(u * s * v.transpose());
  }
  return ScalingProblem(std::move(matrices));
}

}  // namespace opscale
