#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "opscale/errors.hpp"
#include "opscale/instances.hpp"
#include "oracles.hpp"

using namespace opscale;

TEST(Haar, OneByOneIsASign) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix q = haar_orthogonal(1, Seed{s});
    EXPECT_EQ(std::abs(q(0, 0)), 1.0);
  }
}

TEST(Haar, Orthogonal) {
  const Matrix q = haar_orthogonal(50, Seed{5});
  EXPECT_LT((q.transpose() * q - Matrix::Identity(50, 50)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Haar, Deterministic) {
  EXPECT_EQ(haar_orthogonal(7, Seed{9}), haar_orthogonal(7, Seed{9}));
  EXPECT_NE(haar_orthogonal(7, Seed{9}), haar_orthogonal(7, Seed{10}));
}

// A Haar matrix in O(2) has first column (cos t, sin t) with t uniform on the
// circle, and is a rotation or a reflection with probability 1/2 each. Every
// statistic below has mean 0 and the listed variance under that law.
TEST(Haar, TwoByTwoMatchesUniformAngle) {
  const int samples = 10000;
  CounterRng rng(Seed{123}, RngDomain::kGeneric, 77);
  double c1 = 0.0, s1 = 0.0, c2 = 0.0, s2 = 0.0, det = 0.0, col2 = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Matrix q = haar_orthogonal(2, rng);
    const double t = std::atan2(q(1, 0), q(0, 0));
    c1 += std::cos(t);
    s1 += std::sin(t);
    c2 += std::cos(2.0 * t);
    s2 += std::sin(2.0 * t);
    det += q.determinant();
    col2 += q(0, 1) + q(1, 1);
  }
  const double n = samples;
  const auto within = [&](double sum, double variance) {
    return std::abs(sum / n) <= 3.0 * std::sqrt(variance / n);
  };
  EXPECT_TRUE(within(c1, 0.5)) << c1 / n;
  EXPECT_TRUE(within(s1, 0.5)) << s1 / n;
  EXPECT_TRUE(within(c2, 0.5)) << c2 / n;
  EXPECT_TRUE(within(s2, 0.5)) << s2 / n;
  EXPECT_TRUE(within(det, 1.0)) << det / n;
  EXPECT_TRUE(within(col2, 1.0)) << col2 / n;
}

TEST(HilbertInstance, SingularValuesOfHilbertMatrix) {
  const ScalingProblem p = hilbert_instance(5, 7, Seed{1});
  EXPECT_EQ(p.m(), 5);
  EXPECT_EQ(p.n(), 5);
  EXPECT_EQ(p.k(), 7);
  const oracle::Vector h = oracle::singular_values(hilbert(5));
  for (Index i = 0; i < p.k(); ++i) {
    EXPECT_LT((oracle::singular_values(p[i]) - h).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(oracle::condition(p[i]) / 476600.0, 1.0, 1e-3);
  }
  EXPECT_NE(p[0], p[1]);
}

TEST(HilbertInstance, DeterministicAndResidualPositive) {
  const ScalingProblem a = hilbert_instance(4, 3, Seed{11});
  const ScalingProblem b = hilbert_instance(4, 3, Seed{11});
  for (Index i = 0; i < a.k(); ++i) EXPECT_EQ(a[i], b[i]);
  for (Index n = 2; n <= 6; ++n) EXPECT_GT(grad_norm(hilbert_instance(n, 3, Seed{1})), 0.0);
}

TEST(FrameSpec, Validation) {
  EXPECT_THROW((FrameSpec{5, 4, 10.0, false}.validate()), InvalidArgument);
  EXPECT_THROW((FrameSpec{5, 6, 1.0, false}.validate()), InvalidArgument);
  EXPECT_THROW((FrameSpec{0, 6, 10.0, false}.validate()), InvalidArgument);
  EXPECT_NO_THROW((FrameSpec{5, 5, 10.0, false}.validate()));
}

TEST(FrameInstance, StructureOfPaperConfiguration) {
  const FrameInstance inst = frame_instance({}, Seed{1});
  const ScalingProblem& p = inst.problem;
  EXPECT_EQ(p.m(), 50);
  EXPECT_EQ(p.n(), 55);
  EXPECT_EQ(p.k(), 55);
  ASSERT_EQ(inst.vectors.size(), 55u);
  Matrix left = Matrix::Zero(50, 50);
  Matrix outer = Matrix::Zero(50, 50);
  Matrix right = Matrix::Zero(55, 55);
  for (Index i = 0; i < p.k(); ++i) {
    const Vector& x = inst.vectors[static_cast<std::size_t>(i)];
    EXPECT_NEAR(x.norm(), 1.0, 1e-14);
    Matrix expected = Matrix::Zero(50, 55);
    expected.col(i) = x;
    EXPECT_EQ(p[i], expected);
    left += p[i] * p[i].transpose();
    outer += x * x.transpose();
    right += p[i].transpose() * p[i];
  }
  EXPECT_LT((left - outer).norm(), 1e-12);
  EXPECT_LT((right - Matrix::Identity(55, 55)).norm(), 1e-12);
  EXPECT_EQ(frame_vectors(p).size(), 55u);
  EXPECT_EQ(frame_vectors(p)[3], inst.vectors[3]);
}

TEST(FrameInstance, AdjointIsDiagonalForAnyX) {
  const FrameInstance inst = frame_instance({6, 9, 100.0, false}, Seed{4});
  oracle::Rng rng(50);
  const Matrix x = rng.spd(6);
  const Matrix image = phi_adjoint(inst.problem, SpdMatrix(x)).matrix();
  Matrix off = image;
  off.diagonal().setZero();
  EXPECT_EQ(off.norm(), 0.0);
  for (std::size_t i = 0; i < inst.vectors.size(); ++i) {
    const Vector& v = inst.vectors[i];
    EXPECT_NEAR(image(static_cast<Index>(i), static_cast<Index>(i)), v.dot(x * v), 1e-14);
  }
}

TEST(FrameInstance, VectorsAreNormalizedRowsOfReferenceConstruction) {
  const FrameSpec spec{6, 9, 1e3, false};
  const FrameInstance inst = frame_instance(spec, Seed{8});
  // Rebuild B = Q' D P^T with the documented streams.
  CounterRng left_rng(Seed{8}, RngDomain::kFrameLeft, 0);
  CounterRng right_rng(Seed{8}, RngDomain::kFrameRight, 0);
  const Matrix q = haar_orthogonal(9, left_rng);
  const Matrix pm = haar_orthogonal(6, right_rng);
  Vector d(6);
  for (Index j = 0; j < 6; ++j) d(j) = 1e-3 + (1.0 - 1e-3) * static_cast<double>(j) / 5.0;
  const Matrix b = q.leftCols(6) * d.asDiagonal() * pm.transpose();
  for (Index i = 0; i < 9; ++i) {
    const Vector row = b.row(i).transpose() / b.row(i).norm();
    EXPECT_LT((inst.vectors[static_cast<std::size_t>(i)] - row).norm(), 1e-14);
  }
  // Singular values of B: the diagonal of D, evenly spaced from 1/kappa to 1.
  const Vector s = oracle::singular_values(b);
  EXPECT_NEAR(s(0), 1.0, 1e-13);
  EXPECT_NEAR(s(5), 1e-3, 1e-13);
}

TEST(FrameInstance, ExtremeReplacesFirstMatrix) {
  const FrameInstance inst = frame_instance({50, 52, 1e7, true}, Seed{1});
  Matrix e11 = Matrix::Zero(50, 52);
  e11(0, 0) = 1.0;
  EXPECT_EQ(inst.problem[0], e11);
  EXPECT_EQ(inst.vectors[0], Vector::Unit(50, 0));
  EXPECT_EQ(inst.problem.k(), 52);
  const FrameInstance plain = frame_instance({50, 52, 1e7, false}, Seed{1});
  EXPECT_EQ(inst.problem[1], plain.problem[1]);
}

TEST(ConditionedInstance, ConditionNumber) {
  const ScalingProblem p = conditioned_instance(5, 4, 3, 100.0, Seed{2});
  EXPECT_EQ(p.m(), 5);
  EXPECT_EQ(p.n(), 4);
  for (Index i = 0; i < p.k(); ++i) EXPECT_NEAR(oracle::condition(p[i]), 100.0, 1e-9);
  EXPECT_THROW(conditioned_instance(5, 4, 3, 0.5, Seed{2}), InvalidArgument);
}
