#pragma once

// Seeded generators for the benchmark families:
//
//   hilbert        A_i = Q_i H with H the n x n Hilbert matrix, Q_i Haar
//   frame          A_i = x_i e_i^T, x_i the normalized rows of Q' D P^T
//   frame-extreme  frame with A_1 replaced by e_1 e_1^T
//
// and a well-conditioned random family used by the equivalence checks.

#include <vector>

#include "opscale/cp_map.hpp"
#include "opscale/random.hpp"

namespace opscale {

/// Haar-distributed orthogonal matrix: QR of a standard normal matrix (filled
/// row by row from `rng`) with the columns of Q multiplied by sign(R_jj).
Matrix haar_orthogonal(Index dim, CounterRng& rng);
Matrix haar_orthogonal(Index dim, Seed seed);

/// k matrices Q_i * hilbert(n); Q_i uses stream i of RngDomain::kHilbertFactors.
ScalingProblem hilbert_instance(Index n, Index k, Seed seed);

struct FrameSpec {
  Index n = 50;         // vector dimension
  Index k = 55;         // number of vectors, k >= n
  double kappa = 1e7;   // D has diagonal evenly spaced in [1/kappa, 1]
  bool extreme = false; // replace A_1 by e_1 e_1^T

  /// Throws InvalidArgument unless n >= 1, k >= n and kappa > 1.
  void validate() const;
};

struct FrameInstance {
  ScalingProblem problem;       // m = n, second dimension k
  std::vector<Vector> vectors;  // x_i, unit norm; e_1 first in the extreme case
};

/// Throws DegenerateRow if a row of Q' D P^T has norm below 1e-300.
FrameInstance frame_instance(const FrameSpec& spec, Seed seed);

/// The x_i of a frame problem, read back from column i of A_i.
std::vector<Vector> frame_vectors(const ScalingProblem& p);

/// A_i = U_i S V_i^T with Haar U_i (m x m), V_i (n x n) and singular values
/// evenly spaced in [1/cond, 1], so cond(A_i) = cond. Requires cond >= 1.
ScalingProblem conditioned_instance(Index m, Index n, Index k, double cond, Seed seed);

}  // namespace opscale
