#pragma once

// Alternating fixed-point iterations for operator scaling.
//
// Two families, pairwise equivalent in exact arithmetic:
//
//   * "FPI" forms keep the original A_i and update scaling factors (or the
//     Gram-type iterates X = L^T L, Y = R^T R).
//   * "OSI" forms absorb each new scaling into the matrices immediately, so the
//     Gram sums that get factored tend to multiples of the identity and stay
//     well conditioned. The product of all absorbed factors is tracked so the
//     overall scaling (L_t, R_t) remains available.
//
// Each family comes plain, with overrelaxation of the lower Cholesky factors,
// and with overrelaxation along the Hilbert-metric geodesic.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "opscale/cp_map.hpp"

namespace opscale {

enum class Algorithm {
  kFpi,
  kOsi,
  kFpiCholSor,
  kOsiCholSor,
  kFpiGeoSor,
  kOsiGeoSor,
};

inline constexpr std::array<Algorithm, 6> kAllAlgorithms = {
    Algorithm::kFpi,        Algorithm::kOsi,       Algorithm::kFpiCholSor,
    Algorithm::kOsiCholSor, Algorithm::kFpiGeoSor, Algorithm::kOsiGeoSor,
};

/// CLI spelling: fpi, osi, fpi-chol-sor, osi-chol-sor, fpi-geo-sor, osi-geo-sor.
std::string_view to_string(Algorithm a);
/// Inverse of to_string. Throws InvalidArgument on unknown names.
Algorithm parse_algorithm(std::string_view name);

/// True for the forms that absorb the scaling into the matrices every step.
bool absorbs_scaling(Algorithm a);
bool uses_overrelaxation(Algorithm a);

/// Relaxation schedule. Off runs with omega = 1. Fixed(w) uses w from the first
/// iteration. Auto(p) runs p plain iterations, estimates omega from the error
/// history and keeps it for the rest of the solve.
class SorConfig {
 public:
  enum class Mode { kOff, kFixed, kAuto };

  static SorConfig off() { return SorConfig(Mode::kOff, 1.0, 0); }
  /// Throws InvalidArgument unless 0 < omega < 2.
  static SorConfig fixed(double omega);
  /// Throws InvalidArgument unless activation >= 2.
  static SorConfig automatic(int activation);
  /// Parses "off", "fixed:<w>" or "auto:<p>".
  static SorConfig parse(std::string_view text);

  Mode mode() const { return mode_; }
  double omega() const { return omega_; }
  int activation() const { return activation_; }
  std::string to_string() const;

 private:
  SorConfig(Mode mode, double omega, int activation)
      : mode_(mode), omega_(omega), activation_(activation) {}

  Mode mode_;
  double omega_;
  int activation_;
};

/// Iterates (X_t, Y_t) of the geodesic fixed-point form.
struct GeodesicState {
  SpdMatrix x;
  SpdMatrix y;
};

/// Iterate of the absorbing forms: the current scaled matrices together with
/// the accumulated scaling, matrices[i] == accumulated.left * A_i *
/// accumulated.right^T up to rounding.
struct AbsorbedState {
  std::vector<Matrix> matrices;
  ScalingPair accumulated;

  static AbsorbedState initial(const ScalingProblem& p);
  ScalingProblem current_problem() const { return ScalingProblem(matrices); }
};

/// ScalingPair for kFpi / kFpiCholSor, GeodesicState for kFpiGeoSor and
/// AbsorbedState for the three absorbing forms.
using SolverState = std::variant<ScalingPair, GeodesicState, AbsorbedState>;

/// Identity initialization: L_0 = I, R_0 = I, X_0 = I, Y_0 = I, A_{0,i} = A_i.
SolverState initial_state(const ScalingProblem& p, Algorithm a);

/// The scaled matrices L_t A_i R_t^T represented by `state`. For the
/// geodesic form the factors are taken as L_t = C^T with X_t = C C^T; any
/// other choice differs by an orthogonal transformation.
std::vector<Matrix> current_matrices(const ScalingProblem& p, const SolverState& state);

/// Overall scaling (L_t, R_t) represented by `state`, with the same factor
/// choice as current_matrices for the geodesic form.
ScalingPair current_scaling(const SolverState& state);

// Single steps. All of them throw NotPositiveDefinite (or Singular) when an
// iterate leaves the positive definite cone, which solve() reports as
// divergence.

/// C = chol(sum A R^T R A^T), L' = C^{-1}/sqrt(m);
/// D = chol(sum A^T L'^T L' A), R' = D^{-1}/sqrt(n).
ScalingPair fpi_step(const ScalingProblem& p, const ScalingPair& state);

/// Same update computed on the current scaled matrices, then absorbed.
AbsorbedState osi_step(const AbsorbedState& state);

/// L' = (1 - w) L + (w / sqrt(m)) C^{-1}, and likewise for R using the
/// updated L'.
ScalingPair fpi_chol_sor_step(const ScalingProblem& p, const ScalingPair& state, double omega);

/// L' = (1 - w) I + (w / sqrt(m)) C^{-1} on the current scaled matrices.
AbsorbedState osi_chol_sor_step(const AbsorbedState& state, double omega);

/// X' = X #_w [ (sum A Y A^T)^{-1} / m ],  Y' = Y #_w [ (sum A^T X' A)^{-1} / n ].
GeodesicState fpi_geo_sor_step(const ScalingProblem& p, const GeodesicState& state, double omega);

/// L' = (m sum A A^T)^{-w/2},  R' = (n sum A^T L'^T L' A)^{-w/2}, absorbed.
AbsorbedState osi_geo_sor_step(const AbsorbedState& state, double omega);

/// One step of algorithm `a` with relaxation `omega` (ignored by kFpi, kOsi).
SolverState step(const ScalingProblem& p, Algorithm a, const SolverState& state, double omega);

/// omega = 2 / (1 + sqrt(1 - b)) with b = sqrt(err_p / err_pm2) clamped to
/// [0, 1 - 1e-12]. Result lies in [1, 2). Throws InvalidArgument unless
/// err_p >= 0 and err_pm2 > 0.
double estimate_omega(double err_p, double err_pm2);

/// Upper clamp applied to the rate estimate in estimate_omega.
inline constexpr double kRateClamp = 1.0 - 1e-12;

/// A solve stops as diverged once the grad norm exceeds this multiple of its
/// value at the initial iterate.
inline constexpr double kDivergenceFactor = 1e6;

struct TraceRow {
  int iter = 0;
  double grad_norm = 0.0;
  double elapsed_s = 0.0;  // cumulative wall time, monotonic clock
  double omega = 1.0;      // relaxation used in this iteration
};

enum class SolveStatus { kConverged, kMaxIters, kDiverged };
std::string_view to_string(SolveStatus s);

struct SolveReport {
  Algorithm algorithm = Algorithm::kFpi;
  SolveStatus status = SolveStatus::kMaxIters;
  std::string reason;  // set when status is kDiverged
  double initial_grad_norm = 0.0;
  std::vector<TraceRow> trace;
  SolverState final_state;  // last iterate that did not fail
  std::optional<double> omega_estimate;
  bool omega_clamped = false;  // error ratio >= 1 at activation

  /// Grad norm of the last recorded iteration (the initial one for an empty trace).
  double final_grad_norm() const;
  double best_grad_norm() const;
  int iterations() const { return static_cast<int>(trace.size()); }
};

/// Runs `a` from identity initialization until grad_norm <= tol, max_iters
/// iterations, or divergence. A trace row is recorded after every
/// iteration; the grad norm always refers to the scaled matrices
/// L_t A_i R_t^T and its evaluation is part of the timed loop body.
/// Throws InvalidArgument for max_iters < 1 or tol <= 0; every numerical
/// failure inside the loop is reported as kDiverged instead.
SolveReport solve(const ScalingProblem& p, Algorithm a, const SorConfig& sor, int max_iters,
                  double tol);

}  // namespace opscale
