#include "opscale/solvers.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <utility>

#include "opscale/errors.hpp"

namespace opscale {
namespace {

struct AlgorithmName {
  Algorithm algorithm;
  std::string_view name;
};

constexpr std::array<AlgorithmName, 6> kNames = {{
    {Algorithm::kFpi, "fpi"},
    {Algorithm::kOsi, "osi"},
    {Algorithm::kFpiCholSor, "fpi-chol-sor"},
    {Algorithm::kOsiCholSor, "osi-chol-sor"},
    {Algorithm::kFpiGeoSor, "fpi-geo-sor"},
    {Algorithm::kOsiGeoSor, "osi-geo-sor"},
}};

double inv_sqrt(Index d) { return 1.0 / std::sqrt(static_cast<double>(d)); }

SpdMatrix outer_gram(std::span<const Matrix> a) {
  Matrix g = Matrix::Zero(a.front().rows(), a.front().rows());
  for (const Matrix& ai : a) g.noalias() += ai * ai.transpose();
  return SpdMatrix::from_symmetric_part(g);
}

SpdMatrix inner_gram(std::span<const Matrix> a) {
  Matrix g = Matrix::Zero(a.front().cols(), a.front().cols());
  for (const Matrix& ai : a) g.noalias() += ai.transpose() * ai;
  return SpdMatrix::from_symmetric_part(g);
}

// C^{-1} for the lower Cholesky factor C of g.
Matrix inverse_factor(const SpdMatrix& g) { return tri_solve_inverse(g.cholesky()).matrix(); }

// Shared skeleton of the absorbing forms. `left_update` maps sum A A^T to the
// new left factor, `right_update` maps sum (L'A)^T (L'A) to the right factor.
template <typename LeftUpdate, typename RightUpdate>
AbsorbedState absorb(const AbsorbedState& state, LeftUpdate&& left_update,
                     RightUpdate&& right_update) {
  if (state.matrices.empty()) throw InvalidArgument("absorbing step on an empty tuple");
  const Matrix left = left_update(outer_gram(state.matrices));

  std::vector<Matrix> half;
  half.reserve(state.matrices.size());
  for (const Matrix& ai : state.matrices) half.emplace_back(left * ai);
  const Matrix right = right_update(inner_gram(half));

  AbsorbedState next;
  next.matrices.reserve(half.size());
  for (const Matrix& bi : half) next.matrices.emplace_back(bi * right.transpose());
  next.accumulated.left = left * state.accumulated.left;
  next.accumulated.right = right * state.accumulated.right;
  return next;
}

void require_omega(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw InvalidArgument("relaxation parameter must be positive and finite");
  }
}

}  // namespace

std::string_view to_string(Algorithm a) {
  for (const auto& entry : kNames) {
    if (entry.algorithm == a) return entry.name;
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (const auto& entry : kNames) {
    if (entry.name == name) return entry.algorithm;
  }
  throw InvalidArgument("unknown algorithm '" + std::string(name) + "'");
}

bool absorbs_scaling(Algorithm a) {
  return a == Algorithm::kOsi || a == Algorithm::kOsiCholSor || a == Algorithm::kOsiGeoSor;
}

bool uses_overrelaxation(Algorithm a) { return a != Algorithm::kFpi && a != Algorithm::kOsi; }

SorConfig SorConfig::fixed(double omega) {
  if (!(omega > 0.0 && omega < 2.0)) {
    throw InvalidArgument("fixed omega must lie in (0, 2), got " + std::to_string(omega));
  }
  return SorConfig(Mode::kFixed, omega, 0);
}

SorConfig SorConfig::automatic(int activation) {
  if (activation < 2) {
    throw InvalidArgument("auto activation iteration must be >= 2, got " +
                          std::to_string(activation));
  }
  return SorConfig(Mode::kAuto, 1.0, activation);
}

SorConfig SorConfig::parse(std::string_view text) {
  auto bad = [&] {
    return InvalidArgument("omega must be 'off', 'fixed:<w>' or 'auto:<p>', got '" +
                           std::string(text) + "'");
  };
  if (text == "off") return off();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw bad();
  const std::string_view kind = text.substr(0, colon);
  const std::string_view value = text.substr(colon + 1);
  const char* first = value.data();
  const char* last = value.data() + value.size();
  if (kind == "fixed") {
    double w = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, w);
    if (ec != std::errc() || ptr != last) throw bad();
    return fixed(w);
  }
  if (kind == "auto") {
    int p = 0;
    auto [ptr, ec] = std::from_chars(first, last, p);
    if (ec != std::errc() || ptr != last) throw bad();
    return automatic(p);
  }
  throw bad();
}

std::string SorConfig::to_string() const {
  switch (mode_) {
    case Mode::kOff:
      return "off";
    case Mode::kFixed: {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, omega_);
      return "fixed:" + std::string(buf, ptr);
    }
    case Mode::kAuto:
      return "auto:" + std::to_string(activation_);
  }
  return "off";
}

AbsorbedState AbsorbedState::initial(const ScalingProblem& p) {
  return {std::vector<Matrix>(p.matrices().begin(), p.matrices().end()),
          ScalingPair::identity(p.m(), p.n())};
}

SolverState initial_state(const ScalingProblem& p, Algorithm a) {
  if (absorbs_scaling(a)) return AbsorbedState::initial(p);
  if (a == Algorithm::kFpiGeoSor) {
    return GeodesicState{SpdMatrix::identity(p.m()), SpdMatrix::identity(p.n())};
  }
  return ScalingPair::identity(p.m(), p.n());
}

ScalingPair current_scaling(const SolverState& state) {
  if (const auto* pair = std::get_if<ScalingPair>(&state)) return *pair;
  if (const auto* geo = std::get_if<GeodesicState>(&state)) {
    return {geo->x.cholesky().matrix().transpose(), geo->y.cholesky().matrix().transpose()};
  }
  return std::get<AbsorbedState>(state).accumulated;
}

std::vector<Matrix> current_matrices(const ScalingProblem& p, const SolverState& state) {
  if (const auto* absorbed = std::get_if<AbsorbedState>(&state)) return absorbed->matrices;
  const ScalingPair s = current_scaling(state);
  return scaled_matrices(p.matrices(), s.left, s.right);
}

ScalingPair fpi_step(const ScalingProblem& p, const ScalingPair& state) {
  const Matrix c_inv = inverse_factor(phi(p.matrices(), state.right.transpose() * state.right));
  ScalingPair next;
  next.left = inv_sqrt(p.m()) * c_inv;
  const Matrix d_inv = inverse_factor(phi_adjoint(p.matrices(), next.left.transpose() * next.left));
  next.right = inv_sqrt(p.n()) * d_inv;
  return next;
}

AbsorbedState osi_step(const AbsorbedState& state) {
  const Index m = state.matrices.empty() ? 0 : state.matrices.front().rows();
  const Index n = state.matrices.empty() ? 0 : state.matrices.front().cols();
  return absorb(
      state, [&](const SpdMatrix& g) -> Matrix { return inv_sqrt(m) * inverse_factor(g); },
      [&](const SpdMatrix& g) -> Matrix { return inv_sqrt(n) * inverse_factor(g); });
}

ScalingPair fpi_chol_sor_step(const ScalingProblem& p, const ScalingPair& state, double omega) {
  require_omega(omega);
  const double keep = 1.0 - omega;
  const Matrix c_inv = inverse_factor(phi(p.matrices(), state.right.transpose() * state.right));
  ScalingPair next;
  next.left = keep * state.left + (omega * inv_sqrt(p.m())) * c_inv;
  const Matrix d_inv = inverse_factor(phi_adjoint(p.matrices(), next.left.transpose() * next.left));
  next.right = keep * state.right + (omega * inv_sqrt(p.n())) * d_inv;
  return next;
}

AbsorbedState osi_chol_sor_step(const AbsorbedState& state, double omega) {
  require_omega(omega);
  const double keep = 1.0 - omega;
  auto relaxed = [&](const SpdMatrix& g) -> Matrix {
    return keep * Matrix::Identity(g.dim(), g.dim()) + (omega * inv_sqrt(g.dim())) * inverse_factor(g);
  };
  return absorb(state, relaxed, relaxed);
}

GeodesicState fpi_geo_sor_step(const ScalingProblem& p, const GeodesicState& state, double omega) {
  require_omega(omega);
  auto target = [](const SpdMatrix& g, Index dim) {
    const Matrix c_inv = tri_solve_inverse(cholesky_lower(g)).matrix();
    return SpdMatrix::from_symmetric_part(c_inv.transpose() * c_inv / static_cast<double>(dim));
  };
  auto relax = [omega](const SpdMatrix& old, SpdMatrix fresh) {
    return omega == 1.0 ? fresh : geodesic_sharp(old, fresh, omega);
  };
  SpdMatrix x = relax(state.x, target(phi(p.matrices(), state.y.matrix()), p.m()));
  SpdMatrix y = relax(state.y, target(phi_adjoint(p.matrices(), x.matrix()), p.n()));
  return {std::move(x), std::move(y)};
}

AbsorbedState osi_geo_sor_step(const AbsorbedState& state, double omega) {
  require_omega(omega);
  auto power = [&](const SpdMatrix& g) -> Matrix {
    const SpdMatrix scaled =
        SpdMatrix::from_symmetric_part(static_cast<double>(g.dim()) * g.matrix());
    return spd_power(scaled, -0.5 * omega).matrix();
  };
  return absorb(state, power, power);
}

SolverState step(const ScalingProblem& p, Algorithm a, const SolverState& state, double omega) {
  switch (a) {
    case Algorithm::kFpi:
      return fpi_step(p, std::get<ScalingPair>(state));
    case Algorithm::kOsi:
      return osi_step(std::get<AbsorbedState>(state));
    case Algorithm::kFpiCholSor:
      return fpi_chol_sor_step(p, std::get<ScalingPair>(state), omega);
    case Algorithm::kOsiCholSor:
      return osi_chol_sor_step(std::get<AbsorbedState>(state), omega);
    case Algorithm::kFpiGeoSor:
      return fpi_geo_sor_step(p, std::get<GeodesicState>(state), omega);
    case Algorithm::kOsiGeoSor:
      return osi_geo_sor_step(std::get<AbsorbedState>(state), omega);
  }
  throw InvalidArgument("step: unknown algorithm");
}

double estimate_omega(double err_p, double err_pm2) {
  if (!(err_p >= 0.0) || !(err_pm2 > 0.0)) {
    throw InvalidArgument("estimate_omega: need err_p >= 0 and err_pm2 > 0");
  }
  const double rate = std::clamp(std::sqrt(err_p / err_pm2), 0.0, kRateClamp);
  return 2.0 / (1.0 + std::sqrt(1.0 - rate));
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kMaxIters:
      return "max_iters";
    case SolveStatus::kDiverged:
      return "diverged";
  }
  return "unknown";
}

double SolveReport::final_grad_norm() const {
  return trace.empty() ? initial_grad_norm : trace.back().grad_norm;
}

double SolveReport::best_grad_norm() const {
  double best = initial_grad_norm;
  for (const TraceRow& row : trace) best = std::min(best, row.grad_norm);
  return best;
}

SolveReport solve(const ScalingProblem& p, Algorithm a, const SorConfig& sor, int max_iters,
                  double tol) {
  if (max_iters < 1) throw InvalidArgument("solve: max_iters must be at least 1");
  if (!(tol > 0.0)) throw InvalidArgument("solve: tol must be positive");

  SolveReport report;
  report.algorithm = a;
  report.final_state = initial_state(p, a);
  report.initial_grad_norm = grad_norm(p);
  report.trace.reserve(static_cast<std::size_t>(max_iters));

  const bool relaxed = uses_overrelaxation(a);
  const bool automatic = relaxed && sor.mode() == SorConfig::Mode::kAuto;
  double omega = relaxed && sor.mode() == SorConfig::Mode::kFixed ? sor.omega() : 1.0;
  const double blowup = kDivergenceFactor * std::max(report.initial_grad_norm, tol);

  // errors[t] is the grad norm after iteration t; errors[0] is the initial one.
  std::vector<double> errors{report.initial_grad_norm};

  using Clock = std::chrono::steady_clock;
  const Clock::time_point start = Clock::now();
  for (int t = 1; t <= max_iters; ++t) {
    SolverState next;
    double err = 0.0;
    try {
      next = step(p, a, report.final_state, omega);
      if (const auto* absorbed = std::get_if<AbsorbedState>(&next)) {
        err = grad_norm(absorbed->matrices);
      } else {
        err = grad_norm(current_matrices(p, next));
      }
    } catch (const Error& e) {
      report.status = SolveStatus::kDiverged;
      report.reason = "iteration " + std::to_string(t) + ": " + e.what();
      return report;
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    report.trace.push_back({t, err, elapsed, omega});
    errors.push_back(err);
    report.final_state = std::move(next);

    if (!std::isfinite(err) || err > blowup) {
      report.status = SolveStatus::kDiverged;
      report.reason = "iteration " + std::to_string(t) + ": grad norm " + std::to_string(err) +
                      " exceeds divergence threshold";
      return report;
    }
    if (err <= tol) {
      report.status = SolveStatus::kConverged;
      return report;
    }
    if (automatic && t == sor.activation()) {
      const double err_p = errors[static_cast<std::size_t>(t)];
      const double err_pm2 = errors[static_cast<std::size_t>(t - 2)];
      omega = estimate_omega(err_p, err_pm2);
      report.omega_estimate = omega;
      report.omega_clamped = std::sqrt(err_p / err_pm2) >= kRateClamp;
    }
  }
  report.status = SolveStatus::kMaxIters;
  return report;
}

}  // namespace opscale
