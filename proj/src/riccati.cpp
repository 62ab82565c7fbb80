#include "desslab/riccati.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace desslab {

void DareOptions::validate() const {
  if (!(tol_rel > 0.0 && tol_rel < 1.0)) throw std::invalid_argument("tol_rel must lie in (0, 1)");
  if (max_iter <= 0) throw std::invalid_argument("max_iter must be positive");
  if (!(divergence_norm > 0.0)) throw std::invalid_argument("divergence_norm must be positive");
  if (!(pinv_rel_tol > 0.0 && pinv_rel_tol < 1.0)) throw std::invalid_argument("pinv_rel_tol must lie in (0, 1)");
}

std::string_view to_string(DareStatus status) {
  switch (status) {
    case DareStatus::Converged: return "converged";
    case DareStatus::Diverged: return "diverged";
    case DareStatus::MaxIterExceeded: return "max_iter_exceeded";
  }
  return "?";
}

Matrix riccati_step(const Matrix& P, const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R,
                    double pinv_rel_tol) {
  const Matrix PA = P * A;
  const Matrix BtPA = B.transpose() * PA;
  const Matrix inner = R + B.transpose() * P * B;
  Matrix next = A.transpose() * PA - BtPA.transpose() * pinv(symmetrized(inner), pinv_rel_tol) * BtPA + Q;
  return symmetrized(next);
}

Matrix sf_gain(const Matrix& P, const Matrix& A, const Matrix& B, const Matrix& R, double pinv_rel_tol) {
  const Matrix inner = symmetrized(R + B.transpose() * P * B);
  return pinv(inner, pinv_rel_tol) * (B.transpose() * P * A);
}

namespace {

double residual_of(const Matrix& P, const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R,
                   double pinv_rel_tol) {
  return max_abs(P - riccati_step(P, A, B, Q, R, pinv_rel_tol));
}

bool within_tolerance(double residual, const Matrix& P, double tol_rel) {
  return residual <= tol_rel * (1.0 + max_abs(P));
}

// An eigenvalue |lambda| > 1 of A with a left eigenvector w that B cannot
// reach (w^H B = 0) and that lies in range(Q) makes the cost unbounded:
// w^H x(t) = lambda^t w^H x(0) under any input, and x'Qx >= |w^H x|^2 / (w^H Q^+ w).
bool unbounded_certificate(const Matrix& A, const Matrix& B, const Matrix& Q) {
  using Complex = std::complex<double>;
  using CMatrix = Eigen::MatrixXcd;
  const Eigen::Index n = A.rows();
  if (n == 0) return false;
  Eigen::EigenSolver<Matrix> eig(A, false);
  const Matrix null_projector = Matrix::Identity(n, n) - Q * pinv(Q, 1e-12);
  const double scale = std::max(1.0, max_abs(A));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex lambda = eig.eigenvalues()(i);
    if (std::abs(lambda) <= 1.0 + 1e-9) continue;
    CMatrix stacked(2 * n + B.cols(), n);
    stacked.topRows(n) = A.transpose().cast<Complex>() - std::conj(lambda) * CMatrix::Identity(n, n);
    stacked.middleRows(n, B.cols()) = B.transpose().cast<Complex>();
    stacked.bottomRows(n) = null_projector.cast<Complex>();
    Eigen::BDCSVD<CMatrix> svd(stacked);
    if (svd.singularValues()(n - 1) <= 1e-9 * scale) return true;
  }
  return false;
}

struct Refinement {
  Matrix P;
  double residual = 0.0;
  int steps = 0;
};

// Policy iteration (Hewer) from the gain of P. Each step evaluates the
// current gain through a Stein equation; requires a stabilizing gain.
std::optional<Refinement> refine(const Matrix& start, const Matrix& A, const Matrix& B, const Matrix& Q,
                                 const Matrix& R, const DareOptions& opts) {
  Matrix X = start;
  for (int step = 1; step <= 50; ++step) {
    const Matrix K = sf_gain(X, A, B, R, opts.pinv_rel_tol);
    const Matrix closed = A - B * K;
    if (spectral_radius(closed) >= 1.0) return std::nullopt;
    auto next = solve_stein(closed, Q + K.transpose() * R * K);
    if (!next) return std::nullopt;
    const double res = residual_of(*next, A, B, Q, R, opts.pinv_rel_tol);
    if (within_tolerance(res, *next, opts.tol_rel)) return Refinement{*next, res, step};
    if (max_abs(*next - X) <= 1e-15 * (1.0 + max_abs(*next))) return std::nullopt;
    X = std::move(*next);
  }
  return std::nullopt;
}

bool refinement_due(int iteration) {
  if (iteration < 16) return false;
  if (iteration <= 1024) return (iteration & (iteration - 1)) == 0;
  return iteration % 1024 == 0;
}

}  // namespace

DareSolution solve_dare_sf(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R,
                           const DareOptions& opts) {
  opts.validate();
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n || R.rows() != B.cols() ||
      R.cols() != B.cols()) {
    throw std::invalid_argument("solve_dare_sf: dimension mismatch");
  }

  const double moderate_norm = std::sqrt(opts.divergence_norm);
  const bool certified_unbounded = opts.accelerate && unbounded_certificate(A, B, Q);

  DareSolution out;
  Matrix P = symmetrized(Q);
  out.moderate_iterate = P;
  for (int it = 1; it <= opts.max_iter; ++it) {
    Matrix next = riccati_step(P, A, B, Q, R, opts.pinv_rel_tol);
    if (!next.allFinite() || max_abs(next) > opts.divergence_norm) {
      out.P = next.allFinite() ? next : P;
      out.status = DareStatus::Diverged;
      out.iterations = it;
      out.residual = std::numeric_limits<double>::infinity();
      return out;
    }
    if (max_abs(next) <= moderate_norm) out.moderate_iterate = next;

    if (max_abs(next - P) <= opts.tol_rel * (1.0 + max_abs(next))) {
      const double res = residual_of(next, A, B, Q, R, opts.pinv_rel_tol);
      if (within_tolerance(res, next, opts.tol_rel)) {
        out.P = next;
        out.moderate_iterate = next;
        out.status = DareStatus::Converged;
        out.iterations = it;
        out.residual = res;
        return out;
      }
    }
    P = std::move(next);

    if (certified_unbounded && (max_abs(P) > moderate_norm || it >= 64)) {
      out.P = P;
      out.status = DareStatus::Diverged;
      out.iterations = it;
      out.residual = std::numeric_limits<double>::infinity();
      return out;
    }
    if (opts.accelerate && !certified_unbounded && refinement_due(it)) {
      if (auto refined = refine(P, A, B, Q, R, opts)) {
        out.P = refined->P;
        out.moderate_iterate = refined->P;
        out.status = DareStatus::Converged;
        out.iterations = it + refined->steps;
        out.residual = refined->residual;
        return out;
      }
    }
  }
  out.P = P;
  out.status = DareStatus::MaxIterExceeded;
  out.iterations = opts.max_iter;
  out.residual = residual_of(P, A, B, Q, R, opts.pinv_rel_tol);
  return out;
}

namespace {

struct DualProblem {
  Matrix A;  // A'
  Matrix B;  // C'
  Matrix Q;  // B1 B1'
  Matrix R;  // 0
};

DualProblem dual_of(const AugmentedPlant& plant) {
  const Eigen::Index p = plant.C.rows();
  return {plant.A.transpose(), plant.C.transpose(), plant.B1 * plant.B1.transpose(), Matrix::Zero(p, p)};
}

const Matrix& gain_iterate(const DareSolution& sol) {
  return sol.status == DareStatus::Converged ? sol.P : sol.moderate_iterate;
}

}  // namespace

SynthesisResult fc_synthesis(const AugmentedPlant& plant, const DareOptions& opts) {
  const DualProblem dual = dual_of(plant);
  DareSolution sol = solve_dare_sf(dual.A, dual.B, dual.Q, dual.R, opts);

  const Matrix& Pg = gain_iterate(sol);
  const Matrix& A = plant.A;
  const Matrix& C = plant.C;
  SynthesisResult out;
  out.gain = A * Pg * C.transpose() * pinv(symmetrized(C * Pg * C.transpose()), opts.pinv_rel_tol);
  out.closed_loop_radius = spectral_radius(A - out.gain * C);
  out.status = sol.status;
  out.iterations = sol.iterations;
  if (sol.status == DareStatus::Converged) {
    out.cost_total = (plant.B1.transpose() * sol.P * plant.B1).trace();
    out.cost_per_node = out.cost_total / plant.dims.n;
  } else {
    out.cost_total = out.cost_per_node = std::numeric_limits<double>::infinity();
  }
  out.P = std::move(sol.P);
  return out;
}

SynthesisResult sf_dual_synthesis(const AugmentedPlant& plant, const DareOptions& opts) {
  const DualProblem dual = dual_of(plant);
  DareSolution sol = solve_dare_sf(dual.A, dual.B, dual.Q, dual.R, opts);

  SynthesisResult out;
  out.gain = sf_gain(gain_iterate(sol), dual.A, dual.B, dual.R, opts.pinv_rel_tol);
  const Matrix closed = dual.A - dual.B * out.gain;
  out.closed_loop_radius = spectral_radius(closed);
  out.status = sol.status;
  out.iterations = sol.iterations;
  if (sol.status == DareStatus::Converged) {
    Matrix value = sol.P;
    if (out.closed_loop_radius < 1.0) {
      if (auto gramian = solve_stein(closed, dual.Q)) value = std::move(*gramian);
    }
    out.cost_total = (plant.B1.transpose() * value * plant.B1).trace();
    out.cost_per_node = out.cost_total / plant.dims.n;
  } else {
    out.cost_total = out.cost_per_node = std::numeric_limits<double>::infinity();
  }
  out.P = std::move(sol.P);
  return out;
}

bool classify_stabilizable(const AugmentedPlant& plant, const DareOptions& opts) {
  return fc_synthesis(plant, opts).stabilizing();
}

}  // namespace desslab
