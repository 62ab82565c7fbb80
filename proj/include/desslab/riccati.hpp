#pragma once

#include <string_view>

#include "desslab/linalg.hpp"
#include "desslab/ring.hpp"

namespace desslab {

struct DareOptions {
  double tol_rel = 1e-11;
  int max_iter = 200000;
  double divergence_norm = 1e12;
  double pinv_rel_tol = 1e-9;
  // Policy-iteration refinement and the divergence certificate. Disabling
  // both leaves the plain fixed-point iteration.
  bool accelerate = true;

  void validate() const;
};

enum class DareStatus { Converged, Diverged, MaxIterExceeded };

std::string_view to_string(DareStatus status);

struct DareSolution {
  Matrix P;
  DareStatus status = DareStatus::MaxIterExceeded;
  int iterations = 0;
  double residual = 0.0;  // ||P - F(P)||_max at the returned P
  // Last iterate with ||P||_max <= sqrt(divergence_norm). Equal to P when
  // converged; used for gains of non-converged problems.
  Matrix moderate_iterate;
};

/// One Riccati step F(P) = A'PA - A'PB (R + B'PB)^+ B'PA + Q, symmetrized.
Matrix riccati_step(const Matrix& P, const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R,
                    double pinv_rel_tol);

/// Fixed point of the state-feedback Riccati map started from P0 = Q.
/// Divergence is a status, not an exception.
DareSolution solve_dare_sf(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R,
                           const DareOptions& opts = {});

/// State-feedback gain (R + B'PB)^+ B'PA.
Matrix sf_gain(const Matrix& P, const Matrix& A, const Matrix& B, const Matrix& R, double pinv_rel_tol);

struct SynthesisResult {
  Matrix P;
  Matrix gain;  // L (N x p) for full control, K (p x N) for the dual
  double cost_total = 0.0;
  double cost_per_node = 0.0;
  double closed_loop_radius = 0.0;
  DareStatus status = DareStatus::MaxIterExceeded;
  int iterations = 0;

  bool converged() const { return status == DareStatus::Converged; }
  bool stabilizing() const { return converged() && closed_loop_radius < 1.0; }
};

/// Optimal full-control gain via duality: P solves the DARE on
/// (A', C', B1 B1', 0), L = A P C' (C P C')^+, cost Tr(B1' P B1).
SynthesisResult fc_synthesis(const AugmentedPlant& plant, const DareOptions& opts = {});

/// The transposed state-feedback problem (A', C' as actuation, full state
/// sensing). Gain K = L'. When the closed loop is stable the cost is
/// re-evaluated from the closed-loop Gramian of A' - C' K.
SynthesisResult sf_dual_synthesis(const AugmentedPlant& plant, const DareOptions& opts = {});

/// True iff fc_synthesis converges to a stabilizing gain.
bool classify_stabilizable(const AugmentedPlant& plant, const DareOptions& opts = {});

}  // namespace desslab
