#pragma once

#include <string>
#include <vector>

#include "desslab/riccati.hpp"
#include "desslab/ring.hpp"

namespace desslab {

/// Block-downshift Z^{blocks, size}: identity blocks of the given size on the
/// first block sub-diagonal. Nilpotent of degree `blocks`.
Matrix downshift(int blocks, int block_size);

struct OFDims {
  int n = 0;
  int m = 0;    // physical actuators
  int p_r = 0;  // physical sensors
  int d_a = 0;  // actuation delay
  int d_s = 0;  // sensing delay

  int actuation_offset() const { return n; }
  int sensing_offset() const { return n + m * d_a; }
  int state_dim() const { return n + m * d_a + p_r * d_s; }
  int input_dim() const { return m + p_r * d_s; }  // [u_r; u_s]
};

struct OFBlocks {
  Matrix A_r, B_2r, C_r, B_1r;
  Matrix Z_act, Z_sen;  // downshifts on the actuation / sensing chains
  Matrix B2r_hat;       // n x m d_a, B_2r in the last block
  Matrix Cr_hat;        // p_r d_s x n, C_r in the first block
  Matrix I_B;           // m d_a x m, identity in the first block
  Matrix I_C;           // p_r x p_r d_s, identity in the last block
};

/// Output-feedback plant with delayed actuation and sensing. State
/// [x_r; x_a; x_s], input [u_r; u_s]:
///   A  = [A_r B2r_hat 0; 0 Z_act 0; Cr_hat 0 Z_sen]
///   B2 = [0 0; I_B 0; 0 I],  B1 = [B_1r; 0; 0],  C = [0 0 I_C].
/// A zero delay drops that chain: d_a = 0 routes u_r straight into x_r and
/// d_s = 0 reads y = C_r x_r.
struct OFPlant {
  Matrix A, B2, B1, C;
  OFBlocks blocks;
  OFDims dims;
};

OFPlant build_of_plant(const RingSpec& spec, const Matrix& B_2r, const Matrix& C_r, int d_a, int d_s);

struct OFWeights {
  Matrix Q, R_u, W, V;

  /// Q = diag(I_n, 0, 0), R_u = eps_u I, W = B1 B1', V = eps_v I.
  static OFWeights defaults(const OFPlant& plant, double eps_u = 1e-6, double eps_v = 1e-6);
};

struct OFGains {
  Matrix L;  // full observer gain, N x p_r
  Matrix K;  // full controller gain, (m + p_r d_s) x N
  Matrix L1, L2, L3;
  Matrix K1, K2, K3;  // u_r rows of K
  double residual_L2 = 0.0;
  double residual_K3 = 0.0;
  DareStatus control_status = DareStatus::MaxIterExceeded;
  DareStatus filter_status = DareStatus::MaxIterExceeded;

  bool converged() const { return control_status == DareStatus::Converged && filter_status == DareStatus::Converged; }
  double relative_L2() const;
  double relative_K3() const;
};

/// Control DARE on (A, B2, Q, R_u) and filter DARE on (A', C', W, V).
OFGains of_synthesis(const OFPlant& plant, const OFWeights& weights, const DareOptions& opts = {});

/// Joint trajectory of the reduced observer-based controller for d = 1.
/// Row t holds time t; u_r has T rows.
struct OFTrajectory {
  Matrix x_r, x_a, x_hat_r, delta, u_r;
};

/// Runs the plant together with
///   delta(t+1) = C_r x_r(t) - C_r xhat_r(t) - L3 delta(t)
///   xhat_r(t+1) = A_r xhat_r(t) + B_2r x_a(t) + L1 delta(t)
///   u_r(t) = -(K1 xhat_r(t) + K2 x_a(t))
/// from x_r(0) = B_1r w0. Requires d_a = d_s = 1.
OFTrajectory simulate_of(const OFPlant& plant, const OFGains& gains, int horizon, const Vector& w0);
OFTrajectory simulate_of(const OFPlant& plant, const OFGains& gains, int horizon, int impulse_node);

/// Full-order observer loop on the complete block matrices (u = -K xhat,
/// xhat(t+1) = A xhat + B2 u + L (y - C xhat)). Returns x_r rows t = 0..T.
Matrix simulate_of_block(const OFPlant& plant, const OFGains& gains, int horizon, const Vector& w0);

/// Closed-loop matrix of [x; xhat].
Matrix of_closed_loop(const OFPlant& plant, const OFGains& gains);

struct SeparationRadii {
  double assembled = 0.0;
  double controller = 0.0;  // rho(A - B2 K)
  double observer = 0.0;    // rho(A - L C)
};

SeparationRadii separation_radii(const OFPlant& plant, const OFGains& gains);

struct IFPPathway {
  std::string name;
  int dimension = 0;
  double magnitude = 0.0;  // Frobenius norm of the implementing block
};

struct IFPReport {
  std::vector<IFPPathway> pathways;

  const IFPPathway& at(const std::string& name) const;
};

/// Maps gain and model blocks onto the five pathways: IFP-Sense-1 (L3),
/// IFP-Act-1 (K2), IFP-State (A_r), IFP-Act-2 (B_2r), IFP-Sense-2 (C_r).
IFPReport ifp_report(const OFGains& gains, const OFPlant& plant);

}  // namespace desslab
