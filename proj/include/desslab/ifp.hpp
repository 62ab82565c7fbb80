#pragma once

#include <vector>

#include "desslab/riccati.hpp"
#include "desslab/ring.hpp"
#include "desslab/sim.hpp"

namespace desslab {

/// Rows of a full-control gain split into the forward block (acting on the
/// physical ring states) and the internal-feedback block (acting on the
/// delay states).
struct GainPartition {
  Matrix forward;                   // n x p
  Matrix internal;                  // n d x p
  std::vector<double> block_norms;  // Frobenius norm per delay depth 1..d

  Matrix restack() const { return vstack(forward, internal); }
};

GainPartition partition(const Matrix& gain, int n, int d);

/// Copy of gain with every internal-feedback row zeroed.
Matrix ablate(const Matrix& gain, int n, int d);

/// Exploratory: zeroes only the rows of one delay depth (1..d).
Matrix ablate_depth(const Matrix& gain, int n, int d, int depth);

struct AblationReport {
  RingSpec spec;
  SensorConfig sensors;
  int horizon = 0;
  DareStatus intact_status = DareStatus::MaxIterExceeded;
  double intact_cost_per_node = 0.0;  // analytic, from the synthesis
  Classification intact;
  double intact_empirical_cost = 0.0;
  Classification ablated;
  double ablated_empirical_cost = 0.0;  // single impulse on node 0
  double ablated_radius = 0.0;          // rho(A - L_ablated C)
  double ablated_early_peak = 0.0;      // max |x_r| over t in [1, 2(d+1)]
  bool alternation_detected = false;    // growing sign alternation in the ablated run

  bool ablated_stabilizing() const { return ablated.settles() && ablated_radius < 1.0; }
};

/// Synthesizes the optimal gain, simulates intact and ablated closed loops
/// from an impulse on node 0, and compares them. Slow or diverse sensing only.
AblationReport ablation_study(const RingSpec& spec, const SensorConfig& sensors, const DareOptions& opts = {},
                              int horizon = 200);

}  // namespace desslab
