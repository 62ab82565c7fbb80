#pragma once

#include <string>
#include <vector>

#include "desslab/linalg.hpp"
#include "desslab/riccati.hpp"
#include "desslab/ring.hpp"

namespace desslab {

enum class Stability { Stable, Deadbeat, Divergent, OscillatoryDivergent, Marginal };

struct Classification {
  Stability kind = Stability::Marginal;
  int deadbeat_step = -1;  // set only for Deadbeat

  bool divergent() const { return kind == Stability::Divergent || kind == Stability::OscillatoryDivergent; }
  bool settles() const { return kind == Stability::Stable || kind == Stability::Deadbeat; }
  std::string label() const;

  friend bool operator==(const Classification&, const Classification&) = default;
};

struct ClassifyOptions {
  double tol_zero = 1e-8;
  double tol_diverge = 1e6;
};

/// Impulse-response record. Row t of states is x(t) (t = 0..T); row t of
/// inputs is u(t) (t = 0..T-1). Satisfies states(t+1) = A states(t) + B2 inputs(t).
struct Trajectory {
  int horizon = 0;
  int ring_size = 0;
  Matrix states;
  Matrix inputs;
  double empirical_cost = 0.0;  // sum_t |x_r(t)|^2 over t = 0..T
  Classification classification;

  auto ring_slice() const { return states.leftCols(ring_size); }
};

/// x(0) = B1 e_node, u = 0. node is 0-based.
Trajectory open_loop_impulse(const AugmentedPlant& plant, int node, int horizon, const ClassifyOptions& opts = {});

/// u(t) = -gain C x(t).
Trajectory closed_loop_impulse(const AugmentedPlant& plant, const Matrix& gain, int node, int horizon,
                               const ClassifyOptions& opts = {});

/// Closed-loop run from an arbitrary initial state.
Trajectory closed_loop_from(const AugmentedPlant& plant, const Matrix& gain, const Vector& x0, int horizon,
                            const ClassifyOptions& opts = {});

Classification classify(const Trajectory& traj, double tol_zero, double tol_diverge);

/// Sign alternation with growing magnitude at successive |x| local maxima of
/// the ring node with the largest initial magnitude. Needs at least three
/// maxima above tol_zero; the trailing maxima must all alternate and grow.
bool detect_growing_alternation(const Trajectory& traj, double tol_zero = 1e-8);

/// Same detector without the growth requirement.
bool detect_alternation(const Trajectory& traj, double tol_zero = 1e-8);

/// Empirical impulse cost for each ring node.
std::vector<double> per_node_costs(const AugmentedPlant& plant, const Matrix& gain, int horizon);

/// |sum_node empirical - cost_total| / cost_total. The sum over unit impulses
/// on every ring node is the squared H2 norm, which is what cost_total holds.
double empirical_vs_analytic_cost(const AugmentedPlant& plant, const Matrix& gain,
                                  const SynthesisResult& synthesis, int horizon);

}  // namespace desslab
