#pragma once

#include <optional>
#include <vector>

#include "desslab/ifp.hpp"
#include "desslab/riccati.hpp"
#include "desslab/ring.hpp"
#include "desslab/sim.hpp"

namespace desslab {

struct SweepParams {
  int n = 5;
  double a = 1.0;
  int q = 1;  // kept as requested even for slow-only rows, where it is unused
  int d = 0;
  SensorMode mode = SensorMode::FastOnly;

  RingSpec spec() const { return {n, a}; }
  SensorConfig sensors() const { return {mode, mode == SensorMode::SlowOnly ? 0 : q, d}; }
};

/// Lexicographic order on (n, a, q, d, mode).
bool operator<(const SweepParams& lhs, const SweepParams& rhs);

struct SweepRow {
  SweepParams params;
  double cost_per_node = 0.0;  // +inf when not stabilizable
  double cost_total = 0.0;
  bool stabilizable = false;
  std::optional<double> closed_loop_radius;  // absent when not stabilizable
  std::optional<Classification> classification;
  DareStatus status = DareStatus::MaxIterExceeded;
};

struct SweepOptions {
  DareOptions dare;
  int workers = 1;          // 0 picks the hardware concurrency
  int simulate_horizon = 0;  // > 0 adds an impulse classification per row
};

/// Evaluates one grid cell.
SweepRow evaluate_cell(const SweepParams& params, const SweepOptions& opts = {});

/// Evaluates every cell (in parallel when workers != 1) and returns the rows
/// sorted by parameter tuple. The output does not depend on the worker count.
std::vector<SweepRow> run_grid(std::vector<SweepParams> cells, const SweepOptions& opts = {});

/// One row per (n, a) pair for the given sensing architecture.
std::vector<SweepRow> sweep_cost_vs_a(const std::vector<int>& n_list, const std::vector<double>& a_grid,
                                      const SensorConfig& sensors, const SweepOptions& opts = {});

/// Three rows per d: fast-only, slow-only and diverse.
std::vector<SweepRow> sweep_cost_vs_delay(int n, double a, int q, const std::vector<int>& d_range,
                                          const SweepOptions& opts = {});

/// Sorted ring-eigenvalue magnitudes |1 + 2 cos(2 pi k / n)|, with multiplicity.
std::vector<double> circulant_magnitudes(int n);

/// 3 / s_{q+1}; +inf when that magnitude vanishes.
double analytic_breakpoint(int n, int q);

struct BreakPoint {
  int n = 0;
  int q = 0;
  double a_analytic = 0.0;
  double a_empirical = 0.0;  // upper end of the window when never lost
  double gap = 0.0;
};

/// Bisects the fast-only stabilizability boundary over a in [1, 3n].
BreakPoint find_breakpoint(int n, int q, double bisect_tol = 1e-6, const DareOptions& opts = {});

std::vector<BreakPoint> find_breakpoints(const std::vector<int>& n_list, int q, double bisect_tol = 1e-6,
                                         const SweepOptions& opts = {});

/// ablation_study for every (a, mode) cell, sorted by (a, mode).
std::vector<AblationReport> ablation_grid(int n, const std::vector<double>& a_list, int d,
                                          const std::vector<SensorMode>& modes, int horizon = 200,
                                          const SweepOptions& opts = {});

}  // namespace desslab
