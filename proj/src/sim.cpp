#include "desslab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace desslab {

std::string Classification::label() const {
  switch (kind) {
    case Stability::Stable: return "stable";
    case Stability::Deadbeat: return "deadbeat(" + std::to_string(deadbeat_step) + ")";
    case Stability::Divergent: return "divergent";
    case Stability::OscillatoryDivergent: return "oscillatory-divergent";
    case Stability::Marginal: return "marginal";
  }
  return "?";
}

namespace {

double row_norm(const Matrix& m, Eigen::Index row, Eigen::Index cols) {
  if (cols == 0) return 0.0;
  const auto r = m.row(row).head(cols);
  if (!r.allFinite()) return std::numeric_limits<double>::infinity();
  return r.cwiseAbs().maxCoeff();
}

Trajectory simulate(const AugmentedPlant& plant, const Matrix* gain, const Vector& x0, int horizon,
                    const ClassifyOptions& opts) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const Eigen::Index N = plant.A.rows();
  if (x0.size() != N) throw std::invalid_argument("initial state has wrong dimension");

  Trajectory traj;
  traj.horizon = horizon;
  traj.ring_size = plant.dims.n;
  traj.states.resize(horizon + 1, N);
  traj.inputs = Matrix::Zero(horizon, plant.B2.cols());
  traj.states.row(0) = x0.transpose();

  Vector x = x0;
  for (int t = 0; t < horizon; ++t) {
    Vector u = Vector::Zero(plant.B2.cols());
    if (gain != nullptr) u = -(*gain * (plant.C * x));
    Vector next = plant.A * x + plant.B2 * u;
    traj.inputs.row(t) = u.transpose();
    traj.states.row(t + 1) = next.transpose();
    x = std::move(next);
  }

  double cost = 0.0;
  for (int t = 0; t <= horizon; ++t) cost += traj.ring_slice().row(t).squaredNorm();
  traj.empirical_cost = std::isfinite(cost) ? cost : std::numeric_limits<double>::infinity();
  traj.classification = classify(traj, opts.tol_zero, opts.tol_diverge);
  return traj;
}

Vector impulse_state(const AugmentedPlant& plant, int node) {
  if (node < 0 || node >= plant.dims.n) throw std::invalid_argument("impulse node out of range");
  return plant.B1.col(node);
}

struct Extremum {
  int t;
  double value;
};

std::vector<Extremum> dominant_maxima(const Trajectory& traj, double tol_zero) {
  std::vector<Extremum> out;
  const auto ring = traj.ring_slice();
  if (ring.cols() == 0) return out;
  Eigen::Index node = 0;
  const double peak = ring.row(0).cwiseAbs().maxCoeff(&node);
  if (!(peak > tol_zero)) return out;

  const int T = traj.horizon;
  for (int t = 0; t < T; ++t) {
    const double v = ring(t, node);
    const double next = ring(t + 1, node);
    if (!std::isfinite(v) || !std::isfinite(next)) break;
    const bool rises_into = t == 0 || std::abs(v) >= std::abs(ring(t - 1, node));
    if (std::abs(v) > tol_zero && rises_into && std::abs(v) > std::abs(next)) out.push_back({t, v});
  }
  return out;
}

// Length of the trailing run of maxima with alternating signs (and, when
// growing is set, strictly increasing magnitude).
std::size_t trailing_alternation(const std::vector<Extremum>& maxima, bool growing) {
  if (maxima.empty()) return 0;
  std::size_t run = 1;
  for (std::size_t i = maxima.size() - 1; i > 0; --i) {
    const auto& cur = maxima[i];
    const auto& prev = maxima[i - 1];
    const bool flips = (cur.value > 0.0) != (prev.value > 0.0);
    const bool grows = std::abs(cur.value) > std::abs(prev.value);
    if (!flips || (growing && !grows)) break;
    ++run;
  }
  return run;
}

}  // namespace

Trajectory open_loop_impulse(const AugmentedPlant& plant, int node, int horizon, const ClassifyOptions& opts) {
  return simulate(plant, nullptr, impulse_state(plant, node), horizon, opts);
}

Trajectory closed_loop_impulse(const AugmentedPlant& plant, const Matrix& gain, int node, int horizon,
                               const ClassifyOptions& opts) {
  return closed_loop_from(plant, gain, impulse_state(plant, node), horizon, opts);
}

Trajectory closed_loop_from(const AugmentedPlant& plant, const Matrix& gain, const Vector& x0, int horizon,
                            const ClassifyOptions& opts) {
  if (gain.rows() != plant.B2.cols() || gain.cols() != plant.C.rows()) {
    throw std::invalid_argument("gain dimensions do not match the plant");
  }
  return simulate(plant, &gain, x0, horizon, opts);
}

bool detect_growing_alternation(const Trajectory& traj, double tol_zero) {
  return trailing_alternation(dominant_maxima(traj, tol_zero), true) >= 3;
}

bool detect_alternation(const Trajectory& traj, double tol_zero) {
  return trailing_alternation(dominant_maxima(traj, tol_zero), false) >= 3;
}

Classification classify(const Trajectory& traj, double tol_zero, double tol_diverge) {
  const int T = traj.horizon;
  const Eigen::Index n = traj.ring_size;
  const Eigen::Index N = traj.states.cols();
  std::vector<double> ring_norm(T + 1), full_norm(T + 1);
  for (int t = 0; t <= T; ++t) {
    ring_norm[t] = row_norm(traj.states, t, n);
    full_norm[t] = row_norm(traj.states, t, N);
  }

  // Earliest k with the ring tail below tol_zero; deadbeat needs a one-step collapse into it.
  int k = T + 1;
  while (k > 0 && ring_norm[k - 1] <= tol_zero) --k;
  if (k <= T) {
    if (k == 0 || ring_norm[k] <= 1e-6 * ring_norm[k - 1]) return {Stability::Deadbeat, k};
  }

  if (*std::max_element(full_norm.begin(), full_norm.end()) > tol_diverge) {
    return {detect_growing_alternation(traj, tol_zero) ? Stability::OscillatoryDivergent : Stability::Divergent};
  }

  const int quarter = std::max(1, T / 4);
  const int final_start = T - quarter + 1;
  const int prev_start = std::max(0, final_start - quarter);
  const double final_max = *std::max_element(ring_norm.begin() + final_start, ring_norm.end());
  const double prev_max = *std::max_element(ring_norm.begin() + prev_start, ring_norm.begin() + final_start);
  if (final_max < ring_norm[0] && final_max <= (1.0 - 1e-6) * prev_max) return {Stability::Stable};
  return {Stability::Marginal};
}

std::vector<double> per_node_costs(const AugmentedPlant& plant, const Matrix& gain, int horizon) {
  std::vector<double> out;
  out.reserve(plant.dims.n);
  for (int node = 0; node < plant.dims.n; ++node) {
    out.push_back(closed_loop_impulse(plant, gain, node, horizon).empirical_cost);
  }
  return out;
}

double empirical_vs_analytic_cost(const AugmentedPlant& plant, const Matrix& gain, const SynthesisResult& synthesis,
                                  int horizon) {
  if (!synthesis.converged()) throw std::invalid_argument("empirical_vs_analytic_cost needs a converged synthesis");
  double total = 0.0;
  for (double c : per_node_costs(plant, gain, horizon)) total += c;
  return std::abs(total - synthesis.cost_total) / synthesis.cost_total;
}

}  // namespace desslab
