#include "desslab/ifp.hpp"

#include <algorithm>
#include <stdexcept>

namespace desslab {

namespace {

void check_rows(const Matrix& gain, int n, int d) {
  if (n < 1 || d < 0) throw std::invalid_argument("partition: bad ring size or delay");
  if (gain.rows() != static_cast<Eigen::Index>(n) * (d + 1)) {
    throw std::invalid_argument("partition: gain has " + std::to_string(gain.rows()) + " rows, expected " +
                                std::to_string(n * (d + 1)));
  }
}

}  // namespace

GainPartition partition(const Matrix& gain, int n, int d) {
  check_rows(gain, n, d);
  GainPartition out;
  out.forward = gain.topRows(n);
  out.internal = gain.bottomRows(static_cast<Eigen::Index>(n) * d);
  for (int depth = 0; depth < d; ++depth) out.block_norms.push_back(out.internal.middleRows(depth * n, n).norm());
  return out;
}

Matrix ablate(const Matrix& gain, int n, int d) {
  check_rows(gain, n, d);
  Matrix out = gain;
  out.bottomRows(static_cast<Eigen::Index>(n) * d).setZero();
  return out;
}

Matrix ablate_depth(const Matrix& gain, int n, int d, int depth) {
  check_rows(gain, n, d);
  if (depth < 1 || depth > d) throw std::invalid_argument("ablate_depth: depth must lie in [1, d]");
  Matrix out = gain;
  out.middleRows(static_cast<Eigen::Index>(n) * depth, n).setZero();
  return out;
}

AblationReport ablation_study(const RingSpec& spec, const SensorConfig& sensors, const DareOptions& opts,
                              int horizon) {
  if (!sensors.has_slow()) throw std::invalid_argument("ablation_study needs slow or diverse sensing");
  const AugmentedPlant plant = augment(spec, sensors);
  const SynthesisResult synth = fc_synthesis(plant, opts);

  AblationReport report;
  report.spec = spec;
  report.sensors = sensors;
  report.horizon = horizon;
  report.intact_status = synth.status;
  report.intact_cost_per_node = synth.cost_per_node;

  const Trajectory intact = closed_loop_impulse(plant, synth.gain, 0, horizon);
  report.intact = intact.classification;
  report.intact_empirical_cost = intact.empirical_cost;

  const Matrix stripped = ablate(synth.gain, spec.n, sensors.d);
  const Trajectory ablated = closed_loop_impulse(plant, stripped, 0, horizon);
  report.ablated = ablated.classification;
  report.ablated_empirical_cost = ablated.empirical_cost;
  report.ablated_radius = spectral_radius(plant.A - stripped * plant.C);
  report.alternation_detected = detect_growing_alternation(ablated);

  const int window = std::min(horizon, 2 * (sensors.d + 1));
  for (int t = 1; t <= window; ++t) {
    report.ablated_early_peak = std::max(report.ablated_early_peak, ablated.ring_slice().row(t).cwiseAbs().maxCoeff());
  }
  return report;
}

}  // namespace desslab
