#include "desslab/ring.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace desslab {

void RingSpec::validate() const {
  if (n < 3) throw std::invalid_argument("ring needs n >= 3, got " + std::to_string(n));
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("ring instability scale a must be > 0");
}

std::string_view to_string(SensorMode mode) {
  switch (mode) {
    case SensorMode::FastOnly: return "fast";
    case SensorMode::SlowOnly: return "slow";
    case SensorMode::Diverse: return "diverse";
  }
  return "?";
}

SensorMode parse_sensor_mode(std::string_view text) {
  if (text == "fast" || text == "fast-only" || text == "FastOnly") return SensorMode::FastOnly;
  if (text == "slow" || text == "slow-only" || text == "SlowOnly") return SensorMode::SlowOnly;
  if (text == "diverse" || text == "Diverse") return SensorMode::Diverse;
  throw std::invalid_argument("unknown sensor mode '" + std::string(text) + "'");
}

void SensorConfig::validate(const RingSpec& spec) const {
  if (d < 0) throw std::invalid_argument("delay d must be >= 0");
  if (has_fast() && (q < 1 || q > spec.n)) {
    throw std::invalid_argument("fast sensor count q must lie in [1, n]");
  }
}

std::vector<double> EigenSystem::values() const {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.value);
  return out;
}

Matrix EigenSystem::leading_vectors(int q) const {
  if (q < 0 || q > static_cast<int>(pairs.size())) throw std::invalid_argument("q out of range");
  const int n = pairs.empty() ? 0 : static_cast<int>(pairs.front().vector.size());
  Matrix e(q, n);
  for (int i = 0; i < q; ++i) e.row(i) = pairs[i].vector.transpose();
  return e;
}

Matrix build_ring_matrix(const RingSpec& spec) {
  spec.validate();
  const int n = spec.n;
  Matrix ring = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    ring(i, (i + n - 1) % n) = 1.0;
    ring(i, i) = 1.0;
    ring(i, (i + 1) % n) = 1.0;
  }
  return (spec.a / 3.0) * ring;
}

double circulant_eigenvalue(const RingSpec& spec, int k) {
  return spec.a / 3.0 * (1.0 + 2.0 * std::cos(2.0 * std::numbers::pi * k / spec.n));
}

namespace {

// First entry with magnitude above 1e-12 is made positive.
void fix_sign(Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

EigenSystem ring_eigensystem(const RingSpec& spec) {
  spec.validate();
  const int n = spec.n;
  EigenSystem sys;
  for (int k = 0; 2 * k <= n; ++k) {
    const double value = circulant_eigenvalue(spec, k);
    Vector c(n);
    for (int j = 0; j < n; ++j) c(j) = std::cos(2.0 * std::numbers::pi * k * j / n);
    c.normalize();
    fix_sign(c);
    sys.pairs.push_back({value, c, k, false});
    if (k != 0 && 2 * k != n) {
      Vector s(n);
      for (int j = 0; j < n; ++j) s(j) = std::sin(2.0 * std::numbers::pi * k * j / n);
      s.normalize();
      fix_sign(s);
      sys.pairs.push_back({value, s, k, true});
    }
  }
  // Magnitudes are compared on a 1e-10 grid so analytic ties (e.g. +1 and -1)
  // are not split by roundoff.
  auto key = [&](const EigenPair& p) { return std::llround(std::abs(p.value) / std::max(spec.a, 1.0) * 1e10); };
  std::stable_sort(sys.pairs.begin(), sys.pairs.end(), [&](const EigenPair& l, const EigenPair& r) {
    const auto kl = key(l), kr = key(r);
    if (kl != kr) return kl > kr;
    if (l.frequency != r.frequency) return l.frequency < r.frequency;
    return !l.sine && r.sine;
  });
  return sys;
}

int count_unstable_modes(const RingSpec& spec) {
  spec.validate();
  int count = 0;
  for (int k = 0; k < spec.n; ++k) {
    if (std::abs(circulant_eigenvalue(spec, k)) >= 1.0) ++count;
  }
  return count;
}

Matrix build_fast_sensing(const RingSpec& spec, int q, int d) {
  spec.validate();
  if (q < 1 || q > spec.n) throw std::invalid_argument("fast sensor count q must lie in [1, n]");
  if (d < 0) throw std::invalid_argument("delay d must be >= 0");
  Matrix c = Matrix::Zero(q, spec.n * (d + 1));
  c.leftCols(spec.n) = ring_eigensystem(spec).leading_vectors(q);
  return c;
}

Matrix build_slow_sensing(const RingSpec& spec, int d) {
  spec.validate();
  if (d < 0) throw std::invalid_argument("delay d must be >= 0");
  const int n = spec.n;
  Matrix c = Matrix::Zero(n, n * (d + 1));
  c.rightCols(n).setIdentity();
  return c;
}

AugmentedPlant augment(const RingSpec& spec, const SensorConfig& sensors) {
  spec.validate();
  sensors.validate(spec);
  const int n = spec.n;
  const int d = sensors.d;
  const int N = n * (d + 1);

  AugmentedPlant plant;
  plant.spec = spec;
  plant.sensors = sensors;
  plant.A = Matrix::Zero(N, N);
  plant.A.topLeftCorner(n, n) = build_ring_matrix(spec);
  if (d > 0) plant.A.bottomLeftCorner(n * d, n * d).setIdentity();
  plant.B1 = Matrix::Zero(N, n);
  plant.B1.topRows(n).setIdentity();
  plant.B2 = Matrix::Identity(N, N);

  switch (sensors.mode) {
    case SensorMode::FastOnly: plant.C = build_fast_sensing(spec, sensors.q, d); break;
    case SensorMode::SlowOnly: plant.C = build_slow_sensing(spec, d); break;
    case SensorMode::Diverse:
      plant.C = vstack(build_fast_sensing(spec, sensors.q, d), build_slow_sensing(spec, d));
      break;
  }
  plant.dims = {n, d, sensors.has_fast() ? sensors.q : 0, N, static_cast<int>(plant.C.rows())};
  return plant;
}

}  // namespace desslab
