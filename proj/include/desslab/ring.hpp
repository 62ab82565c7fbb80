#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "desslab/linalg.hpp"

namespace desslab {

/// Physical ring plant: n nodes, each coupled to itself and both neighbours
/// with weight a/3, so the spectral radius of the ring matrix is a.
struct RingSpec {
  int n = 5;
  double a = 1.0;

  /// Throws std::invalid_argument unless n >= 3 and a > 0.
  void validate() const;
};

enum class SensorMode { FastOnly, SlowOnly, Diverse };

std::string_view to_string(SensorMode mode);
/// Accepts "fast", "slow", "diverse" (and the enum spellings).
SensorMode parse_sensor_mode(std::string_view text);

/// Active sensing architecture. FastOnly still carries d so the augmented
/// state has the same dimension in all three modes.
struct SensorConfig {
  SensorMode mode = SensorMode::Diverse;
  int q = 1;
  int d = 0;

  static SensorConfig fast_only(int q, int d = 0) { return {SensorMode::FastOnly, q, d}; }
  static SensorConfig slow_only(int d) { return {SensorMode::SlowOnly, 0, d}; }
  static SensorConfig diverse(int q, int d) { return {SensorMode::Diverse, q, d}; }

  bool has_fast() const { return mode != SensorMode::SlowOnly; }
  bool has_slow() const { return mode != SensorMode::FastOnly; }

  void validate(const RingSpec& spec) const;
};

struct PlantDims {
  int n = 0;
  int d = 0;
  int q_effective = 0;
  int N = 0;  // n (d + 1)
  int p = 0;  // sensor rows
};

/// Delay-augmented full-control plant
///   x(t+1) = A x(t) + B2 u(t) + B1 w(t),  y(t) = C x(t)
/// with state [x_r; x_s(1); ...; x_s(d)] where x_s(k) is the ring state k steps ago.
struct AugmentedPlant {
  RingSpec spec;
  SensorConfig sensors;
  Matrix A;
  Matrix B1;
  Matrix B2;
  Matrix C;
  PlantDims dims;
};

struct EigenPair {
  double value = 0.0;
  Vector vector;
  int frequency = 0;  // circulant index k in [0, n/2]
  bool sine = false;  // sine member of a degenerate (k, n-k) pair
};

/// Eigenpairs of the ring matrix in canonical order: |value| descending, then
/// frequency ascending, cosine before sine.
struct EigenSystem {
  std::vector<EigenPair> pairs;

  std::vector<double> values() const;
  /// Rows are the first q eigenvectors.
  Matrix leading_vectors(int q) const;
};

Matrix build_ring_matrix(const RingSpec& spec);

/// Analytic circulant eigensystem in the real Fourier basis.
EigenSystem ring_eigensystem(const RingSpec& spec);

/// Value (a/3)(1 + 2 cos(2 pi k / n)).
double circulant_eigenvalue(const RingSpec& spec, int k);

/// Number of ring eigenvalues with magnitude >= 1, counted with multiplicity.
int count_unstable_modes(const RingSpec& spec);

/// q x n(d+1): leading eigenvectors padded with zeros over the delay columns.
Matrix build_fast_sensing(const RingSpec& spec, int q, int d);

/// n x n(d+1): [0 I], reads the most-delayed copy of every ring state.
Matrix build_slow_sensing(const RingSpec& spec, int d);

AugmentedPlant augment(const RingSpec& spec, const SensorConfig& sensors);

}  // namespace desslab
