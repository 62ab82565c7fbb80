#include "doctest.h"

#include <cmath>
#include <numbers>

#include "desslab/ring.hpp"
#include "oracles.hpp"

using namespace desslab;

TEST_CASE("ring matrix examples") {
  const Matrix m = build_ring_matrix({5, 1.0});
  CHECK(max_abs(m.rowwise().sum() - Vector::Ones(5)) < 1e-15);
  CHECK(spectral_radius(m) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(max_abs(build_ring_matrix({3, 3.0}) - Matrix::Ones(3, 3)) == 0.0);
  CHECK(std::abs(spectral_radius(build_ring_matrix({5, 1.856})) - 1.856) < 1e-9);

  CHECK_THROWS_AS(build_ring_matrix({2, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_ring_matrix({5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_ring_matrix({5, -1.0}), std::invalid_argument);
}

TEST_CASE("spectral radius equals a for every ring size") {
  for (int n = 3; n <= 50; ++n) {
    for (double a : {0.5, 1.0, 1.856, 3.7}) {
      CHECK(std::abs(spectral_radius(build_ring_matrix({n, a})) - a) < 1e-8);
    }
  }
}

TEST_CASE("analytic eigenvalues match the numeric oracle") {
  for (int n = 3; n <= 50; ++n) {
    const RingSpec spec{n, 1.7};
    std::vector<double> analytic = ring_eigensystem(spec).values();
    std::vector<double> numeric = oracle::ring_spectrum(n, 1.7);
    std::sort(analytic.begin(), analytic.end());
    std::sort(numeric.begin(), numeric.end());
    for (int i = 0; i < n; ++i) CHECK(std::abs(analytic[i] - numeric[i]) < 1e-9);
  }
}

TEST_CASE("eigensystem examples and invariants") {
  const EigenSystem unit = ring_eigensystem({5, 1.0});
  CHECK(unit.pairs[0].value == doctest::Approx(1.0));
  CHECK(max_abs(unit.pairs[0].vector - Vector::Constant(5, 1.0 / std::sqrt(5.0))) < 1e-14);

  const RingSpec spec{5, 1.856};
  const EigenSystem es = ring_eigensystem(spec);
  const auto v = es.values();
  CHECK(v[0] == doctest::Approx(1.856));
  CHECK(v[1] == doctest::Approx(1.0011).epsilon(1e-4));
  CHECK(v[2] == doctest::Approx(1.0011).epsilon(1e-4));
  CHECK(v[3] == doctest::Approx(-0.3824).epsilon(1e-3));
  CHECK(v[4] == doctest::Approx(-0.3824).epsilon(1e-3));
  CHECK(count_unstable_modes(spec) == 3);

  const Matrix A = build_ring_matrix(spec);
  const Matrix E = es.leading_vectors(5);
  CHECK(max_abs(E * E.transpose() - Matrix::Identity(5, 5)) < 1e-12);
  for (const auto& p : es.pairs) {
    CHECK(max_abs(A * p.vector - p.value * p.vector) < 1e-10);
    Eigen::Index first = 0;
    while (std::abs(p.vector(first)) < 1e-12) ++first;
    CHECK(p.vector(first) > 0.0);
  }
  CHECK(es.pairs[1].frequency == 1);
  CHECK_FALSE(es.pairs[1].sine);
  CHECK(es.pairs[2].sine);

  const auto four = ring_eigensystem({4, 3.0}).values();
  CHECK(four[0] == doctest::Approx(3.0));
  CHECK(four[1] == doctest::Approx(1.0));
  CHECK(four[2] == doctest::Approx(1.0));
  CHECK(four[3] == doctest::Approx(-1.0));
  CHECK(circulant_eigenvalue({4, 3.0}, 2) == doctest::Approx(-1.0));
}

TEST_CASE("unstable mode count is a nondecreasing step in a") {
  int prev = 0;
  for (double a = 0.1; a < 12.0; a += 0.01) {
    const int c = count_unstable_modes({7, a});
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(prev == 7);
}

TEST_CASE("fast sensing") {
  const Matrix c = build_fast_sensing({5, 1.856}, 1, 3);
  CHECK(c.rows() == 1);
  CHECK(c.cols() == 20);
  CHECK(max_abs(c.leftCols(5) - Matrix::Constant(1, 5, 1.0 / std::sqrt(5.0))) < 1e-14);
  CHECK(max_abs(c.rightCols(15)) == 0.0);

  const Matrix full = build_fast_sensing({5, 1.856}, 5, 0);
  CHECK(max_abs(full * full.transpose() - Matrix::Identity(5, 5)) < 1e-12);

  const Matrix two = build_fast_sensing({5, 1.856}, 2, 3);
  CHECK(two.cols() == 20);
  for (int j = 0; j < 5; ++j) {
    CHECK(two(1, j) == doctest::Approx(std::sqrt(2.0 / 5.0) * std::cos(2.0 * std::numbers::pi * j / 5.0)));
  }
  CHECK_THROWS(build_fast_sensing({5, 1.0}, 0, 1));
  CHECK_THROWS(build_fast_sensing({5, 1.0}, 6, 1));
}

TEST_CASE("slow sensing") {
  const Matrix c = build_slow_sensing({5, 1.0}, 3);
  CHECK(c.rows() == 5);
  CHECK(c.cols() == 20);
  CHECK(max_abs(c.rightCols(5) - Matrix::Identity(5, 5)) == 0.0);
  CHECK(max_abs(c.leftCols(15)) == 0.0);
  CHECK(max_abs(build_slow_sensing({5, 1.0}, 0) - Matrix::Identity(5, 5)) == 0.0);
  const Matrix small = build_slow_sensing({3, 1.0}, 1);
  CHECK(max_abs(small.rightCols(3) - Matrix::Identity(3, 3)) == 0.0);
}

TEST_CASE("augmented plant") {
  const AugmentedPlant p = augment({5, 1.856}, SensorConfig::diverse(1, 3));
  CHECK(p.dims.N == 20);
  CHECK(p.dims.p == 6);
  CHECK(spectral_radius(p.A) == doctest::Approx(1.856));
  CHECK(max_abs(p.B2 - Matrix::Identity(20, 20)) == 0.0);
  CHECK(max_abs(p.B1.topRows(5) - Matrix::Identity(5, 5)) == 0.0);
  CHECK(max_abs(p.B1.bottomRows(15)) == 0.0);
  CHECK(max_abs(p.C.topRows(1) - build_fast_sensing({5, 1.856}, 1, 3)) == 0.0);
  CHECK(max_abs(p.C.bottomRows(5) - build_slow_sensing({5, 1.856}, 3)) == 0.0);
  CHECK(numeric_rank(p.C, 1e-12) == 6);

  const AugmentedPlant flat = augment({5, 1.0}, SensorConfig::slow_only(0));
  CHECK(max_abs(flat.A - build_ring_matrix({5, 1.0})) == 0.0);
  CHECK(max_abs(flat.C - Matrix::Identity(5, 5)) == 0.0);
  CHECK(max_abs(flat.B1 - Matrix::Identity(5, 5)) == 0.0);

  const AugmentedPlant fast = augment({5, 1.856}, SensorConfig::fast_only(1, 3));
  CHECK(fast.dims.N == 20);
  CHECK(fast.dims.p == 1);
  CHECK(augment({5, 1.0}, SensorConfig::slow_only(2)).dims.p == 5);

  CHECK_THROWS(augment({5, 1.0}, SensorConfig::diverse(0, 1)));
  CHECK_THROWS(augment({5, 1.0}, SensorConfig::slow_only(-1)));
}

TEST_CASE("delay chain is a pure shift") {
  const int n = 4, d = 3;
  const AugmentedPlant p = augment({n, 1.3}, SensorConfig::slow_only(d));
  for (int node = 0; node < n; ++node) {
    Vector x = Vector::Zero(p.dims.N);
    x(node) = 1.0;
    const Vector ring0 = x.head(n);
    Matrix Ar = build_ring_matrix({n, 1.3});
    std::vector<Vector> history{ring0};
    for (int k = 1; k <= d; ++k) {
      x = p.A * x;
      history.push_back(Ar * history.back());
      for (int j = 1; j <= k; ++j) CHECK(max_abs(x.segment(j * n, n) - history[k - j]) < 1e-15);
    }
  }
}

TEST_CASE("sensor mode names") {
  CHECK(to_string(SensorMode::FastOnly) == "fast");
  CHECK(parse_sensor_mode("slow") == SensorMode::SlowOnly);
  CHECK(parse_sensor_mode("diverse") == SensorMode::Diverse);
  CHECK_THROWS_AS(parse_sensor_mode("medium"), std::invalid_argument);
}
