#include "doctest.h"

#include <cmath>

#include "desslab/riccati.hpp"
#include "oracles.hpp"

using namespace desslab;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

void check_converged_invariants(const SynthesisResult& s, const AugmentedPlant& plant, const DareOptions& opts) {
  const Matrix A = plant.A.transpose(), B = plant.C.transpose();
  const Matrix Q = plant.B1 * plant.B1.transpose();
  const Matrix R = Matrix::Zero(B.cols(), B.cols());
  const Matrix step = riccati_step(s.P, A, B, Q, R, opts.pinv_rel_tol);
  CHECK(max_abs(s.P - step) <= opts.tol_rel * (1.0 + max_abs(s.P)));
  CHECK(is_symmetric(s.P, 1e-9));
  CHECK(min_eigenvalue(s.P) >= -1e-9);
  CHECK(s.closed_loop_radius < 1.0);
}

}  // namespace

TEST_CASE("scalar fixed points") {
  const DareSolution half = solve_dare_sf(scalar(0.5), scalar(1), scalar(1), scalar(0));
  CHECK(half.status == DareStatus::Converged);
  CHECK(half.P(0, 0) == doctest::Approx(1.0));

  const DareSolution unreachable = solve_dare_sf(scalar(2), scalar(0), scalar(1), scalar(0));
  CHECK(unreachable.status == DareStatus::Diverged);

  DareOptions plain;
  plain.accelerate = false;
  CHECK(solve_dare_sf(scalar(2), scalar(0), scalar(1), scalar(0), plain).status == DareStatus::Diverged);

  const DareSolution one = solve_dare_sf(scalar(1), scalar(1), scalar(1), scalar(0));
  CHECK(one.status == DareStatus::Converged);
  CHECK(one.P(0, 0) == doctest::Approx(1.0));
  const Matrix k = sf_gain(one.P, scalar(1), scalar(1), scalar(0), 1e-9);
  CHECK(k(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(1.0 - k(0, 0)) < 1e-12);
}

TEST_CASE("max iteration cap is reported") {
  DareOptions opts;
  opts.accelerate = false;
  opts.max_iter = 3;
  const DareSolution s = solve_dare_sf(scalar(0.99), scalar(1), scalar(1), scalar(1));
  CHECK(s.status == DareStatus::Converged);
  const DareSolution capped = solve_dare_sf(scalar(0.99), scalar(1), scalar(1), scalar(1), opts);
  CHECK(capped.status == DareStatus::MaxIterExceeded);
  CHECK(capped.iterations == 3);
}

TEST_CASE("options validation") {
  DareOptions bad;
  bad.tol_rel = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.pinv_rel_tol = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.max_iter = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS(solve_dare_sf(Matrix::Identity(2, 2), scalar(1), scalar(1), scalar(0)));
}

TEST_CASE("reference instance synthesis") {
  const DareOptions opts;
  const AugmentedPlant slow = augment({5, 1.856}, SensorConfig::slow_only(3));
  const SynthesisResult s = fc_synthesis(slow, opts);
  REQUIRE(s.converged());
  check_converged_invariants(s, slow, opts);
  // A controller that sees nothing until the impulse leaves the delay chain
  // can do no better than the open-loop energy up to t = d.
  CHECK(s.cost_per_node == doctest::Approx(oracle::blind_cost(5, 1.856, 3)).epsilon(1e-10));
  CHECK(s.cost_total == doctest::Approx(5.0 * s.cost_per_node));

  const AugmentedPlant div = augment({5, 1.856}, SensorConfig::diverse(1, 3));
  const SynthesisResult dv = fc_synthesis(div, opts);
  REQUIRE(dv.converged());
  check_converged_invariants(dv, div, opts);
  CHECK(dv.cost_per_node == doctest::Approx(2.2732).epsilon(1e-4));
  CHECK(dv.cost_per_node < s.cost_per_node);

  const SynthesisResult fast = fc_synthesis(augment({5, 1.856}, SensorConfig::fast_only(1, 3)), opts);
  CHECK(fast.status == DareStatus::Diverged);
  CHECK(std::isinf(fast.cost_per_node));
  CHECK(std::isinf(fast.cost_total));
  CHECK_FALSE(fast.stabilizing());
}

TEST_CASE("dual synthesis") {
  const AugmentedPlant slow = augment({5, 1.856}, SensorConfig::slow_only(3));
  const SynthesisResult fc = fc_synthesis(slow);
  const SynthesisResult sf = sf_dual_synthesis(slow);
  CHECK(std::abs(fc.cost_total - sf.cost_total) <= 1e-9 * fc.cost_total);

  const AugmentedPlant div = augment({5, 1.856}, SensorConfig::diverse(1, 3));
  CHECK(max_abs(sf_dual_synthesis(div).gain.transpose() - fc_synthesis(div).gain) < 1e-9);

  const AugmentedPlant lqr = augment({5, 1.0}, SensorConfig::slow_only(0));
  const SynthesisResult k = sf_dual_synthesis(lqr);
  REQUIRE(k.converged());
  CHECK(k.closed_loop_radius < 1.0);
  // With R = 0 and full state access the optimal policy cancels the dynamics.
  CHECK(max_abs(k.gain - build_ring_matrix({5, 1.0})) < 1e-9);
}

TEST_CASE("duality holds across the grid") {
  for (int n : {3, 5, 8}) {
    for (int d = 0; d <= 4; ++d) {
      for (SensorMode mode : {SensorMode::FastOnly, SensorMode::SlowOnly, SensorMode::Diverse}) {
        const SensorConfig sc{mode, mode == SensorMode::SlowOnly ? 0 : 1, d};
        const AugmentedPlant p = augment({n, 1.856}, sc);
        const SynthesisResult fc = fc_synthesis(p);
        if (!fc.stabilizing()) continue;
        const SynthesisResult sf = sf_dual_synthesis(p);
        CAPTURE(n);
        CAPTURE(d);
        CHECK(std::abs(fc.cost_total - sf.cost_total) <= 1e-9 * fc.cost_total);
      }
    }
  }
}

TEST_CASE("stabilizability classification") {
  CHECK(classify_stabilizable(augment({5, 1.85}, SensorConfig::fast_only(1))));
  CHECK_FALSE(classify_stabilizable(augment({5, 1.856}, SensorConfig::fast_only(1))));
  CHECK(classify_stabilizable(augment({5, 1.856}, SensorConfig::fast_only(3))));
}

TEST_CASE("finite-horizon oracle agrees on small instances") {
  int compared = 0;
  for (int n : {3, 4, 5, 6}) {
    for (int d = 0; n * (d + 1) <= 12; ++d) {
      for (double a : {0.8, 1.3, 1.856}) {
        for (SensorMode mode : {SensorMode::FastOnly, SensorMode::SlowOnly, SensorMode::Diverse}) {
          const AugmentedPlant p = augment({n, a}, {mode, mode == SensorMode::SlowOnly ? 0 : 1, d});
          const SynthesisResult s = fc_synthesis(p);
          if (!s.converged()) continue;
          const double ref = oracle::value_iteration_cost(p.A, p.B1, p.C, 500);
          CAPTURE(n);
          CAPTURE(d);
          CAPTURE(a);
          CHECK(std::abs(s.cost_total - ref) <= 1e-6 * ref);
          ++compared;
        }
      }
    }
  }
  CHECK(compared > 30);
}

TEST_CASE("accelerated and plain iteration agree") {
  DareOptions plain;
  plain.accelerate = false;
  plain.max_iter = 2000000;
  for (double a : {1.2, 1.7, 1.84}) {
    const AugmentedPlant p = augment({5, a}, SensorConfig::fast_only(1, 1));
    const SynthesisResult fast = fc_synthesis(p);
    const SynthesisResult slow = fc_synthesis(p, plain);
    REQUIRE(fast.converged());
    REQUIRE(slow.converged());
    CHECK(std::abs(fast.cost_total - slow.cost_total) <= 1e-9 * slow.cost_total);
    CHECK(max_abs(fast.gain - slow.gain) <= 1e-9 * (1.0 + max_abs(slow.gain)));
  }
}

TEST_CASE("cost monotone in delay for slow sensing, flat for fast") {
  double prev = 0.0;
  const double fast0 = fc_synthesis(augment({5, 1.3}, SensorConfig::fast_only(1, 0))).cost_total;
  for (int d = 0; d <= 6; ++d) {
    const double c = fc_synthesis(augment({5, 1.3}, SensorConfig::slow_only(d))).cost_per_node;
    CHECK(c >= prev);
    prev = c;
    const double f = fc_synthesis(augment({5, 1.3}, SensorConfig::fast_only(1, d))).cost_total;
    CHECK(std::abs(f - fast0) <= 1e-9 * fast0);
  }
}
