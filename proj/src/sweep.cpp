#include "desslab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace desslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int resolve_workers(int workers, std::size_t tasks) {
  if (workers < 0) throw std::invalid_argument("workers must be >= 0");
  int w = workers == 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency())) : workers;
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(w), std::max<std::size_t>(tasks, 1)));
}

// Runs fn(i) for i in [0, count); results land in slot i regardless of which
// worker computed them.
template <typename T>
std::vector<T> parallel_map(std::size_t count, int workers, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(count);
  const int w = resolve_workers(workers, count);
  if (w <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (int t = 0; t < w; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        if (failed) return;
        try {
          out[i] = fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

bool stabilizable_fast(int n, double a, int q, const DareOptions& opts) {
  return classify_stabilizable(augment({n, a}, SensorConfig::fast_only(q, 0)), opts);
}

}  // namespace

bool operator<(const SweepParams& lhs, const SweepParams& rhs) {
  return std::tie(lhs.n, lhs.a, lhs.q, lhs.d, lhs.mode) < std::tie(rhs.n, rhs.a, rhs.q, rhs.d, rhs.mode);
}

SweepRow evaluate_cell(const SweepParams& params, const SweepOptions& opts) {
  const AugmentedPlant plant = augment(params.spec(), params.sensors());
  const SynthesisResult synth = fc_synthesis(plant, opts.dare);

  SweepRow row;
  row.params = params;
  row.status = synth.status;
  row.stabilizable = synth.stabilizing();
  if (row.stabilizable) {
    row.cost_per_node = synth.cost_per_node;
    row.cost_total = synth.cost_total;
    row.closed_loop_radius = synth.closed_loop_radius;
  } else {
    row.cost_per_node = kInf;
    row.cost_total = kInf;
  }
  if (opts.simulate_horizon > 0) {
    row.classification = closed_loop_impulse(plant, synth.gain, 0, opts.simulate_horizon).classification;
  }
  return row;
}

std::vector<SweepRow> run_grid(std::vector<SweepParams> cells, const SweepOptions& opts) {
  std::sort(cells.begin(), cells.end());
  return parallel_map<SweepRow>(cells.size(), opts.workers,
                                [&](std::size_t i) { return evaluate_cell(cells[i], opts); });
}

std::vector<SweepRow> sweep_cost_vs_a(const std::vector<int>& n_list, const std::vector<double>& a_grid,
                                      const SensorConfig& sensors, const SweepOptions& opts) {
  if (!std::is_sorted(a_grid.begin(), a_grid.end())) throw std::invalid_argument("a_grid must be ascending");
  std::vector<SweepParams> cells;
  for (int n : n_list) {
    for (double a : a_grid) cells.push_back({n, a, sensors.q, sensors.d, sensors.mode});
  }
  return run_grid(std::move(cells), opts);
}

std::vector<SweepRow> sweep_cost_vs_delay(int n, double a, int q, const std::vector<int>& d_range,
                                          const SweepOptions& opts) {
  if (d_range.empty()) throw std::invalid_argument("d_range must be nonempty");
  std::vector<SweepParams> cells;
  for (int d : d_range) {
    for (SensorMode mode : {SensorMode::FastOnly, SensorMode::SlowOnly, SensorMode::Diverse}) {
      cells.push_back({n, a, q, d, mode});
    }
  }
  return run_grid(std::move(cells), opts);
}

std::vector<double> circulant_magnitudes(int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  std::vector<double> s;
  s.reserve(n);
  for (int k = 0; k < n; ++k) s.push_back(std::abs(1.0 + 2.0 * std::cos(2.0 * std::numbers::pi * k / n)));
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

double analytic_breakpoint(int n, int q) {
  if (q < 1 || q >= n) throw std::invalid_argument("breakpoint needs 1 <= q < n");
  const double s = circulant_magnitudes(n)[q];
  return s <= 1e-12 ? kInf : 3.0 / s;
}

BreakPoint find_breakpoint(int n, int q, double bisect_tol, const DareOptions& opts) {
  if (!(bisect_tol > 0.0)) throw std::invalid_argument("bisect_tol must be positive");
  BreakPoint bp;
  bp.n = n;
  bp.q = q;
  bp.a_analytic = analytic_breakpoint(n, q);

  // The delay-free plant is enough: the fast-only boundary does not move with d.
  double lo = 1.0;
  double hi = 3.0 * n;
  if (stabilizable_fast(n, hi, q, opts)) {
    bp.a_empirical = hi;
  } else {
    while (hi - lo > bisect_tol) {
      const double mid = 0.5 * (lo + hi);
      (stabilizable_fast(n, mid, q, opts) ? lo : hi) = mid;
    }
    bp.a_empirical = 0.5 * (lo + hi);
  }
  bp.gap = std::abs(bp.a_analytic - bp.a_empirical);
  return bp;
}

std::vector<BreakPoint> find_breakpoints(const std::vector<int>& n_list, int q, double bisect_tol,
                                         const SweepOptions& opts) {
  std::vector<int> sorted = n_list;
  std::sort(sorted.begin(), sorted.end());
  return parallel_map<BreakPoint>(sorted.size(), opts.workers,
                                  [&](std::size_t i) { return find_breakpoint(sorted[i], q, bisect_tol, opts.dare); });
}

std::vector<AblationReport> ablation_grid(int n, const std::vector<double>& a_list, int d,
                                          const std::vector<SensorMode>& modes, int horizon,
                                          const SweepOptions& opts) {
  std::vector<std::pair<double, SensorMode>> cells;
  for (double a : a_list) {
    for (SensorMode mode : modes) {
      if (mode == SensorMode::FastOnly) throw std::invalid_argument("ablation_grid takes slow or diverse modes");
      cells.emplace_back(a, mode);
    }
  }
  std::sort(cells.begin(), cells.end());
  return parallel_map<AblationReport>(cells.size(), opts.workers, [&](std::size_t i) {
    const auto [a, mode] = cells[i];
    const SensorConfig sensors = mode == SensorMode::SlowOnly ? SensorConfig::slow_only(d) : SensorConfig::diverse(1, d);
    return ablation_study({n, a}, sensors, opts.dare, horizon);
  });
}

}  // namespace desslab
