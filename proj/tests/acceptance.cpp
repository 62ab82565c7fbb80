// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "desslab/ifp.hpp"
#include "desslab/ofsynth.hpp"
#include "desslab/report.hpp"
#include "desslab/riccati.hpp"
#include "desslab/sim.hpp"
#include "desslab/sweep.hpp"
#include "oracles.hpp"

using namespace desslab;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
  std::cout << id << " " << (ok ? "PASS" : "FAIL") << "  " << detail << "\n";
  if (!ok) ++failures;
}

std::string fmt(double v) { return format_number(v); }

void a1() {
  const SynthesisResult slow = fc_synthesis(augment({5, 1.856}, SensorConfig::slow_only(3)));
  const SynthesisResult div = fc_synthesis(augment({5, 1.856}, SensorConfig::diverse(1, 3)));
  const bool total_ok = std::abs(slow.cost_total - 13.726) <= 0.01 && std::abs(div.cost_total - 2.279) <= 0.01;
  const bool node_ok = std::abs(slow.cost_per_node - 13.726) <= 0.01 && std::abs(div.cost_per_node - 2.279) <= 0.01;
  const double ratio = slow.cost_total / div.cost_total;
  const bool ratio_ok = std::abs(ratio - 6.02) <= 0.05;
  std::string convention = total_ok && !node_ok ? "cost_total" : node_ok && !total_ok ? "cost_per_node" : "none";
  report("A1", (total_ok != node_ok) && ratio_ok,
         "slow-only/diverse cost: per node " + fmt(slow.cost_per_node) + "/" + fmt(div.cost_per_node) + ", total " +
             fmt(slow.cost_total) + "/" + fmt(div.cost_total) + " (targets 13.726/2.279 +-0.01); convention " +
             convention + "; ratio " + fmt(ratio) + " (target 6.02 +-0.05)");
}

void a2() {
  const SynthesisResult fast = fc_synthesis(augment({5, 1.856}, SensorConfig::fast_only(1, 3)));
  report("A2", fast.status == DareStatus::Diverged && std::isinf(fast.cost_per_node) && std::isinf(fast.cost_total),
         "fast-only status " + std::string(to_string(fast.status)) + ", cost " + fmt(fast.cost_per_node));
}

void a3() {
  const BreakPoint bp = find_breakpoint(5, 1, 1e-6);
  bool monotone = true;
  for (int n = 6; n <= 50; ++n) monotone = monotone && analytic_breakpoint(n, 1) <= analytic_breakpoint(n - 1, 1);
  const bool ok = std::abs(bp.a_empirical - 1.856) <= 0.003 && bp.gap <= 1e-5 && monotone;
  report("A3", ok,
         "a_empirical " + fmt(bp.a_empirical) + ", a_analytic " + fmt(bp.a_analytic) + ", gap " + fmt(bp.gap) +
             ", nonincreasing over n=5..50: " + (monotone ? "yes" : "no"));
}

void a4() {
  const AugmentedPlant slow = augment({5, 1.856}, SensorConfig::slow_only(3));
  const Trajectory s = closed_loop_impulse(slow, fc_synthesis(slow).gain, 0, 20);
  const Trajectory ol = open_loop_impulse(slow, 0, 20);
  const double prefix = max_abs(s.ring_slice().topRows(4) - ol.ring_slice().topRows(4));
  const double tail = s.ring_slice().bottomRows(17).cwiseAbs().maxCoeff();

  const AugmentedPlant div = augment({5, 1.856}, SensorConfig::diverse(1, 3));
  const AugmentedPlant fast = augment({5, 1.856}, SensorConfig::fast_only(1, 3));
  const Trajectory d = closed_loop_impulse(div, fc_synthesis(div).gain, 0, 20);
  const Trajectory f = closed_loop_impulse(fast, fc_synthesis(fast).gain, 0, 20);
  const double match = max_abs(d.ring_slice().topRows(4) - f.ring_slice().topRows(4));
  const double d_tail = d.ring_slice().bottomRows(17).cwiseAbs().maxCoeff();
  const bool ok = prefix == 0.0 && tail <= 1e-8 && match <= 1e-8 && d_tail <= 1e-8 &&
                  d.classification == Classification{Stability::Deadbeat, 4};
  report("A4", ok,
         "slow-only open-loop prefix gap " + fmt(prefix) + ", tail " + fmt(tail) + "; diverse vs fast-only t<=3 gap " +
             fmt(match) + ", tail " + fmt(d_tail) + ", " + d.classification.label());
}

void a5() {
  const auto rows = sweep_cost_vs_delay(5, 1.856, 1, {1, 2, 3, 4, 5, 6, 7, 8});
  bool diverse_ok = true, fast_ok = true, slow_ok = true;
  double prev = 0.0, worst_diverse = 0.0;
  for (const auto& r : rows) {
    switch (r.params.mode) {
      case SensorMode::FastOnly: fast_ok = fast_ok && std::isinf(r.cost_per_node); break;
      case SensorMode::SlowOnly:
        slow_ok = slow_ok && r.cost_per_node > prev;
        prev = r.cost_per_node;
        break;
      case SensorMode::Diverse:
        diverse_ok = diverse_ok && r.cost_per_node < 10.0;
        worst_diverse = std::max(worst_diverse, r.cost_per_node);
        break;
    }
  }
  report("A5", diverse_ok && fast_ok && slow_ok,
         "max diverse cost per node " + fmt(worst_diverse) + ", slow-only strictly increasing: " +
             (slow_ok ? "yes" : "no") + ", fast-only inf throughout: " + (fast_ok ? "yes" : "no"));
}

void a6() {
  const AblationReport slow = ablation_study({5, 1.856}, SensorConfig::slow_only(3));
  const AblationReport div = ablation_study({5, 1.856}, SensorConfig::diverse(1, 3));
  const AblationReport mild = ablation_study({5, 1.5}, SensorConfig::diverse(1, 3));
  const SynthesisResult fast = fc_synthesis(augment({5, 1.5}, SensorConfig::fast_only(1, 3)));
  const bool ok = !slow.ablated_stabilizing() && !div.ablated_stabilizing() && slow.alternation_detected &&
                  mild.ablated.settles() && fast.converged() && mild.ablated_empirical_cost > fast.cost_per_node;
  report("A6", ok,
         "a=1.856 ablated slow " + slow.ablated.label() + " (alternation " + (slow.alternation_detected ? "yes" : "no") +
             "), ablated diverse " + div.ablated.label() + "; a=1.5 ablated diverse " + mild.ablated.label() +
             " cost " + fmt(mild.ablated_empirical_cost) + " vs fast-only " + fmt(fast.cost_per_node));
}

void a7() {
  double worst = 0.0;
  int cells = 0;
  for (int n : {3, 5, 8}) {
    for (int d = 0; d <= 4; ++d) {
      for (SensorMode mode : {SensorMode::FastOnly, SensorMode::SlowOnly, SensorMode::Diverse}) {
        const AugmentedPlant p = augment({n, 1.856}, {mode, mode == SensorMode::SlowOnly ? 0 : 1, d});
        const SynthesisResult fc = fc_synthesis(p);
        if (!fc.stabilizing()) continue;
        const SynthesisResult sf = sf_dual_synthesis(p);
        worst = std::max(worst, std::abs(fc.cost_total - sf.cost_total) / fc.cost_total);
        ++cells;
      }
    }
  }
  report("A7", cells > 0 && worst <= 1e-9,
         std::to_string(cells) + " stabilizable cells, max relative gap " + fmt(worst));
}

void a8() {
  double worst = 0.0;
  int cells = 0;
  for (int n = 3; n <= 6; ++n) {
    for (int d = 0; n * (d + 1) <= 12; ++d) {
      for (double a : {0.8, 1.3, 1.856}) {
        for (SensorMode mode : {SensorMode::FastOnly, SensorMode::SlowOnly, SensorMode::Diverse}) {
          const AugmentedPlant p = augment({n, a}, {mode, mode == SensorMode::SlowOnly ? 0 : 1, d});
          const SynthesisResult s = fc_synthesis(p);
          if (!s.converged()) continue;
          const double ref = oracle::value_iteration_cost(p.A, p.B1, p.C, 500);
          worst = std::max(worst, std::abs(s.cost_total - ref) / ref);
          ++cells;
        }
      }
    }
  }
  double h2 = 0.0;
  for (int n : {3, 4, 5}) {
    for (const SensorConfig sc : {SensorConfig::slow_only(3), SensorConfig::diverse(1, 3)}) {
      const AugmentedPlant p = augment({n, 1.856}, sc);
      const SynthesisResult s = fc_synthesis(p);
      h2 = std::max(h2, empirical_vs_analytic_cost(p, s.gain, s, 50));
    }
  }
  report("A8", cells > 0 && worst <= 1e-6 && h2 <= 1e-6,
         std::to_string(cells) + " instances vs T=500 value iteration, max gap " + fmt(worst) +
             "; H2 by simulation max gap " + fmt(h2));
}

void a9() {
  double worst_l2 = 0.0, worst_k3 = 0.0, recursion = 0.0;
  bool dims = true;
  for (int d : {1, 2}) {
    const Matrix eye = Matrix::Identity(5, 5);
    const OFPlant p = build_of_plant({5, 1.856}, eye, eye, d, d);
    const OFGains g = of_synthesis(p, OFWeights::defaults(p));
    worst_l2 = std::max(worst_l2, g.relative_L2());
    worst_k3 = std::max(worst_k3, g.relative_K3());
    const IFPReport rep = ifp_report(g, p);
    dims = dims && rep.at("IFP-Sense-1").dimension == 5 * d && rep.at("IFP-Act-1").dimension == 5 * d &&
           rep.at("IFP-State").dimension == 5 && rep.at("IFP-Sense-2").dimension == 5;
    if (d == 1) {
      for (int node = 0; node < 5; ++node) {
        const OFTrajectory r = simulate_of(p, g, 40, node);
        recursion = std::max(recursion, max_abs(r.x_r - simulate_of_block(p, g, 40, Vector::Unit(5, node))));
      }
    }
  }
  report("A9", worst_l2 <= 1e-6 && worst_k3 <= 1e-6 && recursion <= 1e-10 && dims,
         "relative L2 " + fmt(worst_l2) + ", relative K3 " + fmt(worst_k3) + ", reduced vs block " + fmt(recursion) +
             ", pathway dimensions " + (dims ? "n*d, n*d, n, n" : "wrong"));
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

void a10(const std::string& cli) {
  const std::vector<std::string> commands{
      "impulse --n 5 --a 1.856 --mode diverse --q 1 --d 3 --T 20",
      "synth --mode slow --d 3",
      "sweep-a --n 5,8 --a-grid 1.7:1.9:0.05 --mode fast",
      "sweep-delay --n 5 --a 1.856 --q 1 --d 1..8",
      "breakpoint --n 5..8 --q 1 --tol 1e-5",
      "ablate --n 5 --a 1.5,1.856 --d 3",
      "ofsynth --n 5 --a 1.856 --d 1",
  };
  const fs::path root = fs::temp_directory_path() / "desslab_acceptance";
  fs::remove_all(root);
  bool ok = true;
  int compared = 0;
  std::string detail;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const fs::path a = root / (std::to_string(i) + "_a"), b = root / (std::to_string(i) + "_b");
    const std::string base = "\"" + cli + "\" " + commands[i] + " --formats csv,json";
    const int ra = std::system((base + " --workers 1 --out \"" + a.string() + "\" 2>/dev/null").c_str());
    const int rb = std::system((base + " --workers 4 --out \"" + b.string() + "\" 2>/dev/null").c_str());
    if (ra != 0 || rb != 0) {
      ok = false;
      detail += " [" + commands[i] + " exited nonzero]";
      continue;
    }
    for (const auto& entry : fs::directory_iterator(a)) {
      ++compared;
      if (slurp(entry.path()) != slurp(b / entry.path().filename())) {
        ok = false;
        detail += " [" + entry.path().filename().string() + " differs]";
      }
    }
  }
  fs::remove_all(root);
  report("A10", ok && compared > 0,
         std::to_string(commands.size()) + " CLI experiments, " + std::to_string(compared) +
             " CSV/JSON files byte-identical across runs with 1 and 4 workers" + detail);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path to desslab cli>\n";
    return 2;
  }
  a1();
  a2();
  a3();
  a4();
  a5();
  a6();
  a7();
  a8();
  a9();
  a10(argv[1]);
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << "\n";
  return failures == 0 ? 0 : 1;
}
