#include "desslab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "desslab/ifp.hpp"
#include "desslab/ofsynth.hpp"
#include "desslab/sim.hpp"
#include "desslab/sweep.hpp"

namespace desslab {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"impulse", {"n", "a", "q", "mode", "d", "T", "node", "open_loop"}},
      {"synth", {"n", "a", "q", "mode", "d"}},
      {"sweep-a", {"n_list", "a_grid", "q", "mode", "d"}},
      {"sweep-delay", {"n", "a", "q", "d"}},
      {"breakpoint", {"n_list", "q", "bisect_tol"}},
      {"ablate", {"n", "a_grid", "d", "modes", "T"}},
      {"ofsynth", {"n", "a", "d", "eps_u", "eps_v", "T", "node"}},
  };
  return keys;
}

int default_horizon(const std::string& experiment) {
  if (experiment == "ablate") return 200;
  if (experiment == "ofsynth") return 40;
  return 20;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

template <typename T>
T parse_scalar(const std::string& text) {
  const std::string t = trim(text);
  T value{};
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw ConfigError("not a number: '" + text + "'");
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::vector<int> int_list(const Json& j) {
  if (j.is_string()) return parse_int_range(j.get<std::string>());
  if (j.is_number_integer()) return {j.get<int>()};
  if (j.is_array()) {
    std::vector<int> out;
    for (const auto& v : j) {
      if (!v.is_number_integer()) throw ConfigError("expected integers in list");
      out.push_back(v.get<int>());
    }
    return out;
  }
  throw ConfigError("expected an integer, a list, or a range string");
}

std::vector<double> real_list(const Json& j) {
  if (j.is_string()) return parse_grid(j.get<std::string>());
  if (j.is_number()) return {j.get<double>()};
  if (j.is_array()) {
    std::vector<double> out;
    for (const auto& v : j) {
      if (!v.is_number()) throw ConfigError("expected numbers in list");
      out.push_back(v.get<double>());
    }
    return out;
  }
  throw ConfigError("expected a number, a list, or a grid string");
}

SensorMode mode_of(const Json& j) {
  if (!j.is_string()) throw ConfigError("mode must be a string");
  try {
    return parse_sensor_mode(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

template <typename T>
T number(const Json& j, const char* key) {
  if (!j.is_number()) throw ConfigError(std::string(key) + " must be a number");
  if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
  }
  return j.get<T>();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate_params(const std::string& exp, const ExperimentParams& p) {
  const bool uses_n_list = exp == "sweep-a" || exp == "breakpoint";
  if (!uses_n_list) require(p.n >= 3, "n must be >= 3");
  for (int n : p.n_list) require(n >= 3, "every n must be >= 3");
  if (uses_n_list) require(!p.n_list.empty(), "n_list must be nonempty");
  require(p.a > 0.0 && std::isfinite(p.a), "a must be positive");
  for (double a : p.a_grid) require(a > 0.0 && std::isfinite(a), "grid values of a must be positive");
  require(!p.d.empty(), "d must be nonempty");
  for (int d : p.d) require(d >= 0, "d must be >= 0");
  require(p.T >= 1, "T must be >= 1");

  const bool single_d = exp == "impulse" || exp == "synth" || exp == "sweep-a" || exp == "ablate" || exp == "ofsynth";
  if (single_d) require(p.d.size() == 1, exp + " takes a single d");

  if (exp == "impulse" || exp == "synth" || exp == "sweep-a" || exp == "sweep-delay") {
    const std::vector<int> ns = exp == "sweep-a" ? p.n_list : std::vector<int>{p.n};
    for (int n : ns) {
      if (exp == "sweep-delay" || p.mode != SensorMode::SlowOnly) {
        require(p.q >= 1 && p.q <= n, "q must lie in [1, n]");
      }
    }
  }
  if (exp == "breakpoint") {
    for (int n : p.n_list) require(p.q >= 1 && p.q < n, "breakpoint needs 1 <= q < n");
    require(p.bisect_tol > 0.0, "bisect_tol must be positive");
  }
  if (exp == "impulse" || exp == "ofsynth") require(p.node >= 1 && p.node <= p.n, "node must lie in [1, n]");
  if (exp == "sweep-a") {
    require(!p.a_grid.empty(), "a_grid must be nonempty");
    require(std::is_sorted(p.a_grid.begin(), p.a_grid.end()), "a_grid must be ascending");
  }
  if (exp == "ablate") {
    require(!p.a_grid.empty(), "ablate needs a_grid");
    require(!p.modes.empty(), "modes must be nonempty");
    for (auto m : p.modes) require(m != SensorMode::FastOnly, "ablate takes slow and diverse modes only");
    require(p.d.front() >= 1, "ablate needs d >= 1");
  }
  if (exp == "ofsynth") require(p.eps_u > 0.0 && p.eps_v > 0.0, "eps_u and eps_v must be positive");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

class Writer {
 public:
  Writer(const ExperimentConfig& cfg, std::ostream& log) : cfg_(cfg), log_(log) {}

  void csv(const std::string& name, const CsvTable& table) {
    if (cfg_.wants("csv")) put(name, render_csv(table));
  }
  void json(const std::string& name, const Json& doc) {
    if (cfg_.wants("json")) put(name, dump(doc));
  }
  void svg(const std::string& name, const Matrix& m, const HeatmapOptions& opts) {
    if (cfg_.wants("svg")) put(name, render_heatmap_svg(m, opts));
  }
  void put(const std::string& name, const std::string& text) {
    write_text(cfg_.out_dir / name, text);
    log_ << "wrote " << (cfg_.out_dir / name).string() << "\n";
  }

 private:
  const ExperimentConfig& cfg_;
  std::ostream& log_;
};

Json synthesis_json(const SynthesisResult& s) {
  Json j;
  j["status"] = to_string(s.status);
  j["iterations"] = s.iterations;
  j["cost_per_node"] = json_number(s.cost_per_node);
  j["cost_total"] = json_number(s.cost_total);
  j["stabilizing"] = s.stabilizing();
  if (s.converged()) {
    j["closed_loop_radius"] = json_number(s.closed_loop_radius);
  } else {
    j["closed_loop_radius"] = nullptr;
  }
  return j;
}

SensorConfig sensors_of(const ExperimentParams& p) {
  return {p.mode, p.mode == SensorMode::SlowOnly ? 0 : p.q, p.d.front()};
}

int run_impulse(const ExperimentConfig& cfg, Writer& out) {
  const ExperimentParams& p = cfg.params;
  const AugmentedPlant plant = augment({p.n, p.a}, sensors_of(p));
  const SynthesisResult synth = fc_synthesis(plant, cfg.solver);
  const Trajectory traj = p.open_loop ? open_loop_impulse(plant, p.node - 1, p.T)
                                      : closed_loop_impulse(plant, synth.gain, p.node - 1, p.T);

  const int N = plant.dims.N;
  CsvTable table;
  table.header.push_back("t");
  for (int i = 1; i <= N; ++i) table.header.push_back("x_" + std::to_string(i));
  for (int i = 1; i <= N; ++i) table.header.push_back("u_" + std::to_string(i));
  for (int t = 0; t <= p.T; ++t) {
    std::vector<std::string> row{std::to_string(t)};
    for (int i = 0; i < N; ++i) row.push_back(format_number(traj.states(t, i)));
    for (int i = 0; i < N; ++i) row.push_back(t < p.T ? format_number(traj.inputs(t, i)) : "");
    table.rows.push_back(std::move(row));
  }
  table.rows.push_back({"empirical_cost", format_number(traj.empirical_cost)});
  out.csv("trajectory.csv", table);

  Json summary;
  summary["experiment"] = "impulse";
  summary["n"] = p.n;
  summary["a"] = p.a;
  summary["mode"] = to_string(p.mode);
  summary["q"] = plant.sensors.q;
  summary["d"] = plant.dims.d;
  summary["T"] = p.T;
  summary["node"] = p.node;
  summary["open_loop"] = p.open_loop;
  summary["synthesis"] = synthesis_json(synth);
  summary["empirical_cost"] = json_number(traj.empirical_cost);
  summary["classification"] = traj.classification.label();
  out.json("summary.json", summary);

  HeatmapOptions hm;
  hm.title = std::string(to_string(p.mode)) + (p.open_loop ? " open loop" : "") + ", cost per node " +
             format_number(synth.cost_per_node);
  hm.block_rows = p.n;
  out.svg("heatmap.svg", traj.states.topRows(p.T).transpose(), hm);
  return synth.status == DareStatus::MaxIterExceeded ? 3 : 0;
}

int run_synth(const ExperimentConfig& cfg, Writer& out) {
  const ExperimentParams& p = cfg.params;
  const AugmentedPlant plant = augment({p.n, p.a}, sensors_of(p));
  const SynthesisResult synth = fc_synthesis(plant, cfg.solver);

  Json summary;
  summary["experiment"] = "synth";
  summary["n"] = p.n;
  summary["a"] = p.a;
  summary["mode"] = to_string(p.mode);
  summary["q"] = plant.sensors.q;
  summary["d"] = plant.dims.d;
  summary["synthesis"] = synthesis_json(synth);
  if (synth.converged()) {
    const GainPartition parts = partition(synth.gain, p.n, plant.dims.d);
    summary["forward_norm"] = json_number(parts.forward.norm());
    Json norms = Json::array();
    for (double v : parts.block_norms) norms.push_back(json_number(v));
    summary["internal_block_norms"] = norms;
  }
  out.json("summary.json", summary);
  if (synth.converged()) {
    out.csv("gain.csv", matrix_table(synth.gain));
    HeatmapOptions hm;
    hm.title = std::string(to_string(p.mode)) + " optimal gain";
    hm.row_label = "state";
    hm.col_label = "sensor";
    hm.block_rows = p.n;
    hm.cell_px = 20;
    out.svg("gain.svg", synth.gain, hm);
  }
  return synth.status == DareStatus::MaxIterExceeded ? 3 : 0;
}

Json rows_json(const std::vector<SweepRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["n"] = r.params.n;
    j["a"] = r.params.a;
    j["q"] = r.params.q;
    j["d"] = r.params.d;
    j["mode"] = to_string(r.params.mode);
    j["status"] = to_string(r.status);
    j["cost_per_node"] = json_number(r.cost_per_node);
    j["cost_total"] = json_number(r.cost_total);
    j["stabilizable"] = r.stabilizable;
    if (r.closed_loop_radius) {
      j["closed_loop_radius"] = json_number(*r.closed_loop_radius);
    } else {
      j["closed_loop_radius"] = nullptr;
    }
    arr.push_back(j);
  }
  return arr;
}

int sweep_exit(const std::vector<SweepRow>& rows) {
  for (const auto& r : rows) {
    if (r.status == DareStatus::MaxIterExceeded) return 3;
  }
  return 0;
}

int run_sweep_a(const ExperimentConfig& cfg, Writer& out, const SweepOptions& sweep) {
  const ExperimentParams& p = cfg.params;
  const auto rows = sweep_cost_vs_a(p.n_list, p.a_grid, sensors_of(p), sweep);
  out.csv("sweep.csv", sweep_table(rows));
  out.json("sweep.json", rows_json(rows));
  return sweep_exit(rows);
}

int run_sweep_delay(const ExperimentConfig& cfg, Writer& out, const SweepOptions& sweep) {
  const ExperimentParams& p = cfg.params;
  const auto rows = sweep_cost_vs_delay(p.n, p.a, p.q, p.d, sweep);
  out.csv("sweep.csv", sweep_table(rows));
  out.json("sweep.json", rows_json(rows));
  return sweep_exit(rows);
}

int run_breakpoint(const ExperimentConfig& cfg, Writer& out, const SweepOptions& sweep) {
  const ExperimentParams& p = cfg.params;
  const auto points = find_breakpoints(p.n_list, p.q, p.bisect_tol, sweep);
  out.csv("breakpoints.csv", breakpoint_table(points));
  if (points.size() == 1) {
    out.json("breakpoint.json", to_json(points.front()));
  } else {
    Json arr = Json::array();
    for (const auto& bp : points) arr.push_back(to_json(bp));
    out.json("breakpoint.json", arr);
  }
  return 0;
}

int run_ablate(const ExperimentConfig& cfg, Writer& out, const SweepOptions& sweep) {
  const ExperimentParams& p = cfg.params;
  const int d = p.d.front();
  const auto reports = ablation_grid(p.n, p.a_grid, d, p.modes, p.T, sweep);
  out.csv("ablation.csv", ablation_table(reports));
  Json arr = Json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  out.json("ablation.json", arr);

  int code = 0;
  for (const auto& r : reports) {
    if (r.intact_status == DareStatus::MaxIterExceeded) code = 3;
    if (!cfg.wants("svg")) continue;
    const AugmentedPlant plant = augment(r.spec, r.sensors);
    const SynthesisResult synth = fc_synthesis(plant, cfg.solver);
    const Trajectory traj = closed_loop_impulse(plant, ablate(synth.gain, p.n, d), 0, p.T);
    HeatmapOptions hm;
    hm.title = std::string(to_string(r.sensors.mode)) + " ablated, a = " + format_number(r.spec.a) + ", " +
               r.ablated.label();
    hm.block_rows = p.n;
    hm.cell_px = 6;
    out.svg("ablated_" + std::string(to_string(r.sensors.mode)) + "_a" + format_number(r.spec.a) + ".svg",
            traj.states.topRows(p.T).transpose(), hm);
  }
  return code;
}

int run_ofsynth(const ExperimentConfig& cfg, Writer& out) {
  const ExperimentParams& p = cfg.params;
  const int d = p.d.front();
  const Matrix eye = Matrix::Identity(p.n, p.n);
  const OFPlant plant = build_of_plant({p.n, p.a}, eye, eye, d, d);
  const OFGains gains = of_synthesis(plant, OFWeights::defaults(plant, p.eps_u, p.eps_v), cfg.solver);
  const SeparationRadii radii = separation_radii(plant, gains);
  const IFPReport ifp = ifp_report(gains, plant);

  Json summary;
  summary["experiment"] = "ofsynth";
  summary["n"] = p.n;
  summary["a"] = p.a;
  summary["d"] = d;
  summary["state_dim"] = plant.dims.state_dim();
  summary["control_status"] = to_string(gains.control_status);
  summary["filter_status"] = to_string(gains.filter_status);
  summary["residual_L2"] = json_number(gains.residual_L2);
  summary["residual_K3"] = json_number(gains.residual_K3);
  summary["relative_L2"] = json_number(gains.relative_L2());
  summary["relative_K3"] = json_number(gains.relative_K3());
  summary["radius_assembled"] = json_number(radii.assembled);
  summary["radius_controller"] = json_number(radii.controller);
  summary["radius_observer"] = json_number(radii.observer);
  Json paths = Json::array();
  for (const auto& pw : ifp.pathways) {
    Json j;
    j["name"] = pw.name;
    j["dimension"] = pw.dimension;
    j["magnitude"] = json_number(pw.magnitude);
    paths.push_back(j);
  }
  summary["pathways"] = paths;

  const Vector w0 = Vector::Unit(p.n, p.node - 1);
  const Matrix block = simulate_of_block(plant, gains, p.T, w0);
  summary["final_ring_norm"] = json_number(block.row(p.T).cwiseAbs().maxCoeff());
  if (d == 1) {
    const OFTrajectory reduced = simulate_of(plant, gains, p.T, w0);
    summary["reduced_vs_block_gap"] = json_number(max_abs(reduced.x_r - block));
  }
  out.json("ofsynth.json", summary);
  out.csv("L.csv", matrix_table(gains.L));
  out.csv("K.csv", matrix_table(gains.K));

  HeatmapOptions hm;
  hm.block_rows = p.n;
  hm.cell_px = 16;
  hm.title = "observer gain L";
  hm.col_label = "sensor";
  out.svg("L.svg", gains.L, hm);
  hm.title = "controller gain K'";
  hm.col_label = "input";
  out.svg("K.svg", gains.K.transpose(), hm);

  const bool maxed =
      gains.control_status == DareStatus::MaxIterExceeded || gains.filter_status == DareStatus::MaxIterExceeded;
  return maxed ? 3 : 0;
}

}  // namespace

bool ExperimentConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"impulse", "synth", "sweep-a", "sweep-delay",
                                              "breakpoint", "ablate", "ofsynth"};
  return names;
}

std::vector<int> parse_int_range(const std::string& text) {
  std::vector<int> out;
  for (const std::string& part : split(text, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_scalar<int>(part));
      continue;
    }
    const int lo = parse_scalar<int>(part.substr(0, dots));
    const int hi = parse_scalar<int>(part.substr(dots + 2));
    if (hi < lo) throw ConfigError("empty range '" + part + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  const auto fields = split(text, ':');
  if (fields.size() == 3) {
    const double start = parse_scalar<double>(fields[0]);
    const double stop = parse_scalar<double>(fields[1]);
    const double step = parse_scalar<double>(fields[2]);
    if (!(step > 0.0) || stop < start) throw ConfigError("grid needs start <= stop and step > 0");
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    if (count > 1000000) throw ConfigError("grid too large");
    for (long i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
  if (fields.size() != 1) throw ConfigError("grid must be start:stop:step or a comma list");
  std::vector<double> out;
  for (const std::string& part : split(text, ',')) out.push_back(parse_scalar<double>(part));
  if (out.empty()) throw ConfigError("empty grid");
  return out;
}

ExperimentConfig parse_config(const Json& doc) {
  try {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : doc.items()) {
      if (key != "experiment" && key != "params" && key != "output" && key != "solver") {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
    ExperimentConfig cfg;
    if (!doc.contains("experiment") || !doc["experiment"].is_string()) throw ConfigError("missing experiment");
    cfg.experiment = doc["experiment"].get<std::string>();
    const auto it = allowed_keys().find(cfg.experiment);
    if (it == allowed_keys().end()) throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    const auto& allowed = it->second;

    ExperimentParams& p = cfg.params;
    p.T = default_horizon(cfg.experiment);
    const Json params = doc.value("params", Json::object());
    if (!params.is_object()) throw ConfigError("params must be an object");
    for (const auto& [key, v] : params.items()) {
      if (!allowed.count(key)) throw ConfigError("parameter '" + key + "' does not apply to " + cfg.experiment);
      if (key == "n") p.n = number<int>(v, "n");
      else if (key == "a") p.a = number<double>(v, "a");
      else if (key == "q") p.q = number<int>(v, "q");
      else if (key == "mode") p.mode = mode_of(v);
      else if (key == "d") p.d = int_list(v);
      else if (key == "T") p.T = number<int>(v, "T");
      else if (key == "node") p.node = number<int>(v, "node");
      else if (key == "open_loop") {
        if (!v.is_boolean()) throw ConfigError("open_loop must be a boolean");
        p.open_loop = v.get<bool>();
      } else if (key == "n_list") p.n_list = int_list(v);
      else if (key == "a_grid") p.a_grid = real_list(v);
      else if (key == "bisect_tol") p.bisect_tol = number<double>(v, "bisect_tol");
      else if (key == "modes") {
        p.modes.clear();
        if (v.is_string()) {
          for (const auto& m : split(v.get<std::string>(), ',')) p.modes.push_back(mode_of(trim(m)));
        } else if (v.is_array()) {
          for (const auto& m : v) p.modes.push_back(mode_of(m));
        } else {
          throw ConfigError("modes must be a list");
        }
      } else if (key == "eps_u") p.eps_u = number<double>(v, "eps_u");
      else if (key == "eps_v") p.eps_v = number<double>(v, "eps_v");
    }
    if (cfg.experiment == "sweep-a" && !params.contains("n_list")) p.n_list = {p.n};
    if (cfg.experiment == "breakpoint" && !params.contains("n_list")) p.n_list = {p.n};
    if (cfg.experiment == "ablate" && !params.contains("a_grid")) p.a_grid = {p.a};
    if (cfg.experiment == "sweep-delay" && !params.contains("d")) p.d = parse_int_range("1..8");
    std::sort(p.modes.begin(), p.modes.end());
    p.modes.erase(std::unique(p.modes.begin(), p.modes.end()), p.modes.end());
    validate_params(cfg.experiment, p);

    if (doc.contains("output")) {
      const Json& o = doc["output"];
      if (!o.is_object()) throw ConfigError("output must be an object");
      for (const auto& [key, v] : o.items()) {
        if (key == "dir") {
          if (!v.is_string()) throw ConfigError("output.dir must be a string");
          cfg.out_dir = v.get<std::string>();
        } else if (key == "formats") {
          if (!v.is_array()) throw ConfigError("output.formats must be a list");
          cfg.formats.clear();
          for (const auto& f : v) {
            if (!f.is_string()) throw ConfigError("formats must be strings");
            const std::string s = f.get<std::string>();
            if (s != "csv" && s != "json" && s != "svg") throw ConfigError("unknown format '" + s + "'");
            if (!cfg.wants(s)) cfg.formats.push_back(s);
          }
        } else {
          throw ConfigError("unknown output key '" + key + "'");
        }
      }
    }

    if (doc.contains("solver")) {
      const Json& s = doc["solver"];
      if (!s.is_object()) throw ConfigError("solver must be an object");
      for (const auto& [key, v] : s.items()) {
        if (key == "tol_rel") cfg.solver.tol_rel = number<double>(v, "tol_rel");
        else if (key == "max_iter") cfg.solver.max_iter = number<int>(v, "max_iter");
        else if (key == "divergence_norm") cfg.solver.divergence_norm = number<double>(v, "divergence_norm");
        else if (key == "pinv_rel_tol") cfg.solver.pinv_rel_tol = number<double>(v, "pinv_rel_tol");
        else if (key == "accelerate") {
          if (!v.is_boolean()) throw ConfigError("accelerate must be a boolean");
          cfg.solver.accelerate = v.get<bool>();
        } else {
          throw ConfigError("unknown solver key '" + key + "'");
        }
      }
      try {
        cfg.solver.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path.string());
  Json doc;
  try {
    doc = Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

Json config_to_json(const ExperimentConfig& cfg) {
  const ExperimentParams& p = cfg.params;
  const auto& allowed = allowed_keys().at(cfg.experiment);
  Json params;
  auto has = [&](const char* k) { return allowed.count(k) > 0; };
  if (has("n")) params["n"] = p.n;
  if (has("n_list")) params["n_list"] = p.n_list;
  if (has("a")) params["a"] = p.a;
  if (has("a_grid")) params["a_grid"] = p.a_grid;
  if (has("q")) params["q"] = p.q;
  if (has("mode")) params["mode"] = to_string(p.mode);
  if (has("modes")) {
    Json modes = Json::array();
    for (auto m : p.modes) modes.push_back(to_string(m));
    params["modes"] = modes;
  }
  if (has("d")) params["d"] = p.d;
  if (has("T")) params["T"] = p.T;
  if (has("node")) params["node"] = p.node;
  if (has("open_loop")) params["open_loop"] = p.open_loop;
  if (has("bisect_tol")) params["bisect_tol"] = p.bisect_tol;
  if (has("eps_u")) params["eps_u"] = p.eps_u;
  if (has("eps_v")) params["eps_v"] = p.eps_v;

  Json doc;
  doc["experiment"] = cfg.experiment;
  doc["params"] = params;
  doc["output"]["formats"] = cfg.formats;
  doc["solver"]["tol_rel"] = cfg.solver.tol_rel;
  doc["solver"]["max_iter"] = cfg.solver.max_iter;
  doc["solver"]["divergence_norm"] = cfg.solver.divergence_norm;
  doc["solver"]["pinv_rel_tol"] = cfg.solver.pinv_rel_tol;
  doc["solver"]["accelerate"] = cfg.solver.accelerate;
  return doc;
}

fs::path default_out_dir() {
  const char* env = std::getenv("DESSLAB_OUT");
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path("desslab_out");
}

int run_experiment(const ExperimentConfig& config, int workers, std::ostream& log) {
  ExperimentConfig cfg = config;
  if (cfg.out_dir.empty()) cfg.out_dir = default_out_dir();
  try {
    fs::create_directories(cfg.out_dir);
    Writer probe(cfg, log);
    probe.put("config.json", dump(config_to_json(cfg)));
  } catch (const std::exception& e) {
    log << "error: output directory " << cfg.out_dir.string() << " is not writable: " << e.what() << "\n";
    return static_cast<int>(ExitCode::ConfigError);
  }

  Writer out(cfg, log);
  SweepOptions sweep;
  sweep.dare = cfg.solver;
  sweep.workers = workers;
  try {
    const std::string& e = cfg.experiment;
    if (e == "impulse") return run_impulse(cfg, out);
    if (e == "synth") return run_synth(cfg, out);
    if (e == "sweep-a") return run_sweep_a(cfg, out, sweep);
    if (e == "sweep-delay") return run_sweep_delay(cfg, out, sweep);
    if (e == "breakpoint") return run_breakpoint(cfg, out, sweep);
    if (e == "ablate") return run_ablate(cfg, out, sweep);
    if (e == "ofsynth") return run_ofsynth(cfg, out);
  } catch (const std::invalid_argument& err) {
    log << "error: " << err.what() << "\n";
    return static_cast<int>(ExitCode::ConfigError);
  } catch (const std::runtime_error& err) {
    log << "error: " << err.what() << "\n";
    return static_cast<int>(ExitCode::ConfigError);
  }
  log << "error: unknown experiment " << cfg.experiment << "\n";
  return static_cast<int>(ExitCode::ConfigError);
}

}  // namespace desslab
