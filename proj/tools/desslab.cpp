#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "desslab/experiment.hpp"

namespace {

using desslab::Json;

struct Flags {
  std::map<std::string, std::string> text;  // JSON key -> raw flag value
  bool open_loop = false;
  std::string out;
  std::string formats;
  int workers = 1;
  std::optional<int> max_iter;
  std::optional<double> tol_rel;
  bool no_accelerate = false;
};

// Numeric keys are parsed here so that parse_config sees typed JSON; range
// and list keys stay strings and are expanded there.
Json typed(const std::string& key, const std::string& raw) {
  static const std::set<std::string> ints{"n", "q", "T", "node"};
  static const std::set<std::string> reals{"a", "bisect_tol", "eps_u", "eps_v"};
  if (ints.count(key)) {
    const auto v = desslab::parse_int_range(raw);
    if (v.size() != 1) throw desslab::ConfigError(key + " takes a single integer");
    return v.front();
  }
  if (reals.count(key)) {
    const auto v = desslab::parse_grid(raw);
    if (v.size() != 1) throw desslab::ConfigError(key + " takes a single number");
    return v.front();
  }
  return raw;
}

void add(CLI::App* cmd, Flags& f, const std::string& flag, const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(flag, [&f, key](const std::string& v) { f.text[key] = v; }, help);
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--out", f.out, "Output directory (default $DESSLAB_OUT or ./desslab_out)");
  cmd->add_option("--formats", f.formats, "Comma list from csv,json,svg");
  cmd->add_option("--workers", f.workers, "Sweep worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-iter", f.max_iter, "Riccati iteration cap");
  cmd->add_option("--tol-rel", f.tol_rel, "Riccati relative convergence tolerance");
  cmd->add_flag("--no-accelerate", f.no_accelerate, "Plain Riccati iteration only");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay-augmented ring control experiments"};
  app.require_subcommand(1);
  Flags f;
  std::string config_path;

  auto* impulse = app.add_subcommand("impulse", "Impulse response of the optimal closed loop");
  add(impulse, f, "--n", "n", "Ring size");
  add(impulse, f, "--a", "a", "Instability");
  add(impulse, f, "--q", "q", "Fast sensor count");
  add(impulse, f, "--mode", "mode", "fast, slow or diverse");
  add(impulse, f, "--d", "d", "Slow sensing delay");
  add(impulse, f, "--T", "T", "Horizon");
  add(impulse, f, "--node", "node", "Impulse node, 1-based");
  impulse->add_flag("--open-loop", f.open_loop, "Simulate without control");

  auto* synth = app.add_subcommand("synth", "Optimal full-control gain and cost");
  add(synth, f, "--n", "n", "Ring size");
  add(synth, f, "--a", "a", "Instability");
  add(synth, f, "--q", "q", "Fast sensor count");
  add(synth, f, "--mode", "mode", "fast, slow or diverse");
  add(synth, f, "--d", "d", "Slow sensing delay");

  auto* sweep_a = app.add_subcommand("sweep-a", "Cost as a function of a");
  add(sweep_a, f, "--n", "n_list", "Ring sizes, e.g. 5 or 5,10,20");
  add(sweep_a, f, "--a-grid", "a_grid", "start:stop:step or comma list");
  add(sweep_a, f, "--q", "q", "Fast sensor count");
  add(sweep_a, f, "--mode", "mode", "fast, slow or diverse");
  add(sweep_a, f, "--d", "d", "Slow sensing delay");

  auto* sweep_d = app.add_subcommand("sweep-delay", "Cost of the three architectures over d");
  add(sweep_d, f, "--n", "n", "Ring size");
  add(sweep_d, f, "--a", "a", "Instability");
  add(sweep_d, f, "--q", "q", "Fast sensor count");
  add(sweep_d, f, "--d", "d", "Delays, e.g. 1..8");

  auto* breakpoint = app.add_subcommand("breakpoint", "Largest stabilizable a for fast-only sensing");
  add(breakpoint, f, "--n", "n_list", "Ring sizes, e.g. 5 or 5..50");
  add(breakpoint, f, "--q", "q", "Fast sensor count");
  add(breakpoint, f, "--tol", "bisect_tol", "Bisection tolerance");

  auto* abl = app.add_subcommand("ablate", "Remove internal feedback and simulate");
  add(abl, f, "--n", "n", "Ring size");
  add(abl, f, "--a", "a_grid", "Instability, or a comma list");
  add(abl, f, "--a-grid", "a_grid", "start:stop:step or comma list");
  add(abl, f, "--d", "d", "Slow sensing delay");
  add(abl, f, "--modes", "modes", "Comma list from slow,diverse");
  add(abl, f, "--T", "T", "Horizon");

  auto* of = app.add_subcommand("ofsynth", "Output-feedback synthesis with delayed actuation and sensing");
  add(of, f, "--n", "n", "Ring size");
  add(of, f, "--a", "a", "Instability");
  add(of, f, "--d", "d", "Actuation and sensing delay");
  add(of, f, "--eps-u", "eps_u", "Control weight");
  add(of, f, "--eps-v", "eps_v", "Sensor noise weight");
  add(of, f, "--T", "T", "Horizon");
  add(of, f, "--node", "node", "Impulse node, 1-based");

  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("--config", config_path, "Config file")->required();

  for (auto* cmd : {impulse, synth, sweep_a, sweep_d, breakpoint, abl, of, run}) add_common(cmd, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(desslab::ExitCode::ConfigError);
  }

  desslab::ExperimentConfig cfg;
  try {
    Json doc;
    if (run->parsed()) {
      cfg = desslab::load_config(config_path);
      doc = desslab::config_to_json(cfg);
      if (cfg.out_dir.empty() == false) doc["output"]["dir"] = cfg.out_dir.string();
    } else {
      CLI::App* cmd = app.get_subcommands().front();
      doc["experiment"] = cmd->get_name();
      doc["params"] = Json::object();
      for (const auto& [key, raw] : f.text) doc["params"][key] = typed(key, raw);
      if (cmd == impulse && f.open_loop) doc["params"]["open_loop"] = true;
    }
    if (!f.formats.empty()) {
      Json formats = Json::array();
      std::stringstream in(f.formats);
      for (std::string item; std::getline(in, item, ',');) formats.push_back(item);
      doc["output"]["formats"] = formats;
    }
    if (f.max_iter) doc["solver"]["max_iter"] = *f.max_iter;
    if (f.tol_rel) doc["solver"]["tol_rel"] = *f.tol_rel;
    if (f.no_accelerate) doc["solver"]["accelerate"] = false;
    if (!f.out.empty()) doc["output"]["dir"] = f.out;
    cfg = desslab::parse_config(doc);
  } catch (const desslab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return static_cast<int>(desslab::ExitCode::ConfigError);
  }

  return desslab::run_experiment(cfg, f.workers, std::cerr);
}
