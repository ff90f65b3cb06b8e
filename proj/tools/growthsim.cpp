// SPDX-License-Identifier: Apache-2.0
//
// growthsim command line: experiment runners, circuit evaluation, coupling
// checks, bound audits and single-network simulation.

#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "growthsim/growthsim.hpp"

namespace gs = growthsim;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitViolation = 3;

struct CommonArgs {
  std::string config;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::string out;
  unsigned workers = 1;
  std::vector<std::string> params;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config, "INI config file or a run manifest (.json)");
  a.seed_opt = cmd->add_option("--seed", a.seed, "Master seed");
  a.trials_opt = cmd->add_option("--trials", a.trials, "Trials per grid point");
  a.out_opt = cmd->add_option("--out", a.out, "Output directory");
  a.workers_opt = cmd->add_option("--workers", a.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--set", a.params, "Override a parameter, key=value (repeatable)");
}

gs::ExperimentConfig resolve_config(const std::string& kind, const CommonArgs& a) {
  auto c = a.config.empty() ? gs::default_config(kind) : gs::load_config(a.config, kind);
  std::map<std::string, json> kv;
  for (const auto& p : a.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw gs::ConfigError("--set expects key=value, got '" + p + "'");
    kv[std::string(gs::detail::trim(std::string_view(p).substr(0, eq)))] =
        gs::detail::config_value(std::string_view(p).substr(eq + 1));
  }
  gs::apply_settings(c, kv, "--set");
  if (*a.seed_opt) c.master_seed = a.seed;
  if (*a.trials_opt) c.trials = a.trials;
  if (*a.out_opt) c.out_dir = a.out;
  if (*a.workers_opt) c.workers = a.workers;
  c.validate();
  return c;
}

gs::ReportWriter make_writer(const gs::ExperimentConfig& c, const std::string& command_line) {
  gs::RunManifest m;
  m.command_line = command_line;
  m.command = c.kind;
  m.config = c.to_json();
  m.master_seed = c.master_seed;
  return gs::ReportWriter(c.out_dir, m);
}

gs::AbEnsembleSpec ensemble_spec(const gs::ExperimentConfig& c, std::vector<gs::AbPoint> points) {
  gs::AbEnsembleSpec spec;
  spec.points = std::move(points);
  spec.trials = c.trials;
  spec.master_seed = c.master_seed;
  spec.workers = c.workers;
  spec.max_events = c.integer("max_events");
  if (c.has("method")) spec.method = gs::parse_method(c.text("method"));
  return spec;
}

void print_done(const gs::ReportWriter& w, const std::filesystem::path& manifest) {
  std::cout << "wrote " << w.dir().string() << " (manifest " << manifest.filename().string() << ")\n";
}

int cmd_ab_sweep(const gs::ExperimentConfig& c, const std::string& cl) {
  auto spec = ensemble_spec(c, gs::parse_ab_points(c, "points", c.number("gamma"), c.number("delta")));
  const auto stats = gs::run_ab_ensemble(spec);
  auto w = make_writer(c, cl);
  gs::emit_report(w, "ab_sweep", stats);
  print_done(w, w.finish());
  gs::write_ab_csv(std::cout, stats);
  return kExitOk;
}

int cmd_ab_diff(const gs::ExperimentConfig& c, const std::string& cl) {
  const auto stats = gs::run_ab_ensemble(ensemble_spec(c, gs::ab_diff_points(c)));
  auto w = make_writer(c, cl);
  gs::emit_report(w, "ab_diff", stats);
  print_done(w, w.finish());
  return kExitOk;
}

int cmd_ab_time_grid(const gs::ExperimentConfig& c, const std::string& cl) {
  gs::TimeGrid grid;
  grid.rates = gs::run_ab_ensemble(ensemble_spec(c, gs::time_grid_rate_points(c)));
  auto count_spec = ensemble_spec(c, gs::time_grid_count_points(c));
  // Disjoint seed range from the rate grid.
  count_spec.master_seed = gs::mix64(c.master_seed, 1);
  grid.counts = gs::run_ab_ensemble(count_spec);
  auto w = make_writer(c, cl);
  w.write("ab_time_grid.csv", [&](std::ostream& out) { gs::write_time_grid_csv(out, grid); });
  w.write_json("ab_time_grid.json", {{"rates", gs::to_json(grid.rates)}, {"counts", gs::to_json(grid.counts)}});
  print_done(w, w.finish());
  return kExitOk;
}

int cmd_nand_sim(const gs::ExperimentConfig& c, const std::string& cl) {
  const auto result = gs::nand_sim(gs::nand_options(c));
  auto w = make_writer(c, cl);
  json summary = json::array();
  for (const auto& combo : result.combos) {
    const std::string name = "nand_" + std::to_string(combo.a) + std::to_string(combo.b) + ".csv";
    w.write(name, [&](std::ostream& out) { gs::write_nand_series_csv(out, result.network, combo); });
    summary.push_back({{"a", combo.a},
                       {"b", combo.b},
                       {"expected", combo.expected},
                       {"samples", combo.runs.size()},
                       {"correct_dominates", combo.correct()}});
    std::cout << "inputs " << combo.a << combo.b << " -> " << combo.expected << ": correct rail dominates in "
              << combo.correct() << "/" << combo.runs.size() << " samples\n";
  }
  w.write("nand_runs.csv", [&](std::ostream& out) { gs::write_nand_runs_csv(out, result); });
  w.write_json("nand_summary.json", summary);
  print_done(w, w.finish());
  return kExitOk;
}

std::vector<gs::InputAssignment> parse_inputs(const std::string& text, const gs::Circuit& circuit,
                                              gs::Count n, gs::Count gap, double error) {
  std::map<std::string, int> values;
  for (auto item : gs::detail::split(text, ',')) {
    item = gs::detail::trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw gs::ConfigError("inputs expect NAME=0|1, got '" + std::string(item) + "'");
    const auto name = std::string(gs::detail::trim(item.substr(0, eq)));
    const auto v = gs::detail::trim(item.substr(eq + 1));
    if (v != "0" && v != "1") throw gs::ConfigError("input '" + name + "' must be 0 or 1");
    values[name] = v == "1" ? 1 : 0;
  }
  std::vector<gs::InputAssignment> out;
  for (const auto& name : circuit.inputs()) {
    auto it = values.find(name);
    if (it == values.end()) throw gs::ConfigError("no value given for input '" + name + "'");
    // Default error puts the wrong rail exactly at the (n, gap) limit.
    const double e = error >= 0.0 ? error : static_cast<double>(n - gap) / (2.0 * static_cast<double>(n));
    out.push_back({name, {n, gap, it->second}, e});
  }
  return out;
}

int cmd_circuit_run(const gs::ExperimentConfig& c, const std::string& cl) {
  if (c.text("circuit").empty()) throw gs::ConfigError("circuit-run needs a circuit file (--circuit)");
  const auto circuit = gs::load_circuit(c.text("circuit"));
  const auto n = static_cast<gs::Count>(c.integer("n"));
  const auto gap = static_cast<gs::Count>(c.integer("gap"));
  const auto inputs = parse_inputs(c.text("inputs"), circuit, n, gap, c.number("error"));

  gs::CircuitOptions o;
  const auto mode = c.text("mode");
  if (mode == "sequential")
    o.mode = gs::ScheduleMode::sequential;
  else if (mode == "parallel")
    o.mode = gs::ScheduleMode::parallel;
  else
    throw gs::ConfigError("mode must be sequential or parallel");
  o.gamma = c.number("gamma");
  o.delta = c.number("delta");
  o.alpha = c.number("alpha");
  o.theta = c.number("theta");
  o.method = gs::parse_method(c.text("method"));
  o.parallel_horizon = c.number("horizon");

  std::map<std::string, int> values;
  for (const auto& in : inputs) values[in.signal] = in.spec.value;
  const auto expected = gs::evaluate_circuit(circuit, values);

  json runs = json::array();
  std::map<std::string, std::uint64_t> correct;
  std::uint64_t unresolved = 0;
  for (std::uint64_t i = 0; i < c.trials; ++i) {
    o.engine.seed = gs::mix64(c.master_seed, i);
    const auto r = gs::run_circuit(circuit, inputs, o);
    json outputs = json::object();
    for (const auto& [name, readout] : r.readouts) {
      const auto& rc = r.rails.at(name);
      outputs[name] = {{"readout", gs::to_string(readout)}, {"rail0", rc.rail0}, {"rail1", rc.rail1}};
      if (readout == gs::readout_of(expected.at(name))) ++correct[name];
    }
    unresolved += r.unresolved;
    runs.push_back({{"trial", i}, {"t_end", r.trajectory.terminal.time},
                    {"events", r.trajectory.event_count}, {"outputs", outputs}});
  }
  json summary = {{"expected", expected}, {"trials", c.trials}, {"correct", correct},
                  {"unresolved", unresolved}, {"runs", runs}};
  auto w = make_writer(c, cl);
  w.write_json("circuit_run.json", summary);
  w.write("circuit_run.csv", [&](std::ostream& out) {
    out << "trial,output,expected,readout,rail0,rail1\n";
    for (const auto& r : runs)
      for (const auto& [name, o] : r.at("outputs").items())
        out << r.at("trial").get<std::uint64_t>() << ',' << name << ',' << expected.at(name) << ','
            << o.at("readout").get<std::string>() << ',' << o.at("rail0").get<std::uint64_t>() << ','
            << o.at("rail1").get<std::uint64_t>() << '\n';
  });
  print_done(w, w.finish());
  for (const auto& [name, want] : expected)
    std::cout << name << " expected " << want << ": correct in " << correct[name] << "/" << c.trials << "\n";
  return kExitOk;
}

int cmd_couple_check(const gs::ExperimentConfig& c, const std::string& cl) {
  const double gamma = c.number("gamma"), delta = c.number("delta");
  const auto points = gs::parse_ab_points(c, "points", gamma, delta);
  const auto max_steps = c.integer("max_steps");
  json per_point = json::array();
  std::uint64_t total_violations = 0, index = 0;
  for (const auto& p : points) {
    const auto hi = std::max(p.A0, p.B0), lo = std::min(p.A0, p.B0);
    std::uint64_t abm_viol = 0, yule_viol = 0, collisions = 0, undecided = 0;
    for (std::uint64_t i = 0; i < c.trials; ++i, ++index) {
      const auto seed = gs::mix64(c.master_seed, index);
      const auto m = gs::abm_run(p.A0, p.B0, gamma, delta, seed, max_steps);
      abm_viol += m.violations;
      if (!m.t_consensus) ++undecided;
      if (lo >= 1) {
        const auto y = gs::ab_yule_run(hi, lo, gamma, delta, seed, max_steps);
        yule_viol += y.violations;
        collisions += y.xy_collision ? 1 : 0;
      }
    }
    total_violations += abm_viol + yule_viol;
    per_point.push_back({{"A0", p.A0}, {"B0", p.B0}, {"runs", c.trials}, {"abm_violations", abm_viol},
                         {"ab_yule_violations", yule_viol}, {"xy_collisions", collisions},
                         {"abm_undecided", undecided}});
  }

  // Stuttering-step law with the state held fixed.
  json ks = json::array();
  const auto ks_n = c.integer("ks_samples");
  for (auto [a, b, m] : {std::tuple{5ull, 3ull, 3ull}, std::tuple{20ull, 20ull, 20ull}, std::tuple{2ull, 40ull, 9ull}}) {
    gs::AbmState frozen{a, b, m, 0.0, gamma, delta};
    const double rate = frozen.lambda_m();
    const auto waits = gs::frozen_m_waits(frozen, ks_n, gs::mix64(c.master_seed, index++));
    const auto r = gs::ks_test(waits, [rate](double x) { return x <= 0 ? 0.0 : -std::expm1(-rate * x); });
    ks.push_back({{"A", a}, {"B", b}, {"M", m}, {"rate", rate}, {"n", r.n}, {"statistic", r.statistic},
                  {"p_value", r.p_value}});
  }

  json report = {{"points", per_point}, {"total_violations", total_violations}, {"stutter_ks", ks}};
  auto w = make_writer(c, cl);
  w.write_json("couple_check.json", report);
  print_done(w, w.finish());
  std::cout << "coupling invariant violations: " << total_violations << "\n";
  return total_violations == 0 ? kExitOk : kExitViolation;
}

int cmd_bounds_audit(const gs::ExperimentConfig& c, const std::string& cl) {
  gs::AuditOptions o;
  o.drop_trials = c.trials;
  o.urn_n_max = c.integer("urn_n_max");
  o.seed = c.master_seed;
  const auto reports = gs::bounds_audit(o);
  auto w = make_writer(c, cl);
  json all = json::array();
  for (const auto& r : reports) all.push_back(gs::to_json(r));
  w.write_json("bounds_audit.json", all);
  w.write("bounds_audit.csv", [&](std::ostream& out) { gs::write_csv(out, reports); });
  print_done(w, w.finish());
  for (const auto& r : reports)
    std::cout << r.name << ": " << r.points.size() - r.violations() << "/" << r.points.size() << " points satisfied\n";
  return kExitOk;
}

int cmd_simulate(const gs::ExperimentConfig& c, const std::string& cl) {
  if (c.text("network").empty()) throw gs::ConfigError("simulate needs a reaction file (--network)");
  const auto file = gs::load_reaction_file(c.text("network"));
  const double t_end = c.number("t_end");
  gs::StopCondition stop{gs::stop::TimeHorizon{t_end}, gs::stop::MaxEvents{c.integer("max_events")}};
  gs::SimulationOptions opts;
  opts.seed = gs::mix64(c.master_seed, 0);
  const auto samples = c.integer("samples");
  opts.sampling = samples > 0 ? gs::Sampling::interval(t_end / static_cast<double>(samples)) : gs::Sampling::stop_only();
  const auto traj = gs::simulate(gs::parse_method(c.text("method")), file.network, file.initial, stop, opts);
  auto w = make_writer(c, cl);
  w.write("trajectory.csv", [&](std::ostream& out) { gs::write_trajectory_csv(out, file.network, traj); });
  const auto summary = gs::terminal_summary(file.network, stop, traj);
  w.write_json("summary.json", summary);
  print_done(w, w.finish());
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

int cmd_beta(double z, std::uint64_t a, std::uint64_t b) {
  std::cout.precision(17);
  const double v = gs::reg_inc_beta(z, a, b);
  json out = {{"z", z}, {"a", a}, {"b", b}, {"value", v}};
  for (unsigned k = 1; k <= 3; ++k) {
    if (z == k / 4.0) {
      const auto q = gs::reg_inc_beta_quarter(k, a, b);
      out["exact"] = q.numerator.str() + "/4^" + std::to_string(q.exponent);
    }
  }
  std::cout << out.dump() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::string command_line;
  for (int i = 0; i < argc; ++i) command_line += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"growthsim: stochastic simulation of growing chemical reaction networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GROWTHSIM_VERSION);

  std::map<std::string, CommonArgs> common;
  auto sub = [&](const std::string& name, const std::string& help) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, common[name]);
    return cmd;
  };
  sub("ab-sweep", "A-B protocol success probability at given (A0, B0) points");
  sub("ab-diff", "Success probability against the initial gap at fixed totals");
  sub("ab-time-grid", "Mean consensus time over rate and initial-count grids");
  sub("nand-sim", "Bacterial gate with amplifiers under logistic growth (tau-leaping)");
  auto* circuit_cmd = sub("circuit-run", "Evaluate a dual-rail circuit file");
  std::string circuit_file, circuit_inputs;
  circuit_cmd->add_option("--circuit", circuit_file, "Circuit file");
  circuit_cmd->add_option("--inputs", circuit_inputs, "Input values, e.g. A=1,B=0");
  sub("couple-check", "Pathwise coupling invariants and the stutter law");
  sub("bounds-audit", "Closed-form bounds against exact or Monte Carlo oracles");
  auto* simulate_cmd = sub("simulate", "Simulate a reaction file to a time horizon");
  std::string network_file;
  simulate_cmd->add_option("--network", network_file, "Reaction file");

  auto* beta_cmd = app.add_subcommand("beta", "Regularized incomplete beta I_z(a, b) for integer a, b");
  double z = 0.5;
  std::uint64_t a = 1, b = 1;
  beta_cmd->add_option("--z", z, "Point in [0, 1]")->required();
  beta_cmd->add_option("-a", a, "First parameter (>= 1)")->required();
  beta_cmd->add_option("-b", b, "Second parameter (>= 1)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*beta_cmd) return cmd_beta(z, a, b);
    for (auto* cmd : app.get_subcommands()) {
      const auto name = cmd->get_name();
      auto c = resolve_config(name, common.at(name));
      if (name == "circuit-run") {
        if (!circuit_file.empty()) c.params["circuit"] = circuit_file;
        if (!circuit_inputs.empty()) c.params["inputs"] = circuit_inputs;
      }
      if (name == "simulate" && !network_file.empty()) c.params["network"] = network_file;

      if (name == "ab-sweep") return cmd_ab_sweep(c, command_line);
      if (name == "ab-diff") return cmd_ab_diff(c, command_line);
      if (name == "ab-time-grid") return cmd_ab_time_grid(c, command_line);
      if (name == "nand-sim") return cmd_nand_sim(c, command_line);
      if (name == "circuit-run") return cmd_circuit_run(c, command_line);
      if (name == "couple-check") return cmd_couple_check(c, command_line);
      if (name == "bounds-audit") return cmd_bounds_audit(c, command_line);
      if (name == "simulate") return cmd_simulate(c, command_line);
    }
  } catch (const gs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gs::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gs::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gs::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
