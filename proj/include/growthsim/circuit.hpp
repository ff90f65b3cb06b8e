// SPDX-License-Identifier: Apache-2.0
//
// Feed-forward circuits of two-input dual-rail gates.
//
// Circuit file grammar (one statement per line, `#` starts a comment):
//
//   input  A, B            primary input signals (commas optional)
//   output Y               signals read out at the end
//   gate g1 = NAND(A, B) -> C
//   gate g2 = 0110(A, C) -> Y
//
// The function is NAND, AND, OR, NOR, XOR, XNOR or a 4-bit literal listing
// f(0,0) f(0,1) f(1,0) f(1,1). A signal S has rails S0 and S1.
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "growthsim/engine.hpp"
#include "growthsim/protocols.hpp"
#include "growthsim/reaction_file.hpp"

namespace growthsim {

struct GateNode {
  std::string name;
  TruthTable table;
  std::string in_a;
  std::string in_b;
  std::string out;
  int layer = 0;
};

class Circuit {
 public:
  Circuit() = default;
  Circuit(std::vector<std::string> inputs, std::vector<std::string> outputs,
          std::vector<GateNode> gates)
      : inputs_(std::move(inputs)), outputs_(std::move(outputs)), gates_(std::move(gates)) {
    validate();
  }

  const std::vector<std::string>& inputs() const noexcept { return inputs_; }
  const std::vector<std::string>& outputs() const noexcept { return outputs_; }
  /// Gates in a topological order (by layer, then declaration order).
  const std::vector<GateNode>& gates() const noexcept { return gates_; }
  int depth() const {
    int d = 0;
    for (const auto& g : gates_) d = std::max(d, g.layer);
    return d;
  }

  /// Every signal the circuit touches: inputs first, then gate outputs.
  std::vector<std::string> signals() const {
    std::vector<std::string> all = inputs_;
    for (const auto& g : gates_) all.push_back(g.out);
    return all;
  }

 private:
  void validate() {
    std::set<std::string> inputs(inputs_.begin(), inputs_.end());
    if (inputs.size() != inputs_.size()) throw InvalidArgument("circuit: duplicate input signal");
    std::map<std::string, std::size_t> driver;
    std::set<std::string> gate_names;
    for (std::size_t i = 0; i < gates_.size(); ++i) {
      const auto& g = gates_[i];
      if (!gate_names.insert(g.name).second)
        throw InvalidArgument("circuit: duplicate gate name '" + g.name + "'");
      if (g.in_a == g.in_b || g.in_a == g.out || g.in_b == g.out)
        throw InvalidArgument("circuit: gate '" + g.name + "' must use three distinct signals");
      if (inputs.count(g.out))
        throw InvalidArgument("circuit: gate '" + g.name + "' drives primary input '" + g.out + "'");
      if (!driver.emplace(g.out, i).second)
        throw InvalidArgument("circuit: signal '" + g.out + "' driven by more than one gate");
    }
    for (const auto& g : gates_)
      for (const auto* s : {&g.in_a, &g.in_b})
        if (!inputs.count(*s) && !driver.count(*s))
          throw InvalidArgument("circuit: gate '" + g.name + "' reads undriven signal '" + *s + "'");
    for (const auto& o : outputs_)
      if (!inputs.count(o) && !driver.count(o))
        throw InvalidArgument("circuit: output '" + o + "' is not driven");

    // Longest-path layering; detects cycles.
    std::vector<int> state(gates_.size(), 0);  // 0 new, 1 on stack, 2 done
    std::function<int(std::size_t)> layer_of = [&](std::size_t i) -> int {
      if (state[i] == 2) return gates_[i].layer;
      if (state[i] == 1) throw InvalidArgument("circuit: cycle through gate '" + gates_[i].name + "'");
      state[i] = 1;
      int layer = 1;
      for (const auto* s : {&gates_[i].in_a, &gates_[i].in_b}) {
        auto it = driver.find(*s);
        if (it != driver.end()) layer = std::max(layer, layer_of(it->second) + 1);
      }
      state[i] = 2;
      gates_[i].layer = layer;
      return layer;
    };
    for (std::size_t i = 0; i < gates_.size(); ++i) layer_of(i);
    std::stable_sort(gates_.begin(), gates_.end(),
                     [](const GateNode& a, const GateNode& b) { return a.layer < b.layer; });
  }

  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::vector<GateNode> gates_;
};

inline Circuit parse_circuit(std::istream& in, const std::string& source = "<input>") {
  std::vector<std::string> inputs, outputs;
  std::vector<GateNode> gates;
  std::string raw;
  std::size_t line_no = 0;
  auto names_of = [&](std::string_view rest) {
    std::vector<std::string> out;
    std::string cleaned(rest);
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    for (auto w : detail::split_ws(cleaned)) {
      if (!detail::is_species_name(w))
        throw ParseError(source, line_no, "bad signal name '" + std::string(w) + "'");
      out.emplace_back(w);
    }
    if (out.empty()) throw ParseError(source, line_no, "expected at least one signal name");
    return out;
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto words = detail::split_ws(line);
    const auto keyword = words.front();
    const auto rest = detail::trim(line.substr(keyword.size()));
    if (keyword == "input") {
      for (auto& n : names_of(rest)) inputs.push_back(std::move(n));
    } else if (keyword == "output") {
      for (auto& n : names_of(rest)) outputs.push_back(std::move(n));
    } else if (keyword == "gate") {
      // gate NAME = FUNC(A, B) -> Y
      const auto eq = rest.find('=');
      const auto open = rest.find('(');
      const auto close = rest.find(')');
      const auto arrow = rest.find("->");
      if (eq == std::string_view::npos || open == std::string_view::npos ||
          close == std::string_view::npos || arrow == std::string_view::npos ||
          !(eq < open && open < close && close < arrow))
        throw ParseError(source, line_no, "expected 'gate <name> = <FUNC>(<a>, <b>) -> <y>'");
      GateNode g;
      g.name = std::string(detail::trim(rest.substr(0, eq)));
      if (!detail::is_species_name(g.name))
        throw ParseError(source, line_no, "bad gate name '" + g.name + "'");
      const auto func = detail::trim(rest.substr(eq + 1, open - eq - 1));
      auto table = TruthTable::from_name(func);
      if (!table) throw ParseError(source, line_no, "unknown gate function '" + std::string(func) + "'");
      g.table = *table;
      auto args = detail::split(rest.substr(open + 1, close - open - 1), ',');
      if (args.size() != 2) throw ParseError(source, line_no, "gates take exactly two inputs");
      g.in_a = std::string(detail::trim(args[0]));
      g.in_b = std::string(detail::trim(args[1]));
      g.out = std::string(detail::trim(rest.substr(arrow + 2)));
      for (const auto* s : {&g.in_a, &g.in_b, &g.out})
        if (!detail::is_species_name(*s))
          throw ParseError(source, line_no, "bad signal name '" + *s + "'");
      gates.push_back(std::move(g));
    } else {
      throw ParseError(source, line_no, "unknown statement '" + std::string(keyword) + "'");
    }
  }
  return Circuit(std::move(inputs), std::move(outputs), std::move(gates));
}

inline Circuit parse_circuit_text(std::string_view text, const std::string& source = "<string>") {
  std::istringstream in{std::string(text)};
  return parse_circuit(in, source);
}

inline Circuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open circuit file '" + path + "'");
  return parse_circuit(in, path);
}

// ---------------------------------------------------------------------------
// Execution

enum class ScheduleMode { sequential, parallel };

struct CircuitOptions {
  ScheduleMode mode = ScheduleMode::sequential;
  double gamma = 1.0;
  double delta = 1.0;
  double alpha = 1.0;
  /// Amplifier phase stops after amp_cap_c * ln(n) / gamma.
  double amp_cap_c = 8.0;
  /// Amplifier phase also stops once the signal exceeds this multiple of n.
  double amp_population_factor = 64.0;
  /// Parallel mode time horizon; 0 means 4 / gamma.
  double parallel_horizon = 0.0;
  std::uint64_t max_events_per_phase = 4'000'000'000ULL;
  Method method = Method::exact;
  double theta = 0.75;
  SimulationOptions engine;
};

struct InputAssignment {
  std::string signal;
  SignalSpec spec;
  double error_fraction = 0.0;
};

struct PhaseRecord {
  std::string label;
  double t_start = 0.0;
  double t_end = 0.0;
  std::uint64_t events = 0;
  bool deadlocked = false;
};

struct CircuitResult {
  std::map<std::string, Readout> readouts;
  std::map<std::string, RailCounts> rails;
  std::size_t unresolved = 0;
  Network network;
  Trajectory trajectory;
  std::vector<PhaseRecord> phases;
};

namespace detail {

inline Network circuit_network(const Circuit& c, const CircuitOptions& o) {
  std::vector<Network> parts;
  for (const auto& g : c.gates())
    parts.push_back(gate_network(DualRailSignal::named(g.in_a), DualRailSignal::named(g.in_b),
                                 DualRailSignal::named(g.out), GateSpec{g.table, o.alpha}, o.gamma)
                        .network());
  for (const auto& s : c.signals())
    parts.push_back(amplifier_network(DualRailSignal::named(s), o.gamma, o.delta).network());
  return compose(parts);
}

/// Runs `phase` on the species it shares with `global`, leaving the rest frozen.
inline Trajectory run_phase(const Network& global, Configuration& state, double t0,
                            const Network& phase, const StopCondition& stop,
                            const CircuitOptions& o, std::uint64_t seed, Trajectory& merged) {
  std::vector<SpeciesId> map;
  for (const auto& n : phase.species_names()) map.push_back(global.id(n));
  Configuration local(phase.species_count());
  for (std::uint32_t i = 0; i < map.size(); ++i) local[SpeciesId{i}] = state[map[i]];
  auto opts = o.engine;
  opts.seed = seed;
  auto traj = simulate(o.method, phase, local, stop, opts);
  for (const auto& s : traj.samples) {
    Configuration g = state;
    for (std::uint32_t i = 0; i < map.size(); ++i) g[map[i]] = s.config[SpeciesId{i}];
    const double t = t0 + s.time;
    if (merged.samples.empty() || t > merged.samples.back().time)
      merged.samples.push_back(Sample{t, std::move(g), 0});
    else
      merged.samples.back().config = std::move(g);
  }
  for (std::uint32_t i = 0; i < map.size(); ++i) state[map[i]] = traj.terminal.config[SpeciesId{i}];
  merged.event_count += traj.event_count;
  merged.leap_count += traj.leap_count;
  return traj;
}

}  // namespace detail

inline CircuitResult run_circuit(const Circuit& circuit, const std::vector<InputAssignment>& inputs,
                                 const CircuitOptions& o = {}) {
  CircuitResult result;
  result.network = detail::circuit_network(circuit, o);
  const auto& net = result.network;
  Configuration state(net.species_count());
  std::map<std::string, const InputAssignment*> given;
  for (const auto& in : inputs) given[in.signal] = &in;
  for (const auto& name : circuit.inputs()) {
    auto it = given.find(name);
    if (it == given.end()) throw InvalidArgument("no value given for input '" + name + "'");
    const auto rc = make_signal(it->second->spec, it->second->error_fraction);
    const auto sig = resolve(net, DualRailSignal::named(name));
    state[sig.rail0] = rc.rail0;
    state[sig.rail1] = rc.rail1;
  }

  auto& merged = result.trajectory;
  double t = 0.0;
  std::uint64_t phase_index = 0;
  auto next_seed = [&] { return mix64(o.engine.seed, phase_index++); };

  if (o.mode == ScheduleMode::sequential) {
    for (const auto& g : circuit.gates()) {
      const auto a = DualRailSignal::named(g.in_a);
      const auto b = DualRailSignal::named(g.in_b);
      const auto y = DualRailSignal::named(g.out);
      const auto ra = resolve(net, a);
      const auto rb = resolve(net, b);
      const Count n_target = std::min(rails_of(state, ra).total(), rails_of(state, rb).total());

      auto gate = gate_network(a, b, y, GateSpec{g.table, o.alpha}, o.gamma).network();
      StopCondition gate_stop{stop::TargetCount{{gate.id(y.rail0), gate.id(y.rail1)}, n_target},
                              stop::MaxEvents{o.max_events_per_phase}};
      auto tr = detail::run_phase(net, state, t, gate, gate_stop, o, next_seed(), merged);
      result.phases.push_back({"gate " + g.name, t, t + tr.terminal.time, tr.event_count,
                               tr.deadlocked()});
      t += tr.terminal.time;

      const double n = static_cast<double>(std::max<Count>(n_target, 2));
      auto amp = amplifier_network(y, o.gamma, o.delta).network();
      StopCondition amp_stop{
          stop::Consensus{amp.id(y.rail0), amp.id(y.rail1)},
          stop::TimeHorizon{o.amp_cap_c * std::log(n) / o.gamma},
          stop::PopulationCap{static_cast<Count>(o.amp_population_factor * n)},
          stop::MaxEvents{o.max_events_per_phase}};
      tr = detail::run_phase(net, state, t, amp, amp_stop, o, next_seed(), merged);
      result.phases.push_back({"amplify " + g.out, t, t + tr.terminal.time, tr.event_count,
                               tr.deadlocked()});
      t += tr.terminal.time;
    }
  } else {
    const double horizon = o.parallel_horizon > 0.0 ? o.parallel_horizon : 4.0 / o.gamma;
    StopCondition stop{stop::TimeHorizon{horizon}, stop::MaxEvents{o.max_events_per_phase}};
    auto tr = detail::run_phase(net, state, 0.0, net, stop, o, next_seed(), merged);
    result.phases.push_back({"parallel", 0.0, tr.terminal.time, tr.event_count, tr.deadlocked()});
    t = tr.terminal.time;
  }

  merged.terminal.time = t;
  merged.terminal.config = state;
  merged.terminal.outcome = Outcome::stopped;
  for (const auto& name : circuit.outputs()) {
    const auto sig = resolve(net, DualRailSignal::named(name));
    const auto r = read_signal(state, sig, o.theta);
    result.readouts[name] = r;
    result.rails[name] = rails_of(state, sig);
    if (r == Readout::undefined) ++result.unresolved;
  }
  return result;
}

/// Truth value each output should have for the given input values.
inline std::map<std::string, int> evaluate_circuit(const Circuit& circuit,
                                                   const std::map<std::string, int>& values) {
  std::map<std::string, int> v = values;
  for (const auto& g : circuit.gates()) v[g.out] = g.table(v.at(g.in_a), v.at(g.in_b));
  std::map<std::string, int> out;
  for (const auto& o : circuit.outputs()) out[o] = v.at(o);
  return out;
}

}  // namespace growthsim
