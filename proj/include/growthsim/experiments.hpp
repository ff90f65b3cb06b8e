// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration and the figure-level runs built on the harness.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"

#include "growthsim/harness.hpp"
#include "growthsim/protocols.hpp"
#include "growthsim/reaction_file.hpp"

namespace growthsim {

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// ---------------------------------------------------------------------------
// Configuration

/// Experiment kind, common run settings and a flat table of typed parameters.
/// Parameters not given in a config file keep the kind's defaults, so the
/// resolved table written to the manifest is always complete.
struct ExperimentConfig {
  std::string kind;
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  std::string out_dir = "out";
  json params = json::object();

  bool has(const std::string& key) const { return params.contains(key); }

  double number(const std::string& key) const {
    const auto& v = at(key);
    if (v.is_number()) return v.get<double>();
    throw ConfigError("parameter '" + key + "' must be a number");
  }
  std::uint64_t integer(const std::string& key) const {
    const double d = number(key);
    if (!(d >= 0.0) || d != std::floor(d) || d > 1.8e19)
      throw ConfigError("parameter '" + key + "' must be a non-negative integer");
    return static_cast<std::uint64_t>(d);
  }
  std::string text(const std::string& key) const {
    const auto& v = at(key);
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  }
  std::vector<double> numbers(const std::string& key) const {
    const auto& v = at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError("parameter '" + key + "' must be a list of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError("parameter '" + key + "' must be a list of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  bool flag(const std::string& key) const {
    const auto& v = at(key);
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number()) return v.get<double>() != 0.0;
    throw ConfigError("parameter '" + key + "' must be true or false");
  }

  json to_json() const {
    return {{"kind", kind},
            {"trials", trials},
            {"master_seed", master_seed},
            {"workers", workers},
            {"out_dir", out_dir},
            {"params", params}};
  }

  void validate() const {
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (workers < 1) throw ConfigError("workers must be at least 1");
  }

 private:
  const json& at(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) throw ConfigError("missing parameter '" + key + "'");
    return *it;
  }
};

namespace detail {

/// Scalar text from a config file: number, boolean, or string.
inline json config_scalar(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "no" || s == "off") return false;
  double d = 0.0;
  if (parse_number(s, d)) return d;
  return std::string(s);
}

/// "1, 2, 3" becomes a list; "60:40, 550:450" becomes a list of pairs.
inline json config_value(std::string_view s) {
  s = trim(s);
  if (s.find(',') == std::string_view::npos && s.find(':') == std::string_view::npos)
    return config_scalar(s);
  json list = json::array();
  for (auto item : split(s, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item.find(':') != std::string_view::npos) {
      json pair = json::array();
      for (auto part : split(item, ':')) pair.push_back(config_scalar(part));
      list.push_back(pair);
    } else {
      list.push_back(config_scalar(item));
    }
  }
  return list;
}

}  // namespace detail

/// Default parameters per experiment kind.
inline ExperimentConfig default_config(const std::string& kind) {
  ExperimentConfig c;
  c.kind = kind;
  auto& p = c.params;
  if (kind == "ab-sweep") {
    c.trials = 10'000;
    p = {{"points", json::array({json::array({2, 1}), json::array({60, 40}), json::array({550, 450})})},
         {"gamma", 1.0},
         {"delta", 1.0},
         {"max_events", 1e8},
         {"method", "exact"}};
  } else if (kind == "ab-diff") {
    c.trials = 10'000;
    p = {{"totals", json::array({100, 1000, 10000})},
         {"points", 21},
         {"span_factor", 8.0},
         {"threshold_factor", 4.0},
         {"gamma", 1.0},
         {"delta", 1.0},
         {"max_events", 1e8}};
  } else if (kind == "ab-time-grid") {
    c.trials = 20;
    p = {{"grid_size", 12},
         {"rate_min", 0.01},
         {"rate_max", 10.0},
         {"rate_grid_count", 100},
         {"count_min", 10},
         {"count_max", 1000},
         {"count_grid_gamma", 0.01},
         {"count_grid_delta", 1.0},
         {"max_events", 1e6}};
  } else if (kind == "nand-sim") {
    c.trials = 30;
    p = {{"population", 5e8},
         {"capacity", 1e9},
         {"gamma", 0.016},
         {"delta", 1e-11},
         {"error", 0.1},
         {"t_end", 30.0},
         {"series_points", 61},
         {"tau_epsilon", 0.03}};
  } else if (kind == "circuit-run") {
    c.trials = 1;
    p = {{"circuit", ""},
         {"inputs", ""},
         {"n", 10000},
         {"gap", 7000},
         {"error", -1.0},
         {"mode", "sequential"},
         {"gamma", 1.0},
         {"delta", 1.0},
         {"alpha", 1.0},
         {"theta", 0.75},
         {"method", "exact"},
         {"horizon", 0.0}};
  } else if (kind == "couple-check") {
    c.trials = 1000;
    p = {{"points", json::array({json::array({2, 1}), json::array({5, 3}), json::array({10, 10}),
                                 json::array({30, 20}), json::array({60, 40})})},
         {"gamma", 1.0},
         {"delta", 1.0},
         {"max_steps", 1e7},
         {"ks_samples", 2000}};
  } else if (kind == "bounds-audit") {
    c.trials = 10'000;
    p = {{"urn_n_max", 1e6}};
  } else if (kind == "simulate") {
    c.trials = 1;
    p = {{"network", ""}, {"t_end", 10.0}, {"max_events", 1e8}, {"method", "exact"}, {"samples", 512}};
  } else {
    throw ConfigError("unknown experiment kind '" + kind + "'");
  }
  return c;
}

/// Overlays a key-value section onto `c`. Keys trials, seed, workers and out
/// are the common run settings; the rest must be known parameters.
inline void apply_settings(ExperimentConfig& c, const std::map<std::string, json>& kv,
                           const std::string& source) {
  for (const auto& [key, value] : kv) {
    auto need_int = [&](const json& v) {
      if (!v.is_number() || v.get<double>() < 0 || v.get<double>() != std::floor(v.get<double>()))
        throw ConfigError(source + ": '" + key + "' must be a non-negative integer");
      return static_cast<std::uint64_t>(v.get<double>());
    };
    if (key == "trials") {
      c.trials = need_int(value);
    } else if (key == "seed" || key == "master_seed") {
      c.master_seed = need_int(value);
    } else if (key == "workers") {
      c.workers = static_cast<unsigned>(need_int(value));
    } else if (key == "out" || key == "out_dir") {
      c.out_dir = value.is_string() ? value.get<std::string>() : value.dump();
    } else if (c.params.contains(key)) {
      // A one-element list written without separators arrives as a scalar.
      if (c.params[key].is_array() && !value.is_array()) {
        c.params[key] = json::array({value});
      } else if (c.params[key].is_string() && !value.is_string()) {
        c.params[key] = value.dump();
      } else {
        c.params[key] = value;
      }
    } else {
      throw ConfigError(source + ": unknown key '" + key + "' for " + c.kind);
    }
  }
}

/// Reads the section named after `kind` (plus top-level keys) from an INI
/// file, or the resolved config from a run manifest (*.json).
inline ExperimentConfig load_config(const std::string& path, const std::string& kind) {
  auto c = default_config(kind);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError(path + ": " + e.what());
    }
    const json& cfg = j.contains("config") ? j.at("config") : j;
    if (cfg.value("kind", kind) != kind)
      throw ConfigError(path + ": manifest is for '" + cfg.value("kind", "") + "', not '" + kind + "'");
    std::map<std::string, json> kv;
    for (const char* k : {"trials", "master_seed", "workers", "out_dir"})
      if (cfg.contains(k)) kv[k] = cfg.at(k);
    if (cfg.contains("params"))
      for (const auto& [k, v] : cfg.at("params").items()) kv[k] = v;
    apply_settings(c, kv, path);
    return c;
  }

  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    if (e.line() == 0) throw IoError("cannot open config '" + path + "'");
    throw ParseError(path, e.line(), e.message());
  }
  std::map<std::string, json> kv;
  for (const auto& [key, node] : tree)
    if (node.empty()) kv[key] = detail::config_value(node.data());
  if (auto section = tree.get_child_optional(kind))
    for (const auto& [key, node] : *section) kv[key] = detail::config_value(node.data());
  apply_settings(c, kv, path);
  return c;
}

inline Method parse_method(const std::string& s) {
  if (s == "exact" || s == "ssa") return Method::exact;
  if (s == "tau" || s == "tau-leap" || s == "tau_leap") return Method::tau_leap;
  throw ConfigError("unknown method '" + s + "' (exact or tau-leap)");
}

inline std::vector<AbPoint> parse_ab_points(const ExperimentConfig& c, const std::string& key,
                                            double gamma, double delta) {
  std::vector<AbPoint> out;
  const json v = c.params.at(key);
  if (!v.is_array()) throw ConfigError("'" + key + "' must be a list of A0:B0 pairs");
  for (const auto& e : v) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw ConfigError("'" + key + "' entries must look like A0:B0");
    const double a = e[0].get<double>(), b = e[1].get<double>();
    if (a < 0 || b < 0 || a != std::floor(a) || b != std::floor(b))
      throw ConfigError("'" + key + "' counts must be non-negative integers");
    out.push_back({static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b), gamma, delta});
  }
  if (out.empty()) throw ConfigError("'" + key + "' grid is empty");
  return out;
}

// ---------------------------------------------------------------------------
// ab-diff: success probability against the initial gap at fixed totals

/// Gaps 0..min(n, span_factor sqrt(n ln n)) in `points` even steps, rounded
/// to the parity of n, plus the gap threshold_factor sqrt(n ln n).
inline std::vector<std::uint64_t> ab_diff_gaps(std::uint64_t n, std::uint64_t points,
                                               double span_factor, double threshold_factor) {
  if (n < 2) throw ConfigError("ab-diff totals must be at least 2");
  if (points < 2) throw ConfigError("ab-diff needs at least 2 points");
  const double nd = static_cast<double>(n);
  const double scale = std::sqrt(nd * std::log(nd));
  const double hi = std::min(nd, span_factor * scale);
  auto to_parity = [&](double g) {
    auto v = static_cast<std::uint64_t>(std::llround(g));
    if ((v % 2) != (n % 2)) v = v + 1 <= n ? v + 1 : v - 1;
    return std::min(v, n);
  };
  std::vector<std::uint64_t> gaps;
  for (std::uint64_t k = 0; k < points; ++k)
    gaps.push_back(to_parity(hi * static_cast<double>(k) / static_cast<double>(points - 1)));
  if (threshold_factor > 0.0) {
    auto t = static_cast<std::uint64_t>(std::ceil(threshold_factor * scale));
    if (t % 2 != n % 2) ++t;
    if (t <= n) gaps.push_back(t);
  }
  std::sort(gaps.begin(), gaps.end());
  gaps.erase(std::unique(gaps.begin(), gaps.end()), gaps.end());
  return gaps;
}

inline std::vector<AbPoint> ab_diff_points(const ExperimentConfig& c) {
  const double gamma = c.number("gamma"), delta = c.number("delta");
  std::vector<AbPoint> pts;
  for (double nd : c.numbers("totals")) {
    if (nd < 2 || nd != std::floor(nd)) throw ConfigError("ab-diff totals must be integers >= 2");
    const auto n = static_cast<std::uint64_t>(nd);
    for (auto g : ab_diff_gaps(n, c.integer("points"), c.number("span_factor"), c.number("threshold_factor")))
      pts.push_back({(n + g) / 2, (n - g) / 2, gamma, delta});
  }
  return pts;
}

// ---------------------------------------------------------------------------
// ab-time-grid: mean consensus time over two log-spaced grids

inline std::vector<double> log_grid(double lo, double hi, std::uint64_t count) {
  if (!(lo > 0.0 && hi >= lo) || count < 1) throw ConfigError("log grid needs 0 < lo <= hi and count >= 1");
  std::vector<double> out;
  for (std::uint64_t i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(std::pow(10.0, std::log10(lo) + f * (std::log10(hi) - std::log10(lo))));
  }
  return out;
}

struct TimeGrid {
  EnsembleStats rates;   // gamma x delta at A0 = B0 = rate_grid_count
  EnsembleStats counts;  // A0 x B0 at fixed rates
};

inline std::vector<AbPoint> time_grid_rate_points(const ExperimentConfig& c) {
  const auto size = c.integer("grid_size");
  const auto axis = log_grid(c.number("rate_min"), c.number("rate_max"), size);
  const auto n = c.integer("rate_grid_count");
  std::vector<AbPoint> pts;
  for (double g : axis)
    for (double d : axis) pts.push_back({n, n, g, d});
  return pts;
}

inline std::vector<AbPoint> time_grid_count_points(const ExperimentConfig& c) {
  const auto axis = log_grid(c.number("count_min"), c.number("count_max"), c.integer("grid_size"));
  std::vector<AbPoint> pts;
  for (double a : axis)
    for (double b : axis)
      pts.push_back({static_cast<std::uint64_t>(std::llround(a)), static_cast<std::uint64_t>(std::llround(b)),
                     c.number("count_grid_gamma"), c.number("count_grid_delta")});
  return pts;
}

/// grid,gamma,delta,A0,B0,trials,consensus,no_consensus,mean_time,log10_mean_time
inline void write_time_grid_csv(std::ostream& out, const TimeGrid& g) {
  out << "grid,gamma,delta,A0,B0,trials,consensus,no_consensus,mean_time,log10_mean_time\n";
  auto rows = [&](const char* name, const EnsembleStats& e) {
    for (const auto& s : e.points) {
      const auto m = s.time_moments();
      out << name << ',' << format_number(s.point.gamma) << ',' << format_number(s.point.delta) << ','
          << s.point.A0 << ',' << s.point.B0 << ',' << s.trials << ',' << s.consensus_times.size() << ','
          << s.no_consensus << ',';
      if (m.n)
        out << format_number(m.mean) << ',' << format_number(std::log10(m.mean));
      else
        out << ',';
      out << '\n';
    }
  };
  rows("rates", g.rates);
  rows("counts", g.counts);
}

// ---------------------------------------------------------------------------
// nand-sim: the bacterial gate with amplifiers under logistic growth

struct NandSimOptions {
  double population = 5e8;  // both inputs together
  Count capacity = 1'000'000'000;
  double gamma = 0.016;     // per minute
  double delta = 1e-11;     // conjugation and amplifier rate
  double error = 0.1;
  double t_end = 30.0;      // minutes
  std::uint64_t samples = 30;
  std::uint64_t series_points = 61;
  double tau_epsilon = 0.03;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
};

inline NandSimOptions nand_options(const ExperimentConfig& c) {
  NandSimOptions o;
  o.population = c.number("population");
  o.capacity = static_cast<Count>(c.number("capacity"));
  o.gamma = c.number("gamma");
  o.delta = c.number("delta");
  o.error = c.number("error");
  o.t_end = c.number("t_end");
  o.samples = c.trials;
  o.series_points = c.integer("series_points");
  o.tau_epsilon = c.number("tau_epsilon");
  o.master_seed = c.master_seed;
  o.workers = c.workers;
  return o;
}

struct NandRun {
  int a = 0, b = 0, expected = 0;
  std::uint64_t sample = 0;
  RailCounts output;
  bool correct_dominates = false;
  Trajectory trajectory;
};

struct NandCombo {
  int a = 0, b = 0, expected = 0;
  std::vector<NandRun> runs;

  std::uint64_t correct() const {
    return static_cast<std::uint64_t>(
        std::count_if(runs.begin(), runs.end(), [](const NandRun& r) { return r.correct_dominates; }));
  }
};

struct NandSimResult {
  Network network;
  std::vector<NandCombo> combos;
};

/// Gate, plus X0 + X1 -> 0 amplifiers on A, B and Y, all species duplicating.
/// The conjugation scheme computes NOR of its inputs.
inline Network nand_sim_network(double gamma, double delta) {
  const auto A = DualRailSignal::named("A"), B = DualRailSignal::named("B"), Y = DualRailSignal::named("Y");
  return compose({biological_gate_network(A, B, Y, delta, gamma).network(),
                  amplifier_network(A, gamma, delta).network(), amplifier_network(B, gamma, delta).network(),
                  amplifier_network(Y, gamma, delta).network()});
}

inline NandSimResult nand_sim(const NandSimOptions& o) {
  if (!(o.error >= 0.0 && o.error < 0.5)) throw ConfigError("nand-sim error must lie in [0, 0.5)");
  if (!(o.population >= 2.0)) throw ConfigError("nand-sim population must be at least 2");
  if (!(o.t_end > 0.0)) throw ConfigError("nand-sim t_end must be positive");
  if (o.samples < 1) throw ConfigError("nand-sim needs at least one sample");
  if (o.series_points < 2) throw ConfigError("nand-sim needs at least 2 series points");
  NandSimResult result;
  result.network = nand_sim_network(o.gamma, o.delta);
  const auto& net = result.network;
  const auto A = resolve(net, DualRailSignal::named("A"));
  const auto B = resolve(net, DualRailSignal::named("B"));
  const auto Y = resolve(net, DualRailSignal::named("Y"));
  const auto per_input = static_cast<Count>(std::llround(o.population / 2.0));
  const auto wrong = static_cast<Count>(std::llround(o.error * static_cast<double>(per_input)));
  const TruthTable nor = TruthTable::nor();

  SimulationOptions base;
  base.growth = LogisticGrowth{o.capacity, {}};
  base.tau_epsilon = o.tau_epsilon;
  base.sampling = Sampling::interval(o.t_end / static_cast<double>(o.series_points - 1));
  const StopCondition stop{stop::TimeHorizon{o.t_end}};

  std::uint64_t combo_index = 0;
  for (int a = 0; a <= 1; ++a) {
    for (int b = 0; b <= 1; ++b, ++combo_index) {
      NandCombo combo{a, b, nor(a, b), {}};
      Configuration init(net.species_count());
      init[A.rail(a)] = per_input - wrong;
      init[A.rail(1 - a)] = wrong;
      init[B.rail(b)] = per_input - wrong;
      init[B.rail(1 - b)] = wrong;
      auto parts = run_chunked<std::vector<NandRun>>(
          o.samples, o.workers, 1, [&](std::uint64_t begin, std::uint64_t end) {
            std::vector<NandRun> runs;
            for (std::uint64_t i = begin; i < end; ++i) {
              auto opts = base;
              opts.seed = mix64(o.master_seed, combo_index * o.samples + i);
              NandRun r{a, b, combo.expected, i, {}, false, simulate_tau_leap(net, init, stop, opts)};
              r.output = rails_of(r.trajectory.terminal.config, Y);
              r.correct_dominates = r.output.rail(combo.expected) > r.output.rail(1 - combo.expected);
              runs.push_back(std::move(r));
            }
            return runs;
          });
      for (auto& p : parts)
        for (auto& r : p) combo.runs.push_back(std::move(r));
      result.combos.push_back(std::move(combo));
    }
  }
  return result;
}

/// time,<species...>: sample-wise mean over the runs of one combo.
inline void write_nand_series_csv(std::ostream& out, const Network& net, const NandCombo& combo) {
  out << "time";
  for (const auto& n : net.species_names()) out << ',' << n;
  out << '\n';
  if (combo.runs.empty()) return;
  const auto rows = combo.runs.front().trajectory.samples.size();
  for (std::size_t k = 0; k < rows; ++k) {
    out << format_number(combo.runs.front().trajectory.samples[k].time);
    for (std::uint32_t s = 0; s < net.species_count(); ++s) {
      long double sum = 0.0L;
      std::size_t used = 0;
      for (const auto& r : combo.runs) {
        if (k >= r.trajectory.samples.size()) continue;
        sum += static_cast<long double>(r.trajectory.samples[k].config[SpeciesId{s}]);
        ++used;
      }
      out << ',' << format_number(used ? static_cast<double>(sum / used) : 0.0);
    }
    out << '\n';
  }
}

/// a,b,expected,sample,Y0,Y1,correct
inline void write_nand_runs_csv(std::ostream& out, const NandSimResult& r) {
  out << "a,b,expected,sample,Y0,Y1,correct\n";
  for (const auto& c : r.combos)
    for (const auto& run : c.runs)
      out << c.a << ',' << c.b << ',' << c.expected << ',' << run.sample << ',' << run.output.rail0 << ','
          << run.output.rail1 << ',' << (run.correct_dominates ? 1 : 0) << '\n';
}

}  // namespace growthsim
