// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo ensembles with index-based seeding, order-independent
// aggregation, report emission and run manifests.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/crc.hpp>

#include "json.hpp"

#include "growthsim/bounds.hpp"
#include "growthsim/engine.hpp"
#include "growthsim/protocols.hpp"
#include "growthsim/rng.hpp"
#include "growthsim/stats.hpp"

#ifndef GROWTHSIM_VERSION
#define GROWTHSIM_VERSION "0.1.0"
#endif

namespace growthsim {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Parallel execution

/// Runs work(begin, end) over [0, count) in chunks on `workers` threads and
/// returns the per-chunk results in chunk order. Chunk boundaries depend only
/// on `count` and `chunk`, never on the number of workers.
template <class Partial>
std::vector<Partial> run_chunked(std::uint64_t count, unsigned workers, std::uint64_t chunk,
                                 const std::function<Partial(std::uint64_t, std::uint64_t)>& work) {
  if (chunk == 0) chunk = 1;
  const std::uint64_t chunks = (count + chunk - 1) / chunk;
  std::vector<Partial> out(chunks);
  std::atomic<std::uint64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        out[c] = work(c * chunk, std::min(count, (c + 1) * chunk));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  workers = std::max(1u, workers);
  if (workers == 1 || chunks <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::uint64_t>(workers, chunks); ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

// ---------------------------------------------------------------------------
// Statistics of one grid point

struct AbPoint {
  std::uint64_t A0 = 0;
  std::uint64_t B0 = 0;
  double gamma = 1.0;
  double delta = 1.0;

  friend bool operator==(const AbPoint&, const AbPoint&) = default;
};

struct PointStats {
  AbPoint point;
  std::uint64_t trials = 0;
  std::uint64_t wins_majority = 0;  // B extinct, A alive (A is the A0 >= B0 side)
  std::uint64_t wins_minority = 0;  // A extinct, B alive
  std::uint64_t mutual = 0;         // both extinct
  std::uint64_t no_consensus = 0;   // stop cap reached first
  std::uint64_t errors = 0;         // trials that threw
  std::vector<double> consensus_times;  // sorted
  double bound = 0.0;

  void merge(const PointStats& o) {
    if (trials == 0 && consensus_times.empty()) {
      point = o.point;
      bound = o.bound;
    }
    trials += o.trials;
    wins_majority += o.wins_majority;
    wins_minority += o.wins_minority;
    mutual += o.mutual;
    no_consensus += o.no_consensus;
    errors += o.errors;
    std::vector<double> merged;
    merged.reserve(consensus_times.size() + o.consensus_times.size());
    std::merge(consensus_times.begin(), consensus_times.end(), o.consensus_times.begin(),
               o.consensus_times.end(), std::back_inserter(merged));
    consensus_times = std::move(merged);
  }

  double p_hat() const {
    return trials ? static_cast<double>(wins_majority) / static_cast<double>(trials) : 0.0;
  }
  double p_minority() const {
    return trials ? static_cast<double>(wins_minority) / static_cast<double>(trials) : 0.0;
  }
  Interval wilson() const { return wilson_interval(wins_majority, trials); }
  Moments time_moments() const { return moments(consensus_times); }
  double time_quantile(double q) const { return quantile_sorted(consensus_times, q); }

  friend bool operator==(const PointStats&, const PointStats&) = default;
};

struct EnsembleStats {
  std::vector<PointStats> points;

  friend bool operator==(const EnsembleStats&, const EnsembleStats&) = default;
};

/// Combines two ensembles over the same grid.
inline EnsembleStats merge(EnsembleStats a, const EnsembleStats& b) {
  if (a.points.empty()) return b;
  if (b.points.empty()) return a;
  if (a.points.size() != b.points.size()) throw InvalidArgument("cannot merge stats over different grids");
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (!(a.points[i].point == b.points[i].point)) throw InvalidArgument("cannot merge stats over different grids");
    a.points[i].merge(b.points[i]);
  }
  return a;
}

inline json to_json(const PointStats& s) {
  const auto m = s.time_moments();
  const auto ci = s.wilson();
  json j = {{"A0", s.point.A0},
            {"B0", s.point.B0},
            {"gamma", s.point.gamma},
            {"delta", s.point.delta},
            {"trials", s.trials},
            {"wins_majority", s.wins_majority},
            {"wins_minority", s.wins_minority},
            {"mutual", s.mutual},
            {"no_consensus", s.no_consensus},
            {"errors", s.errors},
            {"p_hat", s.p_hat()},
            {"ci_lo", ci.lo},
            {"ci_hi", ci.hi},
            {"bound", s.bound},
            {"time_mean", m.n ? json(m.mean) : json(nullptr)},
            {"time_variance", m.n > 1 ? json(m.variance) : json(nullptr)},
            {"time_quantiles", json::object()},
            {"consensus_times", s.consensus_times}};
  if (m.n) {
    for (double q : {0.1, 0.5, 0.9})
      j["time_quantiles"][std::to_string(q).substr(0, 3)] = s.time_quantile(q);
  }
  return j;
}

inline PointStats point_stats_from_json(const json& j) {
  PointStats s;
  s.point = {j.at("A0").get<std::uint64_t>(), j.at("B0").get<std::uint64_t>(),
             j.at("gamma").get<double>(), j.at("delta").get<double>()};
  s.trials = j.at("trials").get<std::uint64_t>();
  s.wins_majority = j.at("wins_majority").get<std::uint64_t>();
  s.wins_minority = j.at("wins_minority").get<std::uint64_t>();
  s.mutual = j.at("mutual").get<std::uint64_t>();
  s.no_consensus = j.at("no_consensus").get<std::uint64_t>();
  s.errors = j.value("errors", std::uint64_t{0});
  s.bound = j.at("bound").get<double>();
  s.consensus_times = j.at("consensus_times").get<std::vector<double>>();
  return s;
}

inline json to_json(const EnsembleStats& e) {
  json pts = json::array();
  for (const auto& p : e.points) pts.push_back(to_json(p));
  return {{"points", pts}};
}

inline EnsembleStats ensemble_from_json(const json& j) {
  EnsembleStats e;
  for (const auto& p : j.at("points")) e.points.push_back(point_stats_from_json(p));
  return e;
}

// ---------------------------------------------------------------------------
// A-B ensembles

struct AbEnsembleSpec {
  std::vector<AbPoint> points;
  std::uint64_t trials = 1000;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  std::uint64_t max_events = 100'000'000;
  Method method = Method::exact;
  std::uint64_t chunk = 512;
};

/// One A-B trajectory to consensus (or the event cap), classified.
inline void run_ab_trial(const Network& net, const AbPoint& p, std::uint64_t seed,
                         std::uint64_t max_events, Method method, PointStats& into) {
  const auto a = SpeciesId{0}, b = SpeciesId{1};
  Configuration init(2);
  init[a] = p.A0;
  init[b] = p.B0;
  SimulationOptions opts;
  opts.seed = seed;
  opts.sampling = Sampling::stop_only();
  StopCondition stop{stop::Consensus{a, b}, stop::MaxEvents{max_events}};
  ++into.trials;
  try {
    const auto traj = simulate(method, net, init, stop, opts);
    const auto& c = traj.terminal.config;
    const bool a_alive = c[a] > 0, b_alive = c[b] > 0;
    if (a_alive && b_alive) {
      ++into.no_consensus;
      return;
    }
    // Label by the initial majority; A wins ties of the initial counts.
    const bool a_is_majority = p.A0 >= p.B0;
    if (!a_alive && !b_alive)
      ++into.mutual;
    else if (a_alive == a_is_majority)
      ++into.wins_majority;
    else
      ++into.wins_minority;
    into.consensus_times.push_back(traj.terminal.time);
  } catch (const Error&) {
    ++into.errors;
  }
}

/// Trial i of point k uses seed mix64(master_seed, k * trials + i).
inline EnsembleStats run_ab_ensemble(const AbEnsembleSpec& spec) {
  if (spec.trials < 1) throw InvalidArgument("trials must be at least 1");
  if (spec.points.empty()) throw InvalidArgument("ensemble grid is empty");
  EnsembleStats out;
  std::uint64_t offset = 0;
  for (const auto& p : spec.points) {
    const auto net = ab_network(p.gamma, p.delta).network();
    auto partials = run_chunked<PointStats>(
        spec.trials, spec.workers, spec.chunk, [&](std::uint64_t begin, std::uint64_t end) {
          PointStats s;
          s.point = p;
          for (std::uint64_t i = begin; i < end; ++i)
            run_ab_trial(net, p, mix64(spec.master_seed, offset + i), spec.max_events, spec.method, s);
          std::sort(s.consensus_times.begin(), s.consensus_times.end());
          return s;
        });
    PointStats total;
    total.point = p;
    for (const auto& part : partials) total.merge(part);
    total.point = p;
    const auto hi = std::max(p.A0, p.B0), lo = std::min(p.A0, p.B0);
    total.bound = lo >= 1 ? majority_failure_bound(hi, lo) : 0.0;
    out.points.push_back(std::move(total));
    offset += spec.trials;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports and manifests

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// ab-sweep CSV: n_init,delta,trials,wins_majority,p_hat,ci_lo,ci_hi,bound
/// where n_init = A0 + B0 and delta = |A0 - B0| is the initial gap.
inline void write_ab_csv(std::ostream& out, const EnsembleStats& stats) {
  out << "n_init,delta,trials,wins_majority,p_hat,ci_lo,ci_hi,bound\n";
  for (const auto& s : stats.points) {
    const auto ci = s.wilson();
    const auto hi = std::max(s.point.A0, s.point.B0), lo = std::min(s.point.A0, s.point.B0);
    out << s.point.A0 + s.point.B0 << ',' << hi - lo << ',' << s.trials << ',' << s.wins_majority << ','
        << format_number(s.p_hat()) << ',' << format_number(ci.lo) << ',' << format_number(ci.hi) << ','
        << format_number(s.bound) << '\n';
  }
}

inline std::uint32_t crc32_of_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "' for checksum");
  boost::crc_32_type crc;
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    crc.process_bytes(buf, static_cast<std::size_t>(in.gcount()));
  }
  return crc.checksum();
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

struct RunManifest {
  std::string command_line;
  std::string command;
  json config = json::object();
  std::uint64_t master_seed = 0;
  std::string version = GROWTHSIM_VERSION;
  std::string timestamp;
  std::map<std::string, std::string> checksums;  // file name -> crc32 hex

  json to_json() const {
    return {{"command_line", command_line},
            {"command", command},
            {"config", config},
            {"master_seed", master_seed},
            {"version", version},
            {"timestamp", timestamp},
            {"checksums", checksums}};
  }

  static RunManifest from_json(const json& j) {
    RunManifest m;
    m.command_line = j.value("command_line", "");
    m.command = j.value("command", "");
    m.config = j.value("config", json::object());
    m.master_seed = j.value("master_seed", std::uint64_t{0});
    m.version = j.value("version", "");
    m.timestamp = j.value("timestamp", "");
    m.checksums = j.value("checksums", std::map<std::string, std::string>{});
    return m;
  }
};

/// Collects emitted files under one directory and writes manifest.json last.
class ReportWriter {
 public:
  ReportWriter(std::filesystem::path dir, RunManifest manifest)
      : dir_(std::move(dir)), manifest_(std::move(manifest)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  /// Writes a file through `fill` and records its checksum.
  void write(const std::string& name, const std::function<void(std::ostream&)>& fill) {
    const auto path = dir_ / name;
    {
      std::ofstream out(path, std::ios::binary);
      if (!out) throw IoError("cannot write '" + path.string() + "'");
      fill(out);
      if (!out) throw IoError("write failed for '" + path.string() + "'");
    }
    char hex[9];
    std::snprintf(hex, sizeof hex, "%08x", crc32_of_file(path));
    manifest_.checksums[name] = hex;
  }

  void write_json(const std::string& name, const json& j) {
    write(name, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  }

  std::filesystem::path finish() {
    manifest_.timestamp = utc_timestamp();
    const auto path = dir_ / "manifest.json";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << manifest_.to_json().dump(2) << '\n';
    return path;
  }

  const std::filesystem::path& dir() const { return dir_; }
  RunManifest& manifest() { return manifest_; }

 private:
  std::filesystem::path dir_;
  RunManifest manifest_;
};

/// Stats as CSV + JSON, plus the manifest.
inline void emit_report(ReportWriter& writer, const std::string& stem, const EnsembleStats& stats) {
  writer.write(stem + ".csv", [&](std::ostream& out) { write_ab_csv(out, stats); });
  writer.write_json(stem + ".json", to_json(stats));
}

}  // namespace growthsim
