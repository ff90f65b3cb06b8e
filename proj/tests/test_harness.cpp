// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "growthsim/experiments.hpp"
#include "growthsim/harness.hpp"
#include "oracles.hpp"

using namespace growthsim;
namespace fs = std::filesystem;

namespace {

std::string sample(const std::string& name) { return std::string(GROWTHSIM_SAMPLES) + "/" + name; }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("growthsim_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

struct CliResult {
  int status = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(GROWTHSIM_CLI) + " " + args + " 2>&1";
  CliResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PointStats synthetic(std::uint64_t trials, std::uint64_t wins, std::vector<double> times) {
  PointStats s;
  s.point = {5, 3, 1, 1};
  s.trials = trials;
  s.wins_majority = wins;
  s.wins_minority = trials - wins;
  std::sort(times.begin(), times.end());
  s.consensus_times = times;
  return s;
}

AbEnsembleSpec small_spec(unsigned workers) {
  AbEnsembleSpec spec;
  spec.points = {{5, 3, 1, 1}, {20, 20, 1, 1}, {2, 1, 0.5, 2}};
  spec.trials = 3000;
  spec.master_seed = 99;
  spec.workers = workers;
  spec.chunk = 128;
  return spec;
}

}  // namespace

TEST(RunChunked, IndependentOfWorkerCount) {
  auto work = [](std::uint64_t b, std::uint64_t e) {
    std::uint64_t s = 0;
    for (auto i = b; i < e; ++i) s += mix64(5, i) % 1000;
    return s;
  };
  const auto one = run_chunked<std::uint64_t>(10'000, 1, 97, work);
  const auto many = run_chunked<std::uint64_t>(10'000, 8, 97, work);
  EXPECT_EQ(one, many);
  EXPECT_EQ(one.size(), 104u);
}

TEST(RunChunked, PropagatesErrors) {
  auto work = [](std::uint64_t b, std::uint64_t) -> int {
    if (b == 300) throw InvalidArgument("boom");
    return 0;
  };
  EXPECT_THROW(run_chunked<int>(1000, 4, 100, work), InvalidArgument);
}

TEST(Ensemble, WorkerCountDoesNotChangeStats) {
  const auto a = run_ab_ensemble(small_spec(1));
  const auto b = run_ab_ensemble(small_spec(8));
  EXPECT_EQ(a, b);
  for (const auto& p : a.points) {
    EXPECT_EQ(p.trials, 3000u);
    EXPECT_EQ(p.wins_majority + p.wins_minority + p.mutual + p.no_consensus + p.errors, p.trials);
    EXPECT_TRUE(std::is_sorted(p.consensus_times.begin(), p.consensus_times.end()));
  }
  EXPECT_EQ(a.points[0].bound, reg_inc_beta(0.5, 5, 3));
}

TEST(Ensemble, MatchesJumpChainDp) {
  const auto stats = run_ab_ensemble(small_spec(4));
  for (const auto& p : stats.points) {
    const auto dp = oracle::ab_outcome_dp(p.point.A0, p.point.B0, p.point.gamma, p.point.delta);
    const double n = static_cast<double>(p.trials);
    EXPECT_NEAR(p.p_hat(), dp.a_wins, 4 * binomial_sigma(dp.a_wins, p.trials)) << p.point.A0 << "," << p.point.B0;
    EXPECT_NEAR(p.mutual / n, dp.mutual, 4 * binomial_sigma(dp.mutual, p.trials) + 1e-9);
  }
}

TEST(Ensemble, DpOracleFrozenValues) {
  // Jump-chain values for A0 = B0 = k, gamma = delta = 1.
  EXPECT_NEAR(oracle::ab_outcome_dp(1, 1, 1, 1).a_wins, 0.3182, 1e-4);
  EXPECT_NEAR(oracle::ab_outcome_dp(2, 2, 1, 1).a_wins, 0.3952, 1e-4);
  EXPECT_NEAR(oracle::ab_outcome_dp(3, 3, 1, 1).a_wins, 0.4256, 1e-4);
  const auto fifty = oracle::ab_outcome_dp(50, 50, 1, 1);
  EXPECT_NEAR(fifty.a_wins, 0.47967, 1e-5);
  EXPECT_NEAR(fifty.mutual, 0.04065, 1e-5);
  // Majority failure from (2,1) stays under I_{1/2}(2,1).
  EXPECT_LE(oracle::ab_outcome_dp(2, 1, 1, 1).b_wins, 0.25);
}

TEST(Ensemble, Validation) {
  AbEnsembleSpec spec;
  EXPECT_THROW(run_ab_ensemble(spec), InvalidArgument);
  spec.points = {{1, 1, 1, 1}};
  spec.trials = 0;
  EXPECT_THROW(run_ab_ensemble(spec), InvalidArgument);
}

TEST(PointStatsMerge, AssociativeWithIdentity) {
  const auto a = synthetic(10, 7, {0.5, 1.5, 0.1});
  const auto b = synthetic(5, 1, {2.0, 0.3});
  const auto c = synthetic(8, 8, {0.2, 0.9, 4.0, 1.0});
  auto left = a;
  left.merge(b);
  left.merge(c);
  auto bc = b;
  bc.merge(c);
  auto right = a;
  right.merge(bc);
  EXPECT_EQ(left, right);
  PointStats empty;
  empty.merge(a);
  EXPECT_EQ(empty, a);
  EXPECT_EQ(left.trials, 23u);
  EXPECT_TRUE(std::is_sorted(left.consensus_times.begin(), left.consensus_times.end()));
}

TEST(EnsembleStatsJson, RoundTrips) {
  const auto stats = run_ab_ensemble(small_spec(2));
  const auto back = ensemble_from_json(nlohmann::json::parse(to_json(stats).dump()));
  EXPECT_EQ(back, stats);
}

TEST(EnsembleStatsCsv, HeaderAndRows) {
  EnsembleStats e;
  e.points.push_back(synthetic(10, 7, {1.0}));
  e.points[0].bound = 0.25;
  std::ostringstream out;
  write_ab_csv(out, e);
  const auto text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "n_init,delta,trials,wins_majority,p_hat,ci_lo,ci_hi,bound");
  EXPECT_EQ(text.substr(text.find('\n') + 1, 16), "8,2,10,7,0.7,0.3");
}

TEST(Config, LoadsSampleIni) {
  const auto c = load_config(sample("configs/ab_sweep.ini"), "ab-sweep");
  EXPECT_EQ(c.trials, 100'000u);
  EXPECT_EQ(c.master_seed, 1u);
  EXPECT_EQ(c.workers, 4u);
  const auto pts = parse_ab_points(c, "points", 1, 1);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[2], (AbPoint{550, 450, 1, 1}));
  const auto d = load_config(sample("configs/ab_diff.ini"), "ab-diff");
  EXPECT_EQ(d.numbers("totals"), (std::vector<double>{100, 1000, 10000}));
}

TEST(Config, EveryShippedSampleLoads) {
  const std::pair<const char*, const char*> files[] = {
      {"ab_sweep.ini", "ab-sweep"},         {"ab_diff.ini", "ab-diff"},
      {"ab_time_grid.ini", "ab-time-grid"}, {"nand_sim.ini", "nand-sim"},
      {"circuit_xor.ini", "circuit-run"},   {"couple_check.ini", "couple-check"},
      {"bounds_audit.ini", "bounds-audit"}, {"simulate_ab.ini", "simulate"}};
  for (const auto& [file, kind] : files) EXPECT_NO_THROW(load_config(sample(std::string("configs/") + file), kind)) << file;
}

TEST(Config, Errors) {
  TempDir dir;
  const auto ini = dir.path / "bad.ini";
  std::ofstream(ini) << "[ab-sweep]\nfrobnicate = 3\n";
  EXPECT_THROW(load_config(ini.string(), "ab-sweep"), ConfigError);
  std::ofstream(ini) << "[ab-sweep]\ntrials = -4\n";
  EXPECT_THROW(load_config(ini.string(), "ab-sweep"), ConfigError);
  std::ofstream(ini) << "[ab-sweep\ntrials = 4\n";
  EXPECT_THROW(load_config(ini.string(), "ab-sweep"), ParseError);
  EXPECT_THROW(load_config((dir.path / "none.ini").string(), "ab-sweep"), IoError);
  EXPECT_THROW(default_config("ab-sweeep"), ConfigError);
  auto c = default_config("ab-sweep");
  c.params["points"] = nlohmann::json::array({nlohmann::json::array({1, 2, 3})});
  EXPECT_THROW(parse_ab_points(c, "points", 1, 1), ConfigError);
}

TEST(Config, ValueSyntax) {
  EXPECT_EQ(detail::config_value("3"), 3.0);
  EXPECT_EQ(detail::config_value("true"), true);
  EXPECT_EQ(detail::config_value("exact"), "exact");
  EXPECT_EQ(detail::config_value("1, 2"), nlohmann::json::array({1.0, 2.0}));
  EXPECT_EQ(detail::config_value("60:40"), nlohmann::json::array({nlohmann::json::array({60.0, 40.0})}));
}

TEST(Config, ManifestRoundTrip) {
  TempDir dir;
  auto c = default_config("ab-diff");
  c.trials = 77;
  c.master_seed = 5;
  c.params["totals"] = nlohmann::json::array({50, 500});
  RunManifest m;
  m.command = c.kind;
  m.config = c.to_json();
  ReportWriter w(dir.path, m);
  w.write("x.txt", [](std::ostream& out) { out << "123456789"; });
  const auto path = w.finish();
  const auto j = nlohmann::json::parse(slurp(path));
  EXPECT_EQ(j["checksums"]["x.txt"], "cbf43926");
  EXPECT_EQ(j["version"], GROWTHSIM_VERSION);
  const auto back = load_config(path.string(), "ab-diff");
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_THROW(load_config(path.string(), "ab-sweep"), ConfigError);
}

TEST(Grids, AbDiffGaps) {
  const auto g = ab_diff_gaps(100, 21, 8.0, 4.0);
  EXPECT_EQ(g.front(), 0u);
  EXPECT_EQ(g.back(), 100u);
  for (auto v : g) EXPECT_EQ(v % 2, 0u);
  const auto t = static_cast<std::uint64_t>(std::ceil(4 * std::sqrt(100 * std::log(100.0))));
  EXPECT_NE(std::find(g.begin(), g.end(), t + t % 2), g.end());
  const auto odd = ab_diff_gaps(1001, 5, 8.0, 0.0);
  for (auto v : odd) EXPECT_EQ(v % 2, 1u);
  EXPECT_THROW(ab_diff_gaps(1, 5, 8, 4), ConfigError);
}

TEST(Grids, LogGrid) {
  const auto g = log_grid(0.01, 10, 4);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_NEAR(g[0], 0.01, 1e-15);
  EXPECT_NEAR(g[1], 0.1, 1e-15);
  EXPECT_NEAR(g[3], 10, 1e-12);
  EXPECT_THROW(log_grid(0, 1, 3), ConfigError);
}

TEST(Cli, BetaPrintsExactValue) {
  const auto r = run_cli("beta --z 0.75 -a 6 -b 2");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("\"exact\":\"7290/4^7\""), std::string::npos) << r.out;
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("").status, 2);
  EXPECT_EQ(run_cli("no-such-command").status, 2);
  EXPECT_EQ(run_cli("ab-sweep --trials 0").status, 2);
  EXPECT_EQ(run_cli("ab-sweep --set frobnicate=1").status, 2);
  EXPECT_EQ(run_cli("ab-sweep --config /nonexistent/x.ini").status, 1);
  EXPECT_EQ(run_cli("beta --z 0.5 -a 0 -b 1").status, 2);
  EXPECT_EQ(run_cli("--version").status, 0);
}

TEST(Cli, SweepWritesReportAndRerunsFromManifest) {
  TempDir dir;
  const auto first = dir.path / "first", second = dir.path / "second";
  auto r = run_cli("ab-sweep --trials 200 --seed 3 --workers 3 --set points=5:3,9:1 --out " + first.string());
  ASSERT_EQ(r.status, 0) << r.out;
  for (const char* f : {"ab_sweep.csv", "ab_sweep.json", "manifest.json"}) EXPECT_TRUE(fs::exists(first / f)) << f;
  r = run_cli("ab-sweep --config " + (first / "manifest.json").string() + " --workers 1 --out " + second.string());
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(slurp(first / "ab_sweep.csv"), slurp(second / "ab_sweep.csv"));
  const auto m1 = nlohmann::json::parse(slurp(first / "manifest.json"));
  const auto m2 = nlohmann::json::parse(slurp(second / "manifest.json"));
  EXPECT_EQ(m1["checksums"]["ab_sweep.csv"], m2["checksums"]["ab_sweep.csv"]);
}

TEST(Cli, CoupleCheckAndSimulate) {
  TempDir dir;
  auto r = run_cli("couple-check --trials 20 --set points=3:2,6:6 --set ks_samples=200 --out " +
                   (dir.path / "cc").string());
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("violations: 0"), std::string::npos);
  r = run_cli("simulate --network " + sample("networks/ab.crn") + " --set t_end=1 --out " + (dir.path / "sim").string());
  EXPECT_EQ(r.status, 0) << r.out;
  const auto csv = slurp(dir.path / "sim" / "trajectory.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "time,A,B");
  r = run_cli("circuit-run --circuit " + sample("circuits/xor.circuit") +
              " --inputs A=1,B=1 --trials 3 --set n=500 --set gap=400 --out " + (dir.path / "xor").string());
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir.path / "xor" / "circuit_run.json"));
  r = run_cli("simulate --network " + sample("networks/missing.crn") + " --out " + (dir.path / "s2").string());
  EXPECT_EQ(r.status, 1);
}
