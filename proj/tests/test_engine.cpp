// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "growthsim/engine.hpp"
#include "growthsim/protocols.hpp"
#include "growthsim/rng.hpp"
#include "growthsim/stats.hpp"

using namespace growthsim;

namespace {

const SpeciesId kA{0}, kB{1};

Configuration ab(Count a, Count b) { return Configuration(std::vector<Count>{a, b}); }

std::vector<double> yule_finals(Method m, std::uint64_t runs, std::uint64_t seed) {
  auto net = yule_network(1.0).network();
  StopCondition stop{stop::TimeHorizon{2.0}};
  SimulationOptions opts;
  opts.sampling = Sampling::stop_only();
  std::vector<double> out;
  for (std::uint64_t i = 0; i < runs; ++i) {
    opts.seed = mix64(seed, i);
    out.push_back(static_cast<double>(simulate(m, net, Configuration(std::vector<Count>{100}), stop, opts)
                                          .terminal.config[SpeciesId{0}]));
  }
  return out;
}

}  // namespace

TEST(CheckStop, Examples) {
  StopCondition consensus{stop::Consensus{kA, kB}};
  EXPECT_EQ(check_stop(ab(0, 7), 0, 0, consensus), std::optional<std::size_t>{0});
  EXPECT_FALSE(check_stop(ab(1, 1), 0, 0, consensus));
  StopCondition target{stop::TargetCount{{kA, kB}, 1000}};
  EXPECT_TRUE(check_stop(ab(600, 400), 0, 0, target));
  EXPECT_FALSE(check_stop(ab(600, 399), 0, 0, target));
}

TEST(CheckStop, FirstFiredClauseInDeclarationOrder) {
  StopCondition stop{stop::TimeHorizon{1.0}, stop::Extinction{{kB}}, stop::MaxEvents{3}};
  EXPECT_EQ(check_stop(ab(1, 0), 2.0, 5, stop), std::optional<std::size_t>{0});
  EXPECT_EQ(check_stop(ab(1, 0), 0.5, 5, stop), std::optional<std::size_t>{1});
  EXPECT_EQ(check_stop(ab(1, 1), 0.5, 5, stop), std::optional<std::size_t>{2});
}

TEST(CheckStop, ConjunctionNeedsEveryLeaf) {
  StopCondition stop{all_of(stop::Extinction{{kA}}, stop::TimeHorizon{1.0}), stop::MaxEvents{100}};
  EXPECT_FALSE(check_stop(ab(0, 1), 0.5, 0, stop));
  EXPECT_FALSE(check_stop(ab(1, 1), 1.5, 0, stop));
  EXPECT_EQ(check_stop(ab(0, 1), 1.5, 0, stop), std::optional<std::size_t>{0});
  EXPECT_TRUE(stop.bounded());
  StopCondition unbounded{all_of(stop::Extinction{{kA}}, stop::TimeHorizon{1.0})};
  EXPECT_FALSE(unbounded.bounded());
}

TEST(SimulateExact, ConsensusAtStart) {
  auto sys = ab_network(1, 1);
  auto tr = simulate_exact(sys, ab(5, 0), {stop::Consensus{kA, kB}, stop::MaxEvents{1000}});
  EXPECT_EQ(tr.terminal.time, 0.0);
  EXPECT_EQ(tr.event_count, 0u);
  EXPECT_EQ(tr.terminal.fired, std::optional<std::size_t>{0});
}

TEST(SimulateExact, YuleMeanMatchesExponentialGrowth) {
  const auto m = moments(yule_finals(Method::exact, 10'000, 21));
  const double expected = 100.0 * std::exp(2.0);
  EXPECT_LE(std::abs(m.mean - expected), 3.0 * m.standard_error()) << m.mean << " vs " << expected;
}

TEST(SimulateExact, MinorityWinBoundAtTwoOne) {
  auto net = ab_network(1, 1).network();
  StopCondition stop{stop::Consensus{kA, kB}, stop::MaxEvents{1'000'000}};
  SimulationOptions opts;
  opts.sampling = Sampling::stop_only();
  const std::uint64_t runs = 100'000;
  std::uint64_t b_wins = 0;
  for (std::uint64_t i = 0; i < runs; ++i) {
    opts.seed = mix64(5, i);
    const auto c = simulate_exact(net, ab(2, 1), stop, opts).terminal.config;
    b_wins += (c[kA] == 0 && c[kB] > 0) ? 1 : 0;
  }
  const double p = static_cast<double>(b_wins) / runs;
  EXPECT_LE(p, 0.25 + 3 * binomial_sigma(p, runs));
}

TEST(SimulateExact, DeterministicForFixedSeed) {
  auto net = ab_network(1, 1).network();
  StopCondition stop{stop::Consensus{kA, kB}, stop::MaxEvents{100'000}};
  SimulationOptions opts;
  opts.seed = 99;
  opts.sampling = Sampling::every_event();
  opts.record_events = true;
  EXPECT_EQ(simulate_exact(net, ab(30, 25), stop, opts), simulate_exact(net, ab(30, 25), stop, opts));
  auto other = opts;
  other.seed = 100;
  EXPECT_NE(simulate_exact(net, ab(30, 25), stop, opts), simulate_exact(net, ab(30, 25), stop, other));
}

TEST(SimulateExact, ReplayReproducesEverySample) {
  auto net = gate_network(DualRailSignal::named("A"), DualRailSignal::named("B"), DualRailSignal::named("Y"),
                          {}, 1.0)
                 .network();
  auto init = net.configuration({{"A0", 5}, {"A1", 20}, {"B0", 18}, {"B1", 3}});
  for (auto sampling : {Sampling::every_event(), Sampling::interval(0.05)}) {
    SimulationOptions opts;
    opts.seed = 3;
    opts.sampling = sampling;
    opts.record_events = true;
    auto tr = simulate_exact(net, init, {stop::TimeHorizon{1.0}}, opts);
    ASSERT_GT(tr.event_count, 10u);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
      EXPECT_LT(tr.samples[i - 1].time, tr.samples[i].time);
      EXPECT_EQ(replay(net, init, tr, tr.samples[i].log_position), tr.samples[i].config);
    }
    EXPECT_EQ(tr.samples.back().config, tr.terminal.config);
    EXPECT_DOUBLE_EQ(tr.terminal.time, 1.0);
  }
}

TEST(SimulateExact, IntervalSamplesLandOnGrid) {
  auto net = yule_network(1.0).network();
  SimulationOptions opts;
  opts.sampling = Sampling::interval(0.1);
  auto tr = simulate_exact(net, Configuration(std::vector<Count>{10}), {stop::TimeHorizon{1.0}}, opts);
  ASSERT_EQ(tr.samples.size(), 11u);
  for (std::size_t k = 0; k < tr.samples.size(); ++k) EXPECT_NEAR(tr.samples[k].time, 0.1 * k, 1e-12);
}

TEST(SimulateExact, AutomaticSamplingUses512Intervals) {
  auto net = yule_network(1.0).network();
  auto tr = simulate_exact(net, Configuration(std::vector<Count>{10}), {stop::TimeHorizon{1.0}});
  EXPECT_EQ(tr.samples.size(), 513u);
}

TEST(SimulateExact, AxesAreAbsorbing) {
  auto net = ab_network(1, 1).network();
  SimulationOptions opts;
  opts.sampling = Sampling::every_event();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    opts.seed = seed;
    auto tr = simulate_exact(net, ab(4, 4), {stop::TimeHorizon{3.0}, stop::MaxEvents{20'000}}, opts);
    bool a_dead = false, b_dead = false;
    for (const auto& s : tr.samples) {
      if (a_dead) {
        EXPECT_EQ(s.config[kA], 0u);
      }
      if (b_dead) {
        EXPECT_EQ(s.config[kB], 0u);
      }
      a_dead = a_dead || s.config[kA] == 0;
      b_dead = b_dead || s.config[kB] == 0;
    }
  }
}

TEST(SimulateExact, DeadlockIsReported) {
  auto net = ab_network(1, 1).network();
  for (auto m : {Method::exact, Method::tau_leap}) {
    auto tr = simulate(m, net, ab(0, 0), {stop::TimeHorizon{1.0}});
    EXPECT_TRUE(tr.deadlocked());
    EXPECT_FALSE(tr.terminal.fired);
    EXPECT_EQ(tr.terminal.time, 0.0);
  }
}

TEST(SimulateExact, RejectsInvalidSetups) {
  auto net = ab_network(1, 1).network();
  EXPECT_THROW(simulate_exact(net, ab(1, 1), {stop::Consensus{kA, kB}}), InvalidArgument);
  EXPECT_THROW(simulate_exact(net, Configuration(3), {stop::MaxEvents{1}}), InvalidArgument);
  EXPECT_THROW(simulate_exact(net, ab(1, 1), {stop::Extinction{{SpeciesId{7}}}, stop::MaxEvents{1}}),
               InvalidArgument);
  SimulationOptions opts;
  opts.tau_epsilon = 1.0;
  EXPECT_THROW(simulate_tau_leap(net, ab(1, 1), {stop::MaxEvents{1}}, opts), InvalidArgument);
  opts = {};
  opts.growth = LogisticGrowth{0, {}};
  EXPECT_THROW(simulate_exact(net, ab(1, 1), {stop::MaxEvents{1}}, opts), InvalidArgument);
}

TEST(Logistic, AppliesToDuplicationsUnlessFlagged) {
  NetworkBuilder nb;
  nb.duplication("X", 1.0);
  nb.reaction({{"X", 1}}, {}, 1.0, ReactionTag::death);
  auto net = nb.build();
  SimulationOptions opts;
  opts.growth = LogisticGrowth{50, {}};
  opts.sampling = Sampling::every_event();
  auto tr = simulate_exact(net, Configuration(std::vector<Count>{50}), {stop::MaxEvents{1}}, opts);
  ASSERT_EQ(tr.event_count, 1u);
  EXPECT_EQ(tr.terminal.config[SpeciesId{0}], 49u) << "at N = K only the death can fire";

  opts.logistic_all_reactions = true;
  tr = simulate_exact(net, Configuration(std::vector<Count>{50}), {stop::MaxEvents{1}}, opts);
  EXPECT_TRUE(tr.deadlocked());
}

TEST(Logistic, CountedSpeciesNarrowsThePopulation) {
  auto net = yule_network(1.0, {"X", "Y"}).network();
  SimulationOptions opts;
  opts.growth = LogisticGrowth{10, {SpeciesId{0}}};
  opts.sampling = Sampling::stop_only();
  auto tr = simulate_exact(net, Configuration(std::vector<Count>{1, 100}), {stop::TimeHorizon{50.0}}, opts);
  EXPECT_EQ(tr.terminal.config[SpeciesId{0}], 10u);
  EXPECT_TRUE(tr.deadlocked());
}

TEST(TauLeap, LogisticPlateauAtCapacity) {
  auto net = yule_network(1.0).network();
  SimulationOptions opts;
  const Count K = 1'000'000;
  opts.growth = LogisticGrowth{K, {}};
  opts.sampling = Sampling::interval(1.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    opts.seed = seed;
    auto tr = simulate_tau_leap(net, Configuration(std::vector<Count>{1000}), {stop::TimeHorizon{40.0}}, opts);
    const double final_count = static_cast<double>(tr.terminal.config[SpeciesId{0}]);
    EXPECT_LE(std::abs(final_count - static_cast<double>(K)), 3.0 * std::sqrt(static_cast<double>(K)));
    EXPECT_GT(tr.leap_count, 0u);
  }
}

TEST(TauLeap, MeanMatchesExactWithinFivePercent) {
  const auto exact = moments(yule_finals(Method::exact, 10'000, 1));
  const auto tau = moments(yule_finals(Method::tau_leap, 10'000, 2));
  EXPECT_LE(std::abs(tau.mean - exact.mean), 0.05 * exact.mean);
}

TEST(TauLeap, NeverGoesNegativeAndReplays) {
  auto net = ab_network(1, 1).network();
  SimulationOptions opts;
  opts.record_events = true;
  opts.sampling = Sampling::every_event();
  opts.tau_exact_switch = 1;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    opts.seed = seed;
    const auto init = ab(3000, 2900);
    auto tr = simulate_tau_leap(net, init, {stop::Consensus{kA, kB}, stop::MaxEvents{10'000'000}}, opts);
    EXPECT_GT(tr.leap_count, 0u);
    for (const auto& s : tr.samples) {
      EXPECT_LE(s.config[kA], 1'000'000u);
      EXPECT_LE(s.config[kB], 1'000'000u);
    }
    // Births precede the death in reaction order, so per-firing replay is safe.
    EXPECT_EQ(replay(net, init, tr, tr.events.size()), tr.terminal.config);
  }
}

TEST(TauLeap, Deterministic) {
  auto net = ab_network(1, 1).network();
  SimulationOptions opts;
  opts.seed = 17;
  StopCondition stop{stop::TimeHorizon{1.0}};
  EXPECT_EQ(simulate_tau_leap(net, ab(5000, 4000), stop, opts), simulate_tau_leap(net, ab(5000, 4000), stop, opts));
}

TEST(Export, CsvAndSummary) {
  auto net = ab_network(1, 1).network();
  StopCondition stop{stop::Consensus{kA, kB}, stop::MaxEvents{100}};
  SimulationOptions opts;
  opts.sampling = Sampling::stop_only();
  auto tr = simulate_exact(net, ab(5, 0), stop, opts);
  std::ostringstream csv;
  write_trajectory_csv(csv, net, tr);
  EXPECT_EQ(csv.str(), "time,A,B\n0,5,0\n");
  auto j = terminal_summary(net, stop, tr);
  EXPECT_EQ(j["fired"], "Consensus(A,B)");
  EXPECT_EQ(j["events"], 0);
  EXPECT_EQ(j["counts"]["A"], 5);
  EXPECT_EQ(j["t_end"], 0.0);
}
