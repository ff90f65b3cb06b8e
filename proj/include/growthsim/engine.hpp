// SPDX-License-Identifier: Apache-2.0
//
// Exact (Gillespie direct method) and tau-leaping simulation of a Network
// from an initial Configuration to a stop condition.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "json.hpp"

#include "growthsim/crn.hpp"
#include "growthsim/rng.hpp"

namespace growthsim {

// ---------------------------------------------------------------------------
// Stop conditions

namespace stop {

/// Fires when any listed species has count 0.
struct Extinction {
  std::vector<SpeciesId> species;
};

/// Fires when either species of the pair has count 0.
struct Consensus {
  SpeciesId a;
  SpeciesId b;
};

/// Fires when the subset total reaches the threshold.
struct TargetCount {
  std::vector<SpeciesId> species;
  Count threshold = 0;
};

struct TimeHorizon {
  double t_max = 0.0;
};

struct MaxEvents {
  std::uint64_t k = 0;
};

/// Fires when the total population reaches n_max.
struct PopulationCap {
  Count n_max = 0;
};

}  // namespace stop

using StopLeaf = std::variant<stop::Extinction, stop::Consensus, stop::TargetCount,
                              stop::TimeHorizon, stop::MaxEvents, stop::PopulationCap>;

inline bool is_bounding(const StopLeaf& leaf) {
  return std::holds_alternative<stop::TimeHorizon>(leaf) ||
         std::holds_alternative<stop::MaxEvents>(leaf) ||
         std::holds_alternative<stop::PopulationCap>(leaf);
}

/// Conjunction of leaves.
struct StopClause {
  std::vector<StopLeaf> all_of;

  StopClause() = default;
  template <class Leaf,
            class = std::enable_if_t<std::is_constructible_v<StopLeaf, Leaf&&> &&
                                     !std::is_same_v<std::decay_t<Leaf>, StopClause>>>
  StopClause(Leaf&& leaf) : all_of{StopLeaf(std::forward<Leaf>(leaf))} {}  // NOLINT
  explicit StopClause(std::vector<StopLeaf> leaves) : all_of(std::move(leaves)) {}
};

template <class... Leaves>
StopClause all_of(Leaves&&... leaves) {
  return StopClause(std::vector<StopLeaf>{StopLeaf(std::forward<Leaves>(leaves))...});
}

/// Disjunction of clauses, checked in declaration order.
struct StopCondition {
  std::vector<StopClause> any_of;

  StopCondition() = default;
  StopCondition(std::initializer_list<StopClause> clauses) : any_of(clauses) {}
  explicit StopCondition(std::vector<StopClause> clauses) : any_of(std::move(clauses)) {}

  StopCondition& operator|=(StopClause clause) {
    any_of.push_back(std::move(clause));
    return *this;
  }

  /// True when some clause consists only of TimeHorizon/MaxEvents/PopulationCap
  /// leaves, so the condition cannot stay unfired on an ever-growing run.
  bool bounded() const {
    return std::any_of(any_of.begin(), any_of.end(), [](const StopClause& c) {
      return !c.all_of.empty() && std::all_of(c.all_of.begin(), c.all_of.end(), is_bounding);
    });
  }

  /// Smallest TimeHorizon over all leaves, if any.
  std::optional<double> horizon() const {
    std::optional<double> h;
    for (const auto& c : any_of)
      for (const auto& l : c.all_of)
        if (auto* th = std::get_if<stop::TimeHorizon>(&l))
          h = h ? std::min(*h, th->t_max) : th->t_max;
    return h;
  }
};

namespace detail {

inline Count subset_total(const Configuration& config, const std::vector<SpeciesId>& species) {
  Count sum = 0;
  for (auto s : species) sum = checked_add(sum, config[s]);
  return sum;
}

inline bool leaf_holds(const StopLeaf& leaf, const Configuration& config, double t,
                       std::uint64_t events, Count population) {
  return std::visit(
      [&](const auto& l) -> bool {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, stop::Extinction>) {
          return std::any_of(l.species.begin(), l.species.end(),
                             [&](SpeciesId s) { return config[s] == 0; });
        } else if constexpr (std::is_same_v<L, stop::Consensus>) {
          return config[l.a] == 0 || config[l.b] == 0;
        } else if constexpr (std::is_same_v<L, stop::TargetCount>) {
          return subset_total(config, l.species) >= l.threshold;
        } else if constexpr (std::is_same_v<L, stop::TimeHorizon>) {
          return t >= l.t_max;
        } else if constexpr (std::is_same_v<L, stop::MaxEvents>) {
          return events >= l.k;
        } else {
          return population >= l.n_max;
        }
      },
      leaf);
}

}  // namespace detail

/// Index of the first clause (declaration order) whose leaves all hold.
inline std::optional<std::size_t> check_stop(const Configuration& config, double t,
                                             std::uint64_t events, const StopCondition& stop) {
  const Count population = config.total();
  for (std::size_t i = 0; i < stop.any_of.size(); ++i) {
    const auto& leaves = stop.any_of[i].all_of;
    if (leaves.empty()) continue;
    if (std::all_of(leaves.begin(), leaves.end(), [&](const StopLeaf& l) {
          return detail::leaf_holds(l, config, t, events, population);
        }))
      return i;
  }
  return std::nullopt;
}

inline std::string describe(const StopLeaf& leaf, const Network& net) {
  auto names = [&](const std::vector<SpeciesId>& ids) {
    std::string out;
    for (auto s : ids) out += (out.empty() ? "" : ",") + net.name(s);
    return out;
  };
  return std::visit(
      [&](const auto& l) -> std::string {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, stop::Extinction>) {
          return "Extinction(" + names(l.species) + ")";
        } else if constexpr (std::is_same_v<L, stop::Consensus>) {
          return "Consensus(" + net.name(l.a) + "," + net.name(l.b) + ")";
        } else if constexpr (std::is_same_v<L, stop::TargetCount>) {
          return "TargetCount(" + names(l.species) + ";" + std::to_string(l.threshold) + ")";
        } else if constexpr (std::is_same_v<L, stop::TimeHorizon>) {
          char buf[48];
          std::snprintf(buf, sizeof buf, "TimeHorizon(%g)", l.t_max);
          return buf;
        } else if constexpr (std::is_same_v<L, stop::MaxEvents>) {
          return "MaxEvents(" + std::to_string(l.k) + ")";
        } else {
          return "PopulationCap(" + std::to_string(l.n_max) + ")";
        }
      },
      leaf);
}

inline std::string describe(const StopClause& clause, const Network& net) {
  std::string out;
  for (const auto& l : clause.all_of) out += (out.empty() ? "" : " & ") + describe(l, net);
  return out;
}

// ---------------------------------------------------------------------------
// Options

struct PureGrowth {};

/// Duplication propensities are scaled by max(0, 1 - N/K), N summed over
/// `counted` (all species when empty).
struct LogisticGrowth {
  Count capacity = 1;
  std::vector<SpeciesId> counted;
};

using GrowthModel = std::variant<PureGrowth, LogisticGrowth>;

struct Sampling {
  enum class Kind { every_event, interval, stop_only, automatic };
  Kind kind = Kind::automatic;
  double dt = 0.0;

  static Sampling every_event() { return {Kind::every_event, 0.0}; }
  static Sampling interval(double dt) { return {Kind::interval, dt}; }
  static Sampling stop_only() { return {Kind::stop_only, 0.0}; }
  /// 512 evenly spaced samples over the time horizon, stop-only without one.
  static Sampling automatic() { return {Kind::automatic, 0.0}; }
};

struct SimulationOptions {
  std::uint64_t seed = 0;
  GrowthModel growth = PureGrowth{};
  double tau_epsilon = 0.03;
  std::uint64_t tau_exact_switch = 10;
  /// Exact steps taken per fallback from tau-leaping.
  std::uint64_t tau_exact_batch = 100;
  Sampling sampling = Sampling::automatic();
  /// Apply the logistic factor to every reaction, not only duplications.
  bool logistic_all_reactions = false;
  /// Keep the per-event log (needed for replay, costs memory).
  bool record_events = false;
};

// ---------------------------------------------------------------------------
// Trajectory

enum class Outcome { stopped, deadlock };

struct Sample {
  double time = 0.0;
  Configuration config;
  /// Number of event-log entries applied to reach this sample.
  std::uint64_t log_position = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct FiredBatch {
  std::uint32_t reaction = 0;
  std::uint64_t count = 0;

  friend bool operator==(const FiredBatch&, const FiredBatch&) = default;
};

struct Terminal {
  double time = 0.0;
  Configuration config;
  Outcome outcome = Outcome::stopped;
  /// Clause index into StopCondition::any_of; empty on deadlock.
  std::optional<std::size_t> fired;

  friend bool operator==(const Terminal&, const Terminal&) = default;
};

struct Trajectory {
  std::vector<Sample> samples;
  Terminal terminal;
  std::uint64_t event_count = 0;
  std::uint64_t leap_count = 0;
  std::vector<FiredBatch> events;

  bool deadlocked() const noexcept { return terminal.outcome == Outcome::deadlock; }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Applies the event log to `init` up to `position` entries.
inline Configuration replay(const Network& net, Configuration init, const Trajectory& traj,
                            std::uint64_t position) {
  const auto reactions = net.reactions();
  for (std::uint64_t i = 0; i < position && i < traj.events.size(); ++i) {
    const auto& r = reactions[traj.events[i].reaction];
    for (std::uint64_t k = 0; k < traj.events[i].count; ++k) init = apply_reaction(init, r);
  }
  return init;
}

// ---------------------------------------------------------------------------
// Simulator core

namespace detail {

struct CompiledReaction {
  std::vector<std::pair<std::uint32_t, Count>> reactants;
  std::vector<std::pair<std::uint32_t, std::int64_t>> change;
  double rate = 0.0;
  bool logistic = false;
  Count order = 0;
};

class Simulator {
 public:
  Simulator(const Network& net, const Configuration& init, const StopCondition& stop,
            const SimulationOptions& opts)
      : net_(net), stop_(stop), opts_(opts), rng_(opts.seed), state_(init) {
    if (init.size() != net.species_count())
      throw InvalidArgument("initial configuration does not match network species");
    if (!stop.bounded())
      throw InvalidArgument(
          "stop condition needs a TimeHorizon, MaxEvents or PopulationCap clause");
    for (const auto& c : stop.any_of)
      for (const auto& l : c.all_of) check_leaf_species(l);
    if (!(opts.tau_epsilon > 0.0 && opts.tau_epsilon < 1.0))
      throw InvalidArgument("tau_epsilon must lie in (0,1)");
    if (opts.tau_exact_switch == 0) throw InvalidArgument("tau_exact_switch must be positive");

    if (const auto* lg = std::get_if<LogisticGrowth>(&opts.growth)) {
      if (lg->capacity < 1) throw InvalidArgument("carrying capacity must be at least 1");
      logistic_ = true;
      capacity_ = static_cast<double>(lg->capacity);
      counted_mask_.assign(net.species_count(), lg->counted.empty());
      for (auto s : lg->counted) {
        if (s.index >= net.species_count()) throw InvalidArgument("counted species out of range");
        counted_mask_[s.index] = true;
      }
    }

    const double inv_volume = 1.0 / net.volume();
    for (const auto& r : net.reactions()) {
      CompiledReaction c;
      c.rate = r.rate_constant * inv_volume;
      c.order = r.reactants.order();
      c.logistic = logistic_ && (opts.logistic_all_reactions || r.tag == ReactionTag::duplication);
      for (const auto& e : r.reactants.entries()) c.reactants.emplace_back(e.species.index, e.coefficient);
      std::vector<std::int64_t> delta(net.species_count(), 0);
      for (const auto& e : r.reactants.entries()) delta[e.species.index] -= static_cast<std::int64_t>(e.coefficient);
      for (const auto& e : r.products.entries()) delta[e.species.index] += static_cast<std::int64_t>(e.coefficient);
      for (std::uint32_t i = 0; i < delta.size(); ++i)
        if (delta[i] != 0) c.change.emplace_back(i, delta[i]);
      reactions_.push_back(std::move(c));
    }
    propensities_.resize(reactions_.size());

    horizon_ = stop.horizon();
    switch (opts.sampling.kind) {
      case Sampling::Kind::every_event: every_event_ = true; break;
      case Sampling::Kind::interval:
        if (!(opts.sampling.dt > 0.0)) throw InvalidArgument("sampling interval must be positive");
        sample_dt_ = opts.sampling.dt;
        break;
      case Sampling::Kind::automatic:
        if (horizon_ && *horizon_ > 0.0) sample_dt_ = *horizon_ / 512.0;
        break;
      case Sampling::Kind::stop_only: break;
    }
    next_sample_ = sample_dt_ > 0.0 ? sample_dt_ : std::numeric_limits<double>::infinity();
  }

  Trajectory run_exact() {
    begin();
    while (!done_) {
      exact_step();
    }
    return finish();
  }

  Trajectory run_tau_leap() {
    begin();
    while (!done_) {
      const double a0 = compute_propensities();
      if (a0 <= 0.0) {
        deadlock();
        break;
      }
      double tau = select_tau();
      if (a0 * tau < static_cast<double>(opts_.tau_exact_switch)) {
        for (std::uint64_t i = 0; i < opts_.tau_exact_batch && !done_; ++i) exact_step();
        continue;
      }
      leap(tau);
    }
    return finish();
  }

 private:
  void check_leaf_species(const StopLeaf& leaf) const {
    const auto n = net_.species_count();
    auto check = [&](SpeciesId s) {
      if (s.index >= n) throw InvalidArgument("stop condition references unknown species");
    };
    std::visit(
        [&](const auto& l) {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, stop::Extinction> || std::is_same_v<L, stop::TargetCount>) {
            for (auto s : l.species) check(s);
          } else if constexpr (std::is_same_v<L, stop::Consensus>) {
            check(l.a);
            check(l.b);
          }
        },
        leaf);
  }

  void begin() {
    traj_ = Trajectory{};
    t_ = 0.0;
    events_ = 0;
    done_ = false;
    traj_.samples.push_back(Sample{0.0, state_, 0});
    test_stop();
  }

  Trajectory finish() {
    traj_.event_count = events_;
    traj_.terminal.time = t_;
    traj_.terminal.config = state_;
    const auto& last = traj_.samples.back();
    if (t_ > last.time) {
      traj_.samples.push_back(Sample{t_, state_, log_position()});
    } else {
      traj_.samples.back().config = state_;
      traj_.samples.back().log_position = log_position();
    }
    return std::move(traj_);
  }

  std::uint64_t log_position() const { return traj_.events.size(); }

  void test_stop() {
    if (auto fired = check_stop(state_, t_, events_, stop_)) {
      traj_.terminal.outcome = Outcome::stopped;
      traj_.terminal.fired = fired;
      done_ = true;
    }
  }

  void deadlock() {
    traj_.terminal.outcome = Outcome::deadlock;
    traj_.terminal.fired.reset();
    done_ = true;
  }

  double logistic_factor() const {
    Count n = 0;
    for (std::size_t i = 0; i < counted_mask_.size(); ++i)
      if (counted_mask_[i]) n = checked_add(n, state_.counts()[i]);
    return std::max(0.0, 1.0 - static_cast<double>(n) / capacity_);
  }

  double compute_propensities() {
    const double lf = logistic_ ? logistic_factor() : 1.0;
    const auto counts = state_.counts();
    double a0 = 0.0;
    for (std::size_t j = 0; j < reactions_.size(); ++j) {
      const auto& r = reactions_[j];
      double a = r.rate;
      for (const auto& [s, k] : r.reactants) {
        const Count c = counts[s];
        if (c < k) {
          a = 0.0;
          break;
        }
        a *= k == 1 ? static_cast<double>(c) : binomial_as_double(c, k);
      }
      if (r.logistic) a *= lf;
      propensities_[j] = a;
      a0 += a;
    }
    return a0;
  }

  /// Next time boundary (sample point or horizon) that a step may not cross.
  double next_boundary() const {
    double b = next_sample_;
    if (horizon_ && *horizon_ > t_) b = std::min(b, *horizon_);
    return b;
  }

  /// Records interval samples with time <= upto using the current state.
  void emit_samples_until(double upto) {
    while (next_sample_ <= upto) {
      if (next_sample_ > traj_.samples.back().time)
        traj_.samples.push_back(Sample{next_sample_, state_, log_position()});
      next_sample_ = static_cast<double>(++sample_index_ + 1) * sample_dt_;
      if (horizon_ && next_sample_ > *horizon_ * (1.0 + 1e-12)) {
        next_sample_ = std::numeric_limits<double>::infinity();
      }
    }
  }

  void apply(std::size_t j, std::uint64_t times) {
    auto counts = state_.counts();
    for (const auto& [s, d] : reactions_[j].change) {
      if (d > 0) {
        const auto inc = static_cast<Count>(d);
        if (times > 0 && inc > std::numeric_limits<Count>::max() / times)
          throw CountOverflow("species count exceeds 64-bit range");
        counts[s] = checked_add(counts[s], inc * times);
      } else {
        counts[s] -= static_cast<Count>(-d) * times;
      }
    }
    if (opts_.record_events) {
      traj_.events.push_back(FiredBatch{static_cast<std::uint32_t>(j), times});
    }
  }

  void exact_step() {
    const double a0 = compute_propensities();
    if (a0 <= 0.0) {
      deadlock();
      return;
    }
    const double dt = -std::log(rng_.uniform01()) / a0;
    const double boundary = next_boundary();
    if (t_ + dt > boundary) {
      // Memoryless: stop the clock at the boundary and redraw from there.
      t_ = boundary;
      emit_samples_until(t_);
      test_stop();
      return;
    }
    const double target = rng_.uniform01() * a0;
    double acc = 0.0;
    std::size_t j = 0;
    const std::size_t last = reactions_.size() - 1;
    for (; j < last; ++j) {
      acc += propensities_[j];
      if (target < acc && propensities_[j] > 0.0) break;
    }
    while (propensities_[j] <= 0.0) --j;  // guard against round-off past the end
    t_ += dt;
    emit_samples_until(std::nextafter(t_, 0.0));
    apply(j, 1);
    ++events_;
    if (every_event_) traj_.samples.push_back(Sample{t_, state_, log_position()});
    test_stop();
  }

  /// Highest-order-reaction factor g_i for species i.
  double g_factor(std::uint32_t species, Count x) const {
    double g = 0.0;
    for (const auto& r : reactions_) {
      Count mine = 0;
      for (const auto& [s, k] : r.reactants)
        if (s == species) mine = k;
      if (mine == 0) continue;
      double gi = static_cast<double>(r.order);
      const double xd = static_cast<double>(x);
      if (r.order == 2 && mine == 2) {
        gi = x > 1 ? 2.0 + 1.0 / (xd - 1.0) : 2.0;
      } else if (r.order == 3 && mine == 2) {
        gi = x > 1 ? 1.5 * (2.0 + 1.0 / (xd - 1.0)) : 3.0;
      } else if (r.order == 3 && mine == 3) {
        gi = x > 2 ? 3.0 + 1.0 / (xd - 1.0) + 2.0 / (xd - 2.0) : 3.0;
      }
      g = std::max(g, gi);
    }
    return g;
  }

  /// Bounded relative propensity change step size.
  double select_tau() {
    const std::size_t n = net_.species_count();
    mu_.assign(n, 0.0);
    sigma2_.assign(n, 0.0);
    for (std::size_t j = 0; j < reactions_.size(); ++j) {
      const double a = propensities_[j];
      if (a <= 0.0) continue;
      for (const auto& [s, d] : reactions_[j].change) {
        const double v = static_cast<double>(d);
        mu_[s] += v * a;
        sigma2_[s] += v * v * a;
      }
    }
    double tau = std::numeric_limits<double>::infinity();
    const auto counts = state_.counts();
    for (std::uint32_t i = 0; i < n; ++i) {
      const double g = g_factor(i, counts[i]);
      if (g == 0.0) continue;
      const double bound = std::max(opts_.tau_epsilon * static_cast<double>(counts[i]) / g, 1.0);
      if (mu_[i] != 0.0) tau = std::min(tau, bound / std::abs(mu_[i]));
      if (sigma2_[i] > 0.0) tau = std::min(tau, bound * bound / sigma2_[i]);
    }
    return tau;
  }

  void leap(double tau) {
    const double boundary = next_boundary();
    bool at_boundary = false;
    if (t_ + tau >= boundary) {
      tau = boundary - t_;
      at_boundary = true;
    }
    firings_.resize(reactions_.size());
    const auto counts = state_.counts();
    delta_.resize(net_.species_count());
    for (;;) {
      std::fill(delta_.begin(), delta_.end(), 0.0);
      for (std::size_t j = 0; j < reactions_.size(); ++j) {
        firings_[j] = rng_.poisson(propensities_[j] * tau);
        if (firings_[j] == 0) continue;
        for (const auto& [s, d] : reactions_[j].change)
          delta_[s] += static_cast<double>(d) * static_cast<double>(firings_[j]);
      }
      bool negative = false;
      for (std::size_t i = 0; i < delta_.size(); ++i)
        if (delta_[i] < 0.0 && -delta_[i] > static_cast<double>(counts[i])) negative = true;
      if (!negative) break;
      tau *= 0.5;
      at_boundary = false;
    }
    for (std::size_t j = 0; j < reactions_.size(); ++j) {
      if (firings_[j] == 0) continue;
      apply(j, firings_[j]);
      events_ += firings_[j];
    }
    t_ = at_boundary ? boundary : t_ + tau;
    ++traj_.leap_count;
    emit_samples_until(at_boundary ? t_ : std::nextafter(t_, 0.0));
    if (every_event_ && traj_.samples.back().time < t_)
      traj_.samples.push_back(Sample{t_, state_, log_position()});
    test_stop();
  }

  static double binomial_as_double(Count n, Count k) { return detail::binomial_as_double(n, k); }
  static Count checked_add(Count a, Count b) { return detail::checked_add(a, b); }

  const Network& net_;
  const StopCondition& stop_;
  const SimulationOptions& opts_;
  Rng rng_;
  Configuration state_;
  std::vector<CompiledReaction> reactions_;
  std::vector<double> propensities_;
  std::vector<double> mu_, sigma2_, delta_;
  std::vector<std::uint64_t> firings_;
  std::vector<bool> counted_mask_;
  bool logistic_ = false;
  double capacity_ = 1.0;
  std::optional<double> horizon_;
  bool every_event_ = false;
  double sample_dt_ = 0.0;
  double next_sample_ = std::numeric_limits<double>::infinity();
  std::uint64_t sample_index_ = 0;
  Trajectory traj_;
  double t_ = 0.0;
  std::uint64_t events_ = 0;
  bool done_ = false;
};

}  // namespace detail

inline Trajectory simulate_exact(const Network& net, const Configuration& init,
                                 const StopCondition& stop, const SimulationOptions& opts = {}) {
  return detail::Simulator(net, init, stop, opts).run_exact();
}

inline Trajectory simulate_exact(const BirthSystem& system, const Configuration& init,
                                 const StopCondition& stop, const SimulationOptions& opts = {}) {
  return simulate_exact(system.network(), init, stop, opts);
}

inline Trajectory simulate_tau_leap(const Network& net, const Configuration& init,
                                    const StopCondition& stop, const SimulationOptions& opts = {}) {
  return detail::Simulator(net, init, stop, opts).run_tau_leap();
}

inline Trajectory simulate_tau_leap(const BirthSystem& system, const Configuration& init,
                                    const StopCondition& stop, const SimulationOptions& opts = {}) {
  return simulate_tau_leap(system.network(), init, stop, opts);
}

enum class Method { exact, tau_leap };

inline Trajectory simulate(Method method, const Network& net, const Configuration& init,
                           const StopCondition& stop, const SimulationOptions& opts = {}) {
  return method == Method::exact ? simulate_exact(net, init, stop, opts)
                                 : simulate_tau_leap(net, init, stop, opts);
}

// ---------------------------------------------------------------------------
// Export

inline void write_trajectory_csv(std::ostream& out, const Network& net, const Trajectory& traj) {
  out << "time";
  for (const auto& n : net.species_names()) out << ',' << n;
  out << '\n';
  char buf[40];
  for (const auto& s : traj.samples) {
    std::snprintf(buf, sizeof buf, "%.10g", s.time);
    out << buf;
    for (Count c : s.config.counts()) out << ',' << c;
    out << '\n';
  }
}

inline nlohmann::json terminal_summary(const Network& net, const StopCondition& stop,
                                       const Trajectory& traj) {
  nlohmann::json counts = nlohmann::json::object();
  for (auto s : net.species()) counts[net.name(s)] = traj.terminal.config[s];
  nlohmann::json fired = "deadlock";
  if (traj.terminal.fired) fired = describe(stop.any_of[*traj.terminal.fired], net);
  return {{"t_end", traj.terminal.time},
          {"fired", fired},
          {"events", traj.event_count},
          {"counts", counts}};
}

}  // namespace growthsim
