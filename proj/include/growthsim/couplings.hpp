// SPDX-License-Identifier: Apache-2.0
//
// The two couplings of the A-B chain, written as pure step functions of
// explicit random inputs so the pathwise invariants can be checked at every
// step and replayed from a seed:
//
//  * continuous time: (A, B) with the single-species chain M, which has birth
//    rate gamma*M and death rate delta*M^2; min(A, B) <= M throughout.
//  * discrete time: the jump chain (A, B) with a two-colour Yule (Polya) urn
//    (X, Y); X - Y <= A - B as long as X >= Y has held.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "growthsim/errors.hpp"
#include "growthsim/rng.hpp"

namespace growthsim {

class Absorbed : public Error {
 public:
  using Error::Error;
};

/// Independent uniform (xi) and rate-1 exponential (eta) streams.
class RandomStreams {
 public:
  explicit RandomStreams(std::uint64_t seed) : xi_(mix64(seed, 0)), eta_(mix64(seed, 1)) {}

  /// Uniform on [0, 1).
  double xi() { return xi_.uniform(); }
  double eta() { return eta_.exponential(1.0); }

 private:
  Rng xi_;
  Rng eta_;
};

// ---------------------------------------------------------------------------
// Continuous-time coupling with the M chain

struct AbmState {
  std::uint64_t A = 0;
  std::uint64_t B = 0;
  std::uint64_t M = 0;
  double t = 0.0;
  double gamma = 1.0;
  double delta = 1.0;

  double lambda_ab() const {
    const double a = static_cast<double>(A), b = static_cast<double>(B);
    return gamma * (a + b) + delta * a * b;
  }
  double lambda_m() const {
    const double m = static_cast<double>(M);
    return gamma * m + delta * m * m;
  }
  double Lambda() const { return std::max(lambda_ab(), lambda_m()); }

  friend bool operator==(const AbmState&, const AbmState&) = default;
};

/// One uniformised step. With L = Lambda, for A <= B:
///   [0, gA/L)            A+1
///   [gA/L, g(A+B)/L)     B+1
///   [1 - dAB/L, 1)       A-1, B-1
/// otherwise A, B stutter; for A > B the roles of A and B are exchanged.
/// M moves up on [0, gM/L), down on [1 - dM^2/L, 1), stutters otherwise.
/// Time advances by eta / L.
inline AbmState abm_step(AbmState s, double xi, double eta) {
  const double L = s.Lambda();
  if (s.A == 0 && s.B == 0 && s.M == 0) throw Absorbed("A-B-M chain absorbed at (0,0,0)");
  const double a = static_cast<double>(s.A), b = static_cast<double>(s.B);
  const double m = static_cast<double>(s.M);
  const bool swap = s.A > s.B;
  const double first = swap ? b : a;
  if (xi < s.gamma * first / L) {
    (swap ? s.B : s.A) += 1;
  } else if (xi < s.gamma * (a + b) / L) {
    (swap ? s.A : s.B) += 1;
  } else if (xi >= 1.0 - s.delta * a * b / L) {
    s.A -= 1;
    s.B -= 1;
  }
  if (xi < s.gamma * m / L) {
    s.M += 1;
  } else if (s.M > 0 && xi >= 1.0 - s.delta * m * m / L) {
    s.M -= 1;
  }
  s.t += eta / L;
  return s;
}

struct AbmRun {
  std::optional<double> t_consensus;   // first time min(A, B) = 0
  std::optional<double> t_m_extinct;   // first time M = 0
  std::uint64_t steps = 0;
  std::uint64_t violations = 0;        // steps with min(A, B) > M
};

inline AbmRun abm_run(std::uint64_t A0, std::uint64_t B0, double gamma, double delta,
                      std::uint64_t seed, std::uint64_t max_steps = 10'000'000) {
  AbmState s{A0, B0, std::min(A0, B0), 0.0, gamma, delta};
  RandomStreams rs(seed);
  AbmRun run;
  auto observe = [&] {
    if (std::min(s.A, s.B) > s.M) ++run.violations;
    if (!run.t_consensus && std::min(s.A, s.B) == 0) run.t_consensus = s.t;
    if (!run.t_m_extinct && s.M == 0) run.t_m_extinct = s.t;
  };
  observe();
  while (run.steps < max_steps && !(run.t_consensus && run.t_m_extinct)) {
    // After consensus the survivor's growth only dilutes M's share of the
    // uniformised steps, so the A-B side is parked at (0, 0).
    if (run.t_consensus) s.A = s.B = 0;
    s = abm_step(s, rs.xi(), rs.eta());
    ++run.steps;
    observe();
  }
  return run;
}

/// Waiting times between effective (non-stuttering) M moves with the state
/// frozen; they should be exponential with rate lambda_m.
inline std::vector<double> frozen_m_waits(const AbmState& frozen, std::size_t samples,
                                          std::uint64_t seed) {
  const double L = frozen.Lambda();
  if (!(L > 0.0)) throw InvalidArgument("frozen state has zero total rate");
  const double m = static_cast<double>(frozen.M);
  const double up = frozen.gamma * m / L;
  const double down = 1.0 - frozen.delta * m * m / L;
  RandomStreams rs(seed);
  std::vector<double> waits;
  waits.reserve(samples);
  double acc = 0.0;
  while (waits.size() < samples) {
    const double xi = rs.xi();
    acc += rs.eta() / L;
    if (xi < up || xi >= down) {
      waits.push_back(acc);
      acc = 0.0;
    }
  }
  return waits;
}

// ---------------------------------------------------------------------------
// Discrete-time coupling with the Yule urn

struct AbYuleState {
  std::uint64_t A = 0, B = 0, X = 0, Y = 0;
  std::uint64_t k = 0;  // steps taken
  std::uint64_t m = 0;  // death steps taken

  friend bool operator==(const AbYuleState&, const AbYuleState&) = default;
};

/// With l = g(A+B) + dAB and r = Y/(X+Y):
///   [0, dAB/l)                      A-1, B-1, m+1
///   [dAB/l, 1 - (g(A+B)/l) r)       A+1, X+1
///   [.., 1 - gB/l)                  A+1, Y+1
///   [1 - gB/l, 1)                   B+1, Y+1
inline AbYuleState ab_yule_step(AbYuleState s, double xi, double gamma, double delta) {
  const double a = static_cast<double>(s.A), b = static_cast<double>(s.B);
  const double l = gamma * (a + b) + delta * a * b;
  if (std::max(s.A, s.B) == 0 || std::max(s.X, s.Y) == 0 || !(l > 0.0)) {
    ++s.k;
    return s;
  }
  const double r = static_cast<double>(s.Y) / static_cast<double>(s.X + s.Y);
  const double death = delta * a * b / l;
  const double ax_end = 1.0 - gamma * (a + b) / l * r;
  const double ay_end = 1.0 - gamma * b / l;
  if (xi < death) {
    s.A -= 1;
    s.B -= 1;
    s.m += 1;
  } else if (xi < ax_end) {
    s.A += 1;
    s.X += 1;
  } else if (xi < ay_end) {
    s.A += 1;
    s.Y += 1;
  } else {
    s.B += 1;
    s.Y += 1;
  }
  ++s.k;
  return s;
}

// ---------------------------------------------------------------------------
// Polya urn first passage with block jumps

struct UrnPassage {
  bool crossed = false;
  std::uint64_t X = 0;
  std::uint64_t Y = 0;
  double ratio() const { return static_cast<double>(X) / static_cast<double>(X + Y); }
};

/// Runs the stutter-free Yule jump chain (X+1 w.p. X/(X+Y), else Y+1) until
/// X + Y >= n_max and reports whether X/(X+Y) <= num/den ever held.
///
/// From (X, Y) the next s steps add K ~ BetaBinomial(s; X, Y) to X, which is
/// drawn exactly as Binomial(s, p) with p ~ Beta(X, Y). No crossing can occur
/// within s < W/num steps, W = (den-num) X - num Y, so blocks of that length
/// are taken in one draw.
inline UrnPassage urn_first_passage(std::uint64_t X, std::uint64_t Y, std::uint64_t num,
                                    std::uint64_t den, std::uint64_t n_max, Rng& rng) {
  if (X == 0 || Y == 0) throw InvalidArgument("urn needs X, Y >= 1");
  if (num == 0 || num >= den) throw InvalidArgument("urn threshold must lie in (0,1)");
  UrnPassage out{false, X, Y};
  auto margin = [&] {
    return static_cast<std::int64_t>(den - num) * static_cast<std::int64_t>(out.X) -
           static_cast<std::int64_t>(num) * static_cast<std::int64_t>(out.Y);
  };
  auto advance = [&](std::uint64_t s) {
    const double p = rng.beta(static_cast<double>(out.X), static_cast<double>(out.Y));
    const std::uint64_t k = rng.binomial(s, p);
    out.X += k;
    out.Y += s - k;
  };
  if (margin() <= 0) out.crossed = true;
  while (!out.crossed && out.X + out.Y < n_max) {
    const std::uint64_t room = n_max - (out.X + out.Y);
    const std::int64_t w = margin();
    const std::uint64_t safe = static_cast<std::uint64_t>((w - 1) / static_cast<std::int64_t>(num));
    if (safe == 0) {
      const double u = rng.uniform();
      if (u * static_cast<double>(out.X + out.Y) < static_cast<double>(out.X))
        ++out.X;
      else
        ++out.Y;
    } else {
      advance(std::min(safe, room));
    }
    if (margin() <= 0) out.crossed = true;
  }
  if (out.X + out.Y < n_max) advance(n_max - (out.X + out.Y));
  return out;
}

struct YuleLimit {
  double ratio = 0.0;
  bool hit_equal = false;
};

/// X/(X+Y) at total n_max as a proxy for the Beta(X0, Y0) limit, and whether
/// X = Y ever occurred.
inline YuleLimit yule_ratio_limit(std::uint64_t X0, std::uint64_t Y0, std::uint64_t n_max,
                                  Rng& rng) {
  if (X0 == 0 || Y0 == 0) throw InvalidArgument("yule_ratio_limit needs X0, Y0 >= 1");
  if (X0 >= Y0) {
    auto p = urn_first_passage(X0, Y0, 1, 2, n_max, rng);
    return {p.ratio(), p.crossed};
  }
  auto p = urn_first_passage(Y0, X0, 1, 2, n_max, rng);
  return {1.0 - p.ratio(), p.crossed};
}

/// Whether the urn ratio ever drops to 3/4 or below.
inline bool yule_ratio_drop(std::uint64_t X0, std::uint64_t Y0, std::uint64_t n_max, Rng& rng) {
  return urn_first_passage(X0, Y0, 3, 4, n_max, rng).crossed;
}

struct AbYuleRun {
  bool ab_collision = false;      // exists k: A_k = B_k
  bool xy_collision = false;      // exists k: X_k = Y_k
  bool xy_equal_at_first_ab = true;
  std::uint64_t steps = 0;
  std::uint64_t violations = 0;   // steps with X - Y > A - B while armed
  std::uint64_t death_steps = 0;
  bool invariant_armed_at_end = true;
};

/// Runs the coupled chain until A = B or B = 0 (the A-B side is decided) or
/// the step cap. If the urn has not collided by then, its remaining collision
/// event is decided by the block-jump urn up to total n_max.
inline AbYuleRun ab_yule_run(std::uint64_t A0, std::uint64_t B0, double gamma, double delta,
                             std::uint64_t seed, std::uint64_t max_steps = 10'000'000,
                             std::uint64_t n_max = 1'000'000) {
  if (A0 < B0) throw InvalidArgument("ab_yule_run needs A0 >= B0");
  if (B0 == 0) throw InvalidArgument("ab_yule_run needs B0 >= 1");
  AbYuleState s{A0, B0, A0, B0, 0, 0};
  RandomStreams rs(seed);
  AbYuleRun run;
  bool armed = true;
  auto observe = [&] {
    if (s.X < s.Y) armed = false;
    if (armed) {
      const auto xy = static_cast<std::int64_t>(s.X) - static_cast<std::int64_t>(s.Y);
      const auto ab = static_cast<std::int64_t>(s.A) - static_cast<std::int64_t>(s.B);
      if (xy > ab) ++run.violations;
    }
    if (s.X == s.Y) run.xy_collision = true;
    if (!run.ab_collision && s.A == s.B) {
      run.ab_collision = true;
      run.xy_equal_at_first_ab = run.xy_collision;
    }
  };
  observe();
  while (!run.ab_collision && s.B > 0 && s.k < max_steps) {
    const auto prev_m = s.m;
    const auto prev_total = s.X + s.Y;
    s = ab_yule_step(s, rs.xi(), gamma, delta);
    if (s.m != prev_m) {
      ++run.death_steps;
      if (s.m != prev_m + 1 || s.X + s.Y != prev_total) ++run.violations;
    }
    observe();
  }
  run.steps = s.k;
  run.invariant_armed_at_end = armed;
  if (!run.xy_collision) {
    Rng rng(mix64(seed, 2));
    run.xy_collision = urn_first_passage(s.X, s.Y, 1, 2, std::max(n_max, s.X + s.Y + 1), rng).crossed;
  }
  return run;
}

// ---------------------------------------------------------------------------
// A-B jump chain, for the collision/winner relation

enum class AbWinner { majority, minority, mutual, undecided };

struct AbCollisionRun {
  bool collided = false;
  AbWinner winner = AbWinner::undecided;
};

/// Embedded jump chain of the A-B protocol from (A0, B0), run to consensus.
inline AbCollisionRun ab_jump_chain(std::uint64_t A0, std::uint64_t B0, double gamma,
                                    double delta, Rng& rng,
                                    std::uint64_t max_steps = 100'000'000) {
  std::uint64_t a = A0, b = B0;
  AbCollisionRun run;
  run.collided = a == b;
  for (std::uint64_t k = 0; k < max_steps && a > 0 && b > 0; ++k) {
    const double da = static_cast<double>(a), db = static_cast<double>(b);
    const double l = gamma * (da + db) + delta * da * db;
    const double u = rng.uniform() * l;
    if (u < delta * da * db) {
      --a;
      --b;
    } else if (u < delta * da * db + gamma * da) {
      ++a;
    } else {
      ++b;
    }
    if (a == b) run.collided = true;
  }
  if (a == 0 && b == 0)
    run.winner = AbWinner::mutual;
  else if (b == 0)
    run.winner = A0 >= B0 ? AbWinner::majority : AbWinner::minority;
  else if (a == 0)
    run.winner = A0 >= B0 ? AbWinner::minority : AbWinner::majority;
  return run;
}

}  // namespace growthsim
