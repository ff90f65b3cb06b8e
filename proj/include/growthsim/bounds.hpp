// SPDX-License-Identifier: Apache-2.0
//
// Closed-form probability and time bounds for the A-B protocol and the
// dual-rail gate, evaluated literally as printed, plus the exact quantities
// they are meant to bound.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "growthsim/beta.hpp"
#include "growthsim/errors.hpp"

namespace growthsim {

class ArgumentOrder : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Probability bound I_{1/2}(A0, B0) that the A-B protocol misses majority
/// consensus from A0 >= B0 >= 1.
inline double majority_failure_bound(std::uint64_t A0, std::uint64_t B0) {
  if (A0 < B0) throw ArgumentOrder("majority_failure_bound needs A0 >= B0");
  if (B0 < 1) throw InvalidArgument("majority_failure_bound needs B0 >= 1");
  return reg_inc_beta(0.5, A0, B0);
}

enum class BoundKind { half_gap, i34, drop, gate_inputs, gate_gap, time_upper };

inline std::string_view to_string(BoundKind k) {
  switch (k) {
    case BoundKind::half_gap: return "half_gap";
    case BoundKind::i34: return "i34";
    case BoundKind::drop: return "drop";
    case BoundKind::gate_inputs: return "gate_inputs";
    case BoundKind::gate_gap: return "gate_gap";
    case BoundKind::time_upper: return "time_upper";
  }
  return "?";
}

inline BoundKind parse_bound_kind(std::string_view s) {
  for (auto k : {BoundKind::half_gap, BoundKind::i34, BoundKind::drop, BoundKind::gate_inputs,
                 BoundKind::gate_gap, BoundKind::time_upper})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown bound kind '" + std::string(s) + "'");
}

/// Parameters by name; each kind reads only its own.
///   half_gap:    m, gap
///   i34, drop:   x, y
///   gate_inputs: n, gap, max_input  (max_input = max{A(0), B(0)})
///   gate_gap:    n, gap
///   time_upper:  gamma, delta
struct BoundParams {
  double m = 0, gap = 0, x = 0, y = 0, n = 0, max_input = 0, gamma = 0, delta = 0;
};

/// 1/2 exp(-(gap+1)^2 / (4(m-1))), m >= 2.
inline double half_gap_bound(double m, double gap) {
  if (!(m >= 2.0)) throw DomainViolation("half_gap needs m >= 2");
  if (!(gap >= 0.0)) throw DomainViolation("half_gap needs gap >= 0");
  return 0.5 * std::exp(-(gap + 1.0) * (gap + 1.0) / (4.0 * (m - 1.0)));
}

/// 1/2 exp(-(X-Y+1)^2 / (4(Y-1)) + (X+Y-1) log(3/2)), X >= Y >= 2.
inline double i34_bound(double x, double y) {
  if (!(y >= 2.0)) throw DomainViolation("i34 needs Y >= 2");
  if (!(x >= y)) throw DomainViolation("i34 needs X >= Y");
  return 0.5 * std::exp(-(x - y + 1.0) * (x - y + 1.0) / (4.0 * (y - 1.0)) +
                        (x + y - 1.0) * std::log(1.5));
}

/// I_{3/4}(X0, Y0) / 0.444 bounds P(exists k: X_k/(X_k+Y_k) <= 3/4) for a
/// Yule urn started above 3/4.
inline double drop_bound(std::uint64_t x, std::uint64_t y) {
  if (x < 1 || y < 1) throw DomainViolation("drop needs X0, Y0 >= 1");
  if (4 * x <= 3 * (x + y)) throw DomainViolation("drop needs X0/(X0+Y0) > 3/4");
  return reg_inc_beta(0.75, x, y) / 0.444;
}

/// (1 - exp((-gap^2/(n-gap) + max_input)/2) / (2 * 0.444))^2, n/2 < gap < n.
inline double gate_inputs_bound(double n, double gap, double max_input) {
  if (!(n >= 1.0)) throw DomainViolation("gate_inputs needs n >= 1");
  if (!(gap > n / 2.0 && gap < n)) throw DomainViolation("gate_inputs needs n/2 < gap < n");
  if (!(max_input >= n)) throw DomainViolation("gate_inputs needs max input >= n");
  const double e = std::exp(0.5 * (-(gap * gap) / (n - gap) + max_input));
  const double base = 1.0 - e / (2.0 * 0.444);
  return base * base;
}

/// 1 - exp(-(n/8 - gap)^2 / (2n)), 0 <= gap <= n/8.
inline double gate_gap_bound(double n, double gap) {
  if (!(n >= 1.0)) throw DomainViolation("gate_gap needs n >= 1");
  if (!(gap >= 0.0 && gap <= n / 8.0)) throw DomainViolation("gate_gap needs 0 <= gap <= n/8");
  const double d = n / 8.0 - gap;
  return 1.0 - std::exp(-d * d / (2.0 * n));
}

/// e^(gamma/delta) pi^2 / (6 delta).
inline double time_upper_bound(double gamma, double delta) {
  if (!(delta > 0.0)) throw DomainViolation("time_upper needs delta > 0");
  if (!(gamma >= 0.0)) throw DomainViolation("time_upper needs gamma >= 0");
  return std::exp(gamma / delta) * std::numbers::pi * std::numbers::pi / (6.0 * delta);
}

inline double closed_form_bound(BoundKind kind, const BoundParams& p) {
  auto integral = [](double v, const char* what) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e15)
      throw DomainViolation(std::string(what) + " must be a positive integer");
    return static_cast<std::uint64_t>(v);
  };
  switch (kind) {
    case BoundKind::half_gap: return half_gap_bound(p.m, p.gap);
    case BoundKind::i34: return i34_bound(p.x, p.y);
    case BoundKind::drop: return drop_bound(integral(p.x, "X0"), integral(p.y, "Y0"));
    case BoundKind::gate_inputs: return gate_inputs_bound(p.n, p.gap, p.max_input);
    case BoundKind::gate_gap: return gate_gap_bound(p.n, p.gap);
    case BoundKind::time_upper: return time_upper_bound(p.gamma, p.delta);
  }
  throw InvalidArgument("unknown bound kind");
}

// ---------------------------------------------------------------------------
// omega

/// inf { I_{3/4}(x, y) : x >= X0, y >= Y0 + 1, x in {3y, 3y-1, 3y-2} }.
///
/// Along x = 3y the value is non-decreasing in y (I(X,Y) <= I(X+3,Y+1) for
/// X >= 3Y), and I is decreasing in its first argument, so the points with
/// x = 3y-1, 3y-2 never go below the x = 3y point with the same y. The
/// infimum is therefore attained at x = 3 y0 with the smallest feasible y0.
inline double omega_lower_bound(std::uint64_t X0, std::uint64_t Y0) {
  if (X0 < 1 || Y0 < 1) throw InvalidArgument("omega needs X0, Y0 >= 1");
  const std::uint64_t y0 = std::max(Y0 + 1, (X0 + 2) / 3);
  return reg_inc_beta(0.75, 3 * y0, y0);
}

/// Brute-force minimum over the feasible set with y <= Y0 + span.
inline double omega_brute_force(std::uint64_t X0, std::uint64_t Y0, std::uint64_t span = 64) {
  double best = 1.0;
  for (std::uint64_t y = Y0 + 1; y <= Y0 + span; ++y)
    for (std::uint64_t r = 0; r <= 2; ++r) {
      const std::uint64_t x = 3 * y - r;
      if (x < X0 || x < 1) continue;
      best = std::min(best, reg_inc_beta(0.75, x, y));
    }
  return best;
}

// ---------------------------------------------------------------------------
// Expected extinction time of the M chain

struct ExtinctionTime {
  double value = 0.0;
  /// Upper bound on the truncated remainder (already divided by delta).
  double tail_bound = 0.0;
  std::uint64_t terms = 0;
};

/// E T = (1/delta) sum_{j=1}^{M0} sum_{k>=j} t_{j,k}, t_{j,j} = 1/j^2,
/// t_{j,k+1} / t_{j,k} = alpha k / (k+1)^2, alpha = gamma/delta.
/// Each inner series stops once a term is below tol * partial sum and the
/// ratio is below 1; since the ratio decreases in k the remainder is at most
/// next_term / (1 - ratio).
inline ExtinctionTime expected_extinction_time(std::uint64_t M0, double gamma, double delta,
                                               double tol = 1e-16) {
  if (!(delta > 0.0)) throw InvalidArgument("expected_extinction_time needs delta > 0");
  if (!(gamma >= 0.0)) throw InvalidArgument("expected_extinction_time needs gamma >= 0");
  const double alpha = gamma / delta;
  ExtinctionTime out;
  CompensatedSum total;
  long double tail = 0.0L;
  for (std::uint64_t j = 1; j <= M0; ++j) {
    const long double jl = static_cast<long double>(j);
    long double term = 1.0L / (jl * jl);
    CompensatedSum inner;
    for (std::uint64_t k = j;; ++k) {
      inner.add(term);
      ++out.terms;
      const long double kl = static_cast<long double>(k);
      const long double ratio = alpha * kl / ((kl + 1.0L) * (kl + 1.0L));
      const long double next = term * ratio;
      if (ratio < 1.0L && next < tol * inner.value()) {
        tail += next / (1.0L - ratio);
        break;
      }
      term = next;
      if (out.terms > 100'000'000ULL) throw Error("extinction-time series failed to converge");
    }
    total.add(inner.value());
  }
  out.value = static_cast<double>(total.value() / delta);
  out.tail_bound = static_cast<double>(tail / delta);
  return out;
}

/// E T for every M0 = 0..max_m0 (delta = gamma = rates given), reusing the
/// inner sums.
inline std::vector<double> expected_extinction_times(std::uint64_t max_m0, double gamma,
                                                     double delta, double tol = 1e-16) {
  std::vector<double> out{0.0};
  CompensatedSum total;
  const double alpha = gamma / delta;
  for (std::uint64_t j = 1; j <= max_m0; ++j) {
    const long double jl = static_cast<long double>(j);
    long double term = 1.0L / (jl * jl);
    CompensatedSum inner;
    for (std::uint64_t k = j;; ++k) {
      inner.add(term);
      const long double kl = static_cast<long double>(k);
      const long double ratio = alpha * kl / ((kl + 1.0L) * (kl + 1.0L));
      term *= ratio;
      if (ratio < 1.0L && term < tol * inner.value()) break;
    }
    total.add(inner.value());
    out.push_back(static_cast<double>(total.value() / delta));
  }
  return out;
}

}  // namespace growthsim
