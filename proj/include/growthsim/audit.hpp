// SPDX-License-Identifier: Apache-2.0
//
// Systematic comparison of each closed-form bound against the exact quantity
// (or a Monte Carlo estimate) it is supposed to bound. A report is useful both
// when the bound holds and when it does not: the printed i34 form, for one,
// fails on part of its stated domain.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "growthsim/beta.hpp"
#include "growthsim/bounds.hpp"
#include "growthsim/couplings.hpp"
#include "growthsim/rng.hpp"
#include "growthsim/stats.hpp"

namespace growthsim {

struct BoundPoint {
  std::map<std::string, double> params;
  double closed_form = 0.0;
  double oracle = 0.0;
  /// Monte Carlo standard error of the oracle; 0 for exact oracles.
  double oracle_sigma = 0.0;
  bool satisfied = true;
};

struct BoundReport {
  std::string name;
  /// "upper": oracle <= closed_form is the claim; "lower": oracle >= closed_form.
  std::string direction = "upper";
  std::string oracle_kind = "exact";
  std::vector<BoundPoint> points;

  std::size_t violations() const {
    std::size_t v = 0;
    for (const auto& p : points) v += p.satisfied ? 0 : 1;
    return v;
  }
  double fraction_satisfied() const {
    return points.empty() ? 1.0
                          : 1.0 - static_cast<double>(violations()) / static_cast<double>(points.size());
  }
  /// Largest amount by which the oracle crosses the bound (0 if none).
  double max_violation() const {
    double worst = 0.0;
    for (const auto& p : points) {
      const double excess = direction == "upper" ? p.oracle - p.closed_form : p.closed_form - p.oracle;
      if (!p.satisfied) worst = std::max(worst, excess);
    }
    return worst;
  }
  const BoundPoint* find(const std::map<std::string, double>& params) const {
    for (const auto& p : points)
      if (p.params == params) return &p;
    return nullptr;
  }
};

inline nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points)
    pts.push_back({{"params", p.params},
                   {"closed_form", p.closed_form},
                   {"oracle", p.oracle},
                   {"oracle_sigma", p.oracle_sigma},
                   {"satisfied", p.satisfied}});
  return {{"name", r.name},
          {"direction", r.direction},
          {"oracle", r.oracle_kind},
          {"points", pts},
          {"summary",
           {{"points", r.points.size()},
            {"violations", r.violations()},
            {"fraction_satisfied", r.fraction_satisfied()},
            {"max_violation", r.max_violation()}}}};
}

inline void write_csv(std::ostream& out, const std::vector<BoundReport>& reports) {
  out << "bound,params,closed_form,oracle,oracle_sigma,satisfied\n";
  char buf[64];
  for (const auto& r : reports) {
    for (const auto& p : r.points) {
      std::string params;
      for (const auto& [k, v] : p.params) {
        std::snprintf(buf, sizeof buf, "%s=%.10g", k.c_str(), v);
        params += (params.empty() ? "" : ";") + std::string(buf);
      }
      out << r.name << ',' << params;
      for (double v : {p.closed_form, p.oracle, p.oracle_sigma}) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        out << buf;
      }
      out << ',' << (p.satisfied ? 1 : 0) << '\n';
    }
  }
}

struct AuditOptions {
  std::vector<std::uint64_t> half_gap_m{16, 64, 256, 1024};
  std::vector<std::pair<std::uint64_t, std::uint64_t>> i34_points{
      {2, 2}, {4, 2}, {10, 5}, {15, 5}, {20, 10}, {30, 10}, {40, 20}, {60, 20},
      {57, 19}, {81, 19}, {100, 19}, {120, 40}, {160, 40}, {200, 40}};
  std::vector<std::pair<std::uint64_t, std::uint64_t>> drop_points{{85, 15}, {9, 1}, {17, 3}, {40, 10}};
  std::uint64_t drop_trials = 10'000;
  std::uint64_t urn_n_max = 1'000'000;
  std::vector<std::uint64_t> gate_gap_n{64, 256, 1024, 4096};
  std::vector<std::uint64_t> time_m0{1, 2, 5, 10, 20, 100, 1000};
  std::vector<std::pair<double, double>> time_rates{{1, 1}, {0.5, 1}, {2, 1}, {1, 2}};
  std::uint64_t seed = 1;
};

/// Printed half_gap form and the Hoeffding-justified exp(-gap^2/(8m)), both
/// against exact I_{1/2}(m + gap, m) for 1 <= gap <= m.
inline std::vector<BoundReport> audit_half_gap(const std::vector<std::uint64_t>& ms) {
  BoundReport printed{"half_gap", "upper", "exact", {}};
  BoundReport hoeffding{"half_gap_hoeffding", "upper", "exact", {}};
  for (auto m : ms) {
    const auto seq = half_gap_sequence(m, m);
    for (std::uint64_t d = 1; d <= m; ++d) {
      const long double exact = seq[d].to_long_double();
      const double md = static_cast<double>(m), dd = static_cast<double>(d);
      std::map<std::string, double> params{{"m", md}, {"gap", dd}};
      const double cf = half_gap_bound(md, dd);
      printed.points.push_back({params, cf, static_cast<double>(exact), 0.0, exact <= cf});
      const long double h = std::exp(-static_cast<long double>(dd) * dd / (8.0L * md));
      hoeffding.points.push_back({params, static_cast<double>(h), static_cast<double>(exact), 0.0, exact <= h});
    }
  }
  return {printed, hoeffding};
}

inline BoundReport audit_i34(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pts) {
  BoundReport r{"i34", "upper", "exact", {}};
  for (auto [x, y] : pts) {
    if (y < 2 || x < y) continue;
    const double cf = i34_bound(static_cast<double>(x), static_cast<double>(y));
    const long double exact = reg_inc_beta_quarter(3, x, y).to_long_double();
    r.points.push_back({{{"x", static_cast<double>(x)}, {"y", static_cast<double>(y)}},
                        cf,
                        static_cast<double>(exact),
                        0.0,
                        exact <= cf});
  }
  return r;
}

/// Monte Carlo estimate of P(exists k: ratio <= 3/4) per point; satisfied
/// when p_hat <= bound + 3 sigma.
inline BoundReport audit_drop(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pts,
                              std::uint64_t trials, std::uint64_t n_max, std::uint64_t seed) {
  BoundReport r{"drop", "upper", "monte_carlo", {}};
  std::uint64_t point_index = 0;
  for (auto [x, y] : pts) {
    const double cf = drop_bound(x, y);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
      Rng rng(mix64(mix64(seed, point_index), i));
      hits += yule_ratio_drop(x, y, n_max, rng) ? 1 : 0;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(trials);
    const double sigma = binomial_sigma(p, trials);
    r.points.push_back({{{"x", static_cast<double>(x)}, {"y", static_cast<double>(y)}},
                        cf,
                        p,
                        sigma,
                        p <= cf + 3.0 * sigma});
    ++point_index;
  }
  return r;
}

/// Lower bound on P(D_n > gap) for the +-1 walk with up-probability 9/16;
/// exact oracle P(Bin(n, 9/16) >= floor((n+gap)/2) + 1).
inline BoundReport audit_gate_gap(const std::vector<std::uint64_t>& ns) {
  BoundReport r{"gate_gap", "lower", "exact", {}};
  for (auto n : ns) {
    for (std::uint64_t gap : {std::uint64_t{0}, n / 32, n / 16, n / 8}) {
      const double cf = gate_gap_bound(static_cast<double>(n), static_cast<double>(gap));
      const std::uint64_t a = (n + gap) / 2 + 1;
      const double exact = a > n ? 0.0 : static_cast<double>(reg_inc_beta_ld(9.0L / 16.0L, a, n - a + 1));
      r.points.push_back({{{"n", static_cast<double>(n)}, {"gap", static_cast<double>(gap)}},
                          cf,
                          exact,
                          0.0,
                          exact >= cf});
    }
  }
  return r;
}

inline BoundReport audit_time_upper(const std::vector<std::uint64_t>& m0s,
                                    const std::vector<std::pair<double, double>>& rates) {
  BoundReport r{"time_upper", "upper", "series", {}};
  for (auto [g, d] : rates) {
    const double cf = time_upper_bound(g, d);
    for (auto m0 : m0s) {
      const auto et = expected_extinction_time(m0, g, d);
      r.points.push_back({{{"gamma", g}, {"delta", d}, {"m0", static_cast<double>(m0)}},
                          cf,
                          et.value,
                          0.0,
                          et.value + et.tail_bound <= cf});
    }
  }
  return r;
}

inline std::vector<BoundReport> bounds_audit(const AuditOptions& o = {}) {
  auto reports = audit_half_gap(o.half_gap_m);
  reports.push_back(audit_i34(o.i34_points));
  reports.push_back(audit_drop(o.drop_points, o.drop_trials, o.urn_n_max, o.seed));
  reports.push_back(audit_gate_gap(o.gate_gap_n));
  reports.push_back(audit_time_upper(o.time_m0, o.time_rates));
  return reports;
}

}  // namespace growthsim
