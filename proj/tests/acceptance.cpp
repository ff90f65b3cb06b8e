// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [criterion numbers...]   (all when none given)
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "growthsim/growthsim.hpp"
#include "oracles.hpp"

using namespace growthsim;
namespace mp = boost::multiprecision;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double sigma_of(double p, std::uint64_t n) { return binomial_sigma(p, n); }

// 1
Verdict beta_exactness() {
  const auto q = reg_inc_beta_quarter(3, 6, 2);
  const bool exact = q.exponent == 7 && q.numerator == mp::cpp_int(7290);
  const bool matches = compare(q, QuarterRational{7290, 7}) == 0;
  // 0.4449462890625 * 4^7 = 7290 exactly.
  const bool decimal = mp::cpp_int(4449462890625LL) * mp::pow(mp::cpp_int(4), 7) ==
                       q.numerator * mp::pow(mp::cpp_int(10), 13);
  const bool above = mp::cpp_int(1000) * q.numerator > mp::cpp_int(444) * mp::pow(mp::cpp_int(4), 7);
  return {exact && matches && decimal && above,
          fmt("I_{3/4}(6,2) = %s/4^%d = %.13f", q.numerator.str().c_str(), static_cast<int>(q.exponent),
              static_cast<double>(q.to_long_double()))};
}

// 2
Verdict beta_oracle() {
  std::mt19937_64 gen(20240601);
  std::uniform_int_distribution<std::uint64_t> arg(1, 120);
  std::uniform_real_distribution<double> zd(0.005, 0.995);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const double z = i < 45 ? 0.25 * (1 + i % 3) : zd(gen);
    const auto a = arg(gen), b = arg(gen);
    const double got = reg_inc_beta(z, a, b);
    const double want = static_cast<double>(oracle::beta_by_quadrature(z, a, b));
    worst = std::max(worst, std::abs(got - want));
  }
  return {worst <= 1e-10, fmt("200 points, max |diff| = %.3e (tol 1e-10)", worst)};
}

// 3
Verdict monotonicity() {
  std::uint64_t checked = 0, violations = 0;
  for (std::uint64_t y = 1; y <= 40; ++y) {
    auto here = reg_inc_beta_quarter(3, 3 * y, y);
    for (std::uint64_t x = 3 * y; x <= 3 * y + 200; ++x) {
      if (x > 3 * y) here = reg_inc_beta_quarter(3, x, y);
      if (compare(here, reg_inc_beta_quarter(3, x + 3, y + 1)) > 0) ++violations;
      ++checked;
    }
  }
  return {violations == 0,
          fmt("%llu pairs (1<=Y<=40, 3Y<=X<=3Y+200), exact, %llu violations",
              static_cast<unsigned long long>(checked), static_cast<unsigned long long>(violations))};
}

// 4
Verdict gap_bound() {
  std::uint64_t checked = 0, violations = 0;
  double tightest = 0;
  for (std::uint64_t m : {16, 64, 256, 1024}) {
    const auto seq = half_gap_sequence(m, m);
    for (std::uint64_t d = 1; d <= m; ++d) {
      const long double exact = seq[d].to_long_double();
      const long double bound = std::exp(-static_cast<long double>(d) * d / (8.0L * m));
      if (exact > bound) ++violations;
      tightest = std::max(tightest, static_cast<double>(exact / bound));
      ++checked;
    }
  }
  return {violations == 0, fmt("%llu (m, gap) pairs, %llu violations, max exact/bound = %.4f",
                               static_cast<unsigned long long>(checked),
                               static_cast<unsigned long long>(violations), tightest)};
}

// 5
Verdict extinction_time() {
  const auto sys = m_chain_network(1.0, 1.0);
  const auto& net = sys.network();
  const auto m = net.id("M");
  const std::uint64_t runs = 100'000;
  // e pi^2 / 6 = 4.47139...; the commonly quoted 4.472715 is looser.
  const double ceiling = time_upper_bound(1.0, 1.0);
  const double series1 = expected_extinction_time(1, 1, 1).value;
  bool ok = std::abs(series1 - 1.3179021514544) < 1e-12;
  std::ostringstream detail;
  detail << fmt("series(M0=1) = %.13f;", series1);
  std::uint64_t base = 0;
  for (std::uint64_t m0 : {1, 5, 20}) {
    Configuration init(net.species_count());
    init[m] = m0;
    StopCondition stop{stop::Extinction{{m}}, stop::MaxEvents{100'000'000}};
    auto parts = run_chunked<std::vector<double>>(runs, workers(), 4096, [&](std::uint64_t b, std::uint64_t e) {
      std::vector<double> ts;
      SimulationOptions opts;
      opts.sampling = Sampling::stop_only();
      for (auto i = b; i < e; ++i) {
        opts.seed = mix64(5005, base + i);
        ts.push_back(simulate_exact(net, init, stop, opts).terminal.time);
      }
      return ts;
    });
    std::vector<double> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    const auto mo = moments(all);
    const double want = expected_extinction_time(m0, 1, 1).value;
    const double z = (mo.mean - want) / mo.standard_error();
    ok = ok && std::abs(z) <= 3.0 && mo.mean <= ceiling && want <= ceiling;
    detail << fmt(" M0=%llu mean %.4f vs %.4f (z=%+.2f);", static_cast<unsigned long long>(m0), mo.mean, want, z);
    base += runs;
  }
  detail << fmt(" ceiling e*pi^2/6 = %.10f (<= 4.472715)", ceiling);
  ok = ok && ceiling <= 4.472715;
  return {ok, detail.str()};
}

// 6
Verdict majority_failure() {
  AbEnsembleSpec spec;
  spec.points = {{2, 1, 1, 1}, {60, 40, 1, 1}, {550, 450, 1, 1}};
  spec.trials = 100'000;
  spec.master_seed = 6006;
  spec.workers = workers();
  const auto stats = run_ab_ensemble(spec);
  bool ok = true;
  std::ostringstream detail;
  for (const auto& s : stats.points) {
    const double p = s.p_minority();
    const double sig = sigma_of(std::max(p, s.bound), s.trials);
    ok = ok && s.no_consensus == 0 && s.errors == 0 && p <= s.bound + 3 * sig;
    detail << fmt("(%llu,%llu) P(minority) %.5f <= I %.5f + 3s(%.5f); ", static_cast<unsigned long long>(s.point.A0),
                  static_cast<unsigned long long>(s.point.B0), p, s.bound, 3 * sig);
  }
  return {ok, detail.str()};
}

// 7
Verdict ab_diff_sweep() {
  auto c = default_config("ab-diff");
  c.trials = 10'000;
  c.master_seed = 7007;
  AbEnsembleSpec spec;
  spec.points = ab_diff_points(c);
  spec.trials = c.trials;
  spec.master_seed = c.master_seed;
  spec.workers = workers();
  spec.max_events = c.integer("max_events");
  const auto stats = run_ab_ensemble(spec);
  bool ok = true;
  std::ostringstream detail;
  for (double nd : c.numbers("totals")) {
    const auto n = static_cast<std::uint64_t>(nd);
    std::vector<const PointStats*> row;
    for (const auto& s : stats.points)
      if (s.point.A0 + s.point.B0 == n) row.push_back(&s);
    std::sort(row.begin(), row.end(), [](auto* x, auto* y) { return x->point.A0 < y->point.A0; });
    const double p0 = row.front()->p_hat();
    const bool sym = row.front()->point.A0 == row.front()->point.B0 ? (p0 >= 0.48 && p0 <= 0.52) : true;
    std::uint64_t dips = 0;
    for (std::size_t i = 1; i < row.size(); ++i)
      if (row[i]->p_hat() < row[i - 1]->p_hat() && !row[i]->wilson().overlaps(row[i - 1]->wilson())) ++dips;
    auto t = static_cast<std::uint64_t>(std::ceil(4.0 * std::sqrt(nd * std::log(nd))));
    if (t % 2 != n % 2) ++t;
    double pt = -1;
    for (auto* s : row)
      if (s->point.A0 - s->point.B0 == t) pt = s->p_hat();
    ok = ok && sym && dips == 0 && pt >= 0.99;
    // Diagnostics only: at gap 0 a share of runs ends in mutual extinction,
    // which neither side wins; splitting it evenly recovers 1/2.
    const auto& z = *row.front();
    const double mut = static_cast<double>(z.mutual) / static_cast<double>(z.trials);
    detail << fmt("n=%llu: p(0)=%.4f%s (mutual %.4f, tie-split %.4f", static_cast<unsigned long long>(n), p0,
                  sym ? "" : " [outside 0.48..0.52]", mut, p0 + mut / 2);
    if (n == 100) detail << fmt(", exact %.5f", oracle::ab_outcome_dp(50, 50, 1, 1).a_wins);
    detail << fmt("), %llu dips, p(%llu)=%.4f; ", static_cast<unsigned long long>(dips),
                  static_cast<unsigned long long>(t), pt);
  }
  return {ok, detail.str()};
}

// 8
Verdict constant_time() {
  AbEnsembleSpec spec;
  spec.points = {{50, 50, 1, 1}, {500, 500, 1, 1}, {5000, 5000, 1, 1}};
  spec.trials = 2000;
  spec.master_seed = 8008;
  spec.workers = workers();
  const auto stats = run_ab_ensemble(spec);
  double lo = INFINITY, hi = 0;
  std::ostringstream detail;
  bool ok = true;
  for (const auto& s : stats.points) {
    const auto mo = s.time_moments();
    ok = ok && s.no_consensus == 0 && mo.n > 0;
    lo = std::min(lo, mo.mean);
    hi = std::max(hi, mo.mean);
    detail << fmt("n=%llu mean %.4f; ", static_cast<unsigned long long>(s.point.A0 + s.point.B0), mo.mean);
  }
  detail << fmt("max/min = %.3f", hi / lo);
  return {ok && hi / lo < 2.0, detail.str()};
}

// 9
Verdict coupling_invariants() {
  std::uint64_t abm_viol = 0, yule_viol = 0, order_viol = 0, incomplete = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto seed = mix64(9009, i);
    const auto a0 = 1 + i % 40, b0 = 1 + (i * 13) % 31;
    const auto r = abm_run(a0, b0, 1.0, 1.0, seed);
    abm_viol += r.violations;
    if (!(r.t_consensus && r.t_m_extinct)) ++incomplete;
    else if (*r.t_consensus > *r.t_m_extinct) ++order_viol;
    const auto y = ab_yule_run(std::max(a0, b0), std::min(a0, b0), 1.0, 1.0, seed);
    yule_viol += y.violations;
  }
  return {abm_viol + yule_viol + order_viol + incomplete == 0,
          fmt("1000 abm_run: %llu min(A,B)<=M violations, %llu order violations, %llu incomplete; "
              "1000 ab_yule_run: %llu X-Y<=A-B violations",
              static_cast<unsigned long long>(abm_viol), static_cast<unsigned long long>(order_viol),
              static_cast<unsigned long long>(incomplete), static_cast<unsigned long long>(yule_viol))};
}

// 10
Verdict collision_law() {
  const std::uint64_t n = 100'000;
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    Rng rng(mix64(1010, i));
    hits += yule_ratio_limit(2, 1, 1'000'000, rng).hit_equal ? 1 : 0;
  }
  const double want = 2.0 * reg_inc_beta(0.5, 2, 1);
  const double p = static_cast<double>(hits) / n;
  const double sig = sigma_of(want, n);
  const bool yule_ok = std::abs(p - want) <= 3 * sig;

  // Collision against twice the minority-win frequency from (3,2). Mutual
  // extinction passes through a collision and is split evenly between sides.
  std::uint64_t coll = 0, minority = 0, mutual = 0;
  double sum = 0, sum2 = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    Rng rng(mix64(1011, i));
    const auto r = ab_jump_chain(3, 2, 1.0, 1.0, rng);
    const int c = r.collided ? 1 : 0, b = r.winner == AbWinner::minority ? 1 : 0,
              m = r.winner == AbWinner::mutual ? 1 : 0;
    coll += c;
    minority += b;
    mutual += m;
    const double zi = c - 2.0 * b - m;
    sum += zi;
    sum2 += zi * zi;
  }
  const double mean = sum / n;
  const double zsig = std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n);
  const bool ab_ok = std::abs(mean) <= 3 * zsig;
  const double pc = static_cast<double>(coll) / n, pb = static_cast<double>(minority) / n,
               pm = static_cast<double>(mutual) / n;
  return {yule_ok && ab_ok,
          fmt("Yule (2,1): P(X=Y) %.4f vs %.4f +- %.4f; A-B (3,2): P(A=B) %.4f vs 2P(B wins)+P(mutual) %.4f "
              "(diff %+.4f, 3s %.4f; 2P(B wins) alone %.4f, P(mutual) %.4f)",
              p, want, 3 * sig, pc, 2 * pb + pm, mean, 3 * zsig, 2 * pb, pm)};
}

// 11
Verdict ideal_gate() {
  const auto A = DualRailSignal::named("A"), B = DualRailSignal::named("B"), Y = DualRailSignal::named("Y");
  const auto net = gate_network(A, B, Y, {}, 1.0).network();
  const auto ra = resolve(net, A), rb = resolve(net, B), ry = resolve(net, Y);
  const Count n = 10'000, gap = 7'000;
  const double error = 0.1;
  const StopCondition stop{stop::TargetCount{{ry.rail0, ry.rail1}, n}, stop::MaxEvents{100'000'000}};
  bool ok = true;
  std::ostringstream detail;
  for (int va = 0; va <= 1; ++va) {
    for (int vb = 0; vb <= 1; ++vb) {
      const auto sa = make_signal({n, gap, va}, error), sb = make_signal({n, gap, vb}, error);
      Configuration init(net.species_count());
      init[ra.rail0] = sa.rail0;
      init[ra.rail1] = sa.rail1;
      init[rb.rail0] = sb.rail0;
      init[rb.rail1] = sb.rail1;
      const int want = TruthTable::nand()(va, vb);
      const std::uint64_t runs = 1000;
      struct Outcome {
        bool correct;
        std::int64_t gap;  // correct rail minus wrong rail
      };
      auto parts = run_chunked<std::vector<Outcome>>(runs, workers(), 100, [&](std::uint64_t b, std::uint64_t e) {
        std::vector<Outcome> outs;
        SimulationOptions opts;
        opts.sampling = Sampling::stop_only();
        for (auto i = b; i < e; ++i) {
          opts.seed = mix64(1111 + 2 * va + vb, i);
          const auto out = rails_of(simulate_exact(net, init, stop, opts).terminal.config, ry);
          outs.push_back({read_signal(out) == readout_of(want),
                          static_cast<std::int64_t>(out.rail(want)) - static_cast<std::int64_t>(out.rail(1 - want))});
        }
        return outs;
      });
      std::vector<std::int64_t> gaps;
      std::uint64_t correct = 0;
      for (auto& p : parts)
        for (const auto& o : p) {
          correct += o.correct ? 1 : 0;
          gaps.push_back(o.gap);
        }
      std::sort(gaps.begin(), gaps.end());
      const double median = 0.5 * static_cast<double>(gaps[runs / 2 - 1] + gaps[runs / 2]);
      const bool combo_ok = correct >= 990 && median >= static_cast<double>(n) / 16.0;
      ok = ok && combo_ok;
      detail << fmt("(%d,%d)->%d: %llu/1000 correct, median gap %.0f; ", va, vb, want, static_cast<unsigned long long>(correct),
                    median);
    }
  }
  detail << fmt("n=%llu, gap=%llu, input error %.2f, threshold n/16=%.0f", static_cast<unsigned long long>(n),
                static_cast<unsigned long long>(gap), error, static_cast<double>(n) / 16.0);
  return {ok, detail.str()};
}

// 12
Verdict nand_figure() {
  NandSimOptions o;
  o.master_seed = 1212;
  o.workers = workers();
  o.series_points = 2;
  const auto r = nand_sim(o);
  bool ok = r.combos.size() == 4;
  std::ostringstream detail;
  for (const auto& c : r.combos) {
    ok = ok && c.runs.size() == 30 && c.correct() >= 29;
    detail << fmt("(%d,%d)->%d: %llu/30; ", c.a, c.b, c.expected, static_cast<unsigned long long>(c.correct()));
  }
  detail << "tau-leaping, logistic K=1e9, t=30 min";
  return {ok, detail.str()};
}

// 13
Verdict tau_fidelity() {
  const auto net = yule_network(1.0).network();
  Configuration init(1);
  init[SpeciesId{0}] = 100;
  const StopCondition stop{stop::TimeHorizon{2.0}};
  const std::uint64_t runs = 10'000;
  auto ensemble = [&](Method method, std::uint64_t seed) {
    auto parts = run_chunked<std::vector<double>>(runs, workers(), 1000, [&](std::uint64_t b, std::uint64_t e) {
      std::vector<double> xs;
      SimulationOptions opts;
      opts.sampling = Sampling::stop_only();
      for (auto i = b; i < e; ++i) {
        opts.seed = mix64(seed, i);
        xs.push_back(static_cast<double>(simulate(method, net, init, stop, opts).terminal.config[SpeciesId{0}]));
      }
      return xs;
    });
    std::vector<double> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return moments(all).mean;
  };
  const double exact = ensemble(Method::exact, 1313), tau = ensemble(Method::tau_leap, 1314);
  const double rel = std::abs(tau - exact) / exact;
  return {rel <= 0.05, fmt("exact mean %.2f, tau-leap mean %.2f, relative diff %.4f (100 e^2 = %.2f)", exact, tau,
                           rel, 100 * std::exp(2.0))};
}

// 14
Verdict bounds_audit_check() {
  const auto i34 = audit_i34({{81, 19}});
  const auto drop = audit_drop({{85, 15}}, 100'000, 1'000'000, 1414);
  const auto& a = i34.points.at(0);
  const auto& d = drop.points.at(0);
  const bool flagged = !a.satisfied && a.oracle > a.closed_form;
  return {flagged && d.satisfied,
          fmt("i34 (81,19): exact %.6f vs closed form %.3e -> %s; drop (85,15): p %.5f <= %.5f + 3s(%.5f) -> %s",
              a.oracle, a.closed_form, a.satisfied ? "not flagged" : "flagged", d.oracle, d.closed_form,
              3 * d.oracle_sigma, d.satisfied ? "holds" : "violated")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"beta exactness", beta_exactness},
      {"beta oracle agreement", beta_oracle},
      {"slope-1/3 monotonicity", monotonicity},
      {"gap bound", gap_bound},
      {"extinction time", extinction_time},
      {"majority-failure bound", majority_failure},
      {"ab-diff sweep", ab_diff_sweep},
      {"constant consensus time", constant_time},
      {"coupling invariants", coupling_invariants},
      {"collision law", collision_law},
      {"ideal gate", ideal_gate},
      {"nand-sim", nand_figure},
      {"tau-leap fidelity", tau_fidelity},
      {"bounds audit", bounds_audit_check},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << id << "] " << criteria[k].first << " (" << fmt("%.1f", secs)
              << "s): " << v.detail << std::endl;
  }
  std::cout << (failures ? "FAILED: " : "ALL PASSED: ") << failures << " failing criteria" << std::endl;
  return failures ? 1 : 0;
}
