// SPDX-License-Identifier: Apache-2.0
//
// Regularized incomplete beta I_z(a, b) for integer a, b >= 1, taken as the
// Beta(a, b) CDF at z and evaluated as the binomial tail
//
//   I_z(a, b) = sum_{j=a}^{n} C(n, j) z^j (1-z)^(n-j),   n = a + b - 1.
//
// At z in {1/4, 1/2, 3/4} the tail is an exact rational with denominator 4^n.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "growthsim/errors.hpp"

namespace growthsim {

namespace mp = boost::multiprecision;

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(long double x) {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

/// Exact value numerator / 4^exponent.
struct QuarterRational {
  mp::cpp_int numerator;
  std::uint64_t exponent = 0;

  long double to_long_double() const {
    using F = mp::cpp_bin_float_50;
    F v = F(numerator) / mp::pow(F(4), static_cast<int>(exponent));
    return v.convert_to<long double>();
  }

  /// Exact three-way comparison.
  friend int compare(const QuarterRational& x, const QuarterRational& y) {
    // x.num / 4^ex  vs  y.num / 4^ey
    mp::cpp_int lhs = x.numerator, rhs = y.numerator;
    if (x.exponent < y.exponent)
      lhs <<= 2 * (y.exponent - x.exponent);
    else
      rhs <<= 2 * (x.exponent - y.exponent);
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  }
};

namespace detail {

inline void check_beta_args(std::uint64_t a, std::uint64_t b) {
  if (a < 1 || b < 1) throw InvalidArgument("incomplete beta needs integer a, b >= 1");
}

}  // namespace detail

/// Exact I_{k/4}(a, b) for k in {1, 2, 3}.
inline QuarterRational reg_inc_beta_quarter(unsigned k, std::uint64_t a, std::uint64_t b) {
  detail::check_beta_args(a, b);
  if (k < 1 || k > 3) throw InvalidArgument("quarter point must be 1/4, 1/2 or 3/4");
  const std::uint64_t n = a + b - 1;
  const unsigned q = 4 - k;
  // Walk j from n down to a, keeping C(n, j), k^j and q^(n-j) exact.
  mp::cpp_int binom = 1;
  mp::cpp_int pk = mp::pow(mp::cpp_int(k), static_cast<unsigned>(n));
  mp::cpp_int pq = 1;
  mp::cpp_int sum = 0;
  for (std::uint64_t j = n;; --j) {
    sum += binom * pk * pq;
    if (j == a) break;
    binom = binom * j / (n - j + 1);
    pk /= k;
    pq *= q;
  }
  return {sum, n};
}

/// I_z(a, b) in extended precision. Terms are generated by the ratio
/// recurrence from j = a upward and summed with compensation.
inline long double reg_inc_beta_ld(long double z, std::uint64_t a, std::uint64_t b) {
  detail::check_beta_args(a, b);
  if (!(z >= 0.0L && z <= 1.0L)) throw InvalidArgument("incomplete beta needs z in [0,1]");
  if (z == 0.0L) return 0.0L;
  if (z == 1.0L) return 1.0L;
  const std::uint64_t n = a + b - 1;
  const long double nl = static_cast<long double>(n);
  const long double al = static_cast<long double>(a);
  const long double log_z = std::log(z);
  const long double log_1mz = std::log1p(-z);
  const long double odds = z / (1.0L - z);
  // Start at the largest term at or above j = a to keep the recurrence stable.
  const long double mode = std::floor((nl + 1.0L) * z);
  const std::uint64_t start = mode > al ? static_cast<std::uint64_t>(std::min(mode, nl)) : a;
  auto log_term = [&](std::uint64_t j) {
    const long double jl = static_cast<long double>(j);
    return std::lgamma(nl + 1.0L) - std::lgamma(jl + 1.0L) - std::lgamma(nl - jl + 1.0L) +
           jl * log_z + (nl - jl) * log_1mz;
  };
  CompensatedSum sum;
  const long double t0 = std::exp(log_term(start));
  sum.add(t0);
  long double t = t0;
  for (std::uint64_t j = start; j < n; ++j) {  // upward: j -> j+1
    t *= static_cast<long double>(n - j) / static_cast<long double>(j + 1) * odds;
    sum.add(t);
    if (t < 1e-40L * sum.value() && t > 0) break;
  }
  t = t0;
  for (std::uint64_t j = start; j > a; --j) {  // downward: j -> j-1
    t *= static_cast<long double>(j) / static_cast<long double>(n - j + 1) / odds;
    sum.add(t);
    if (t < 1e-40L * sum.value() && t > 0) break;
  }
  const long double v = sum.value();
  return v < 0.0L ? 0.0L : (v > 1.0L ? 1.0L : v);
}

/// I_z(a, b). Exact rational path at quarter points (n <= 4096), extended
/// precision elsewhere.
inline double reg_inc_beta(double z, std::uint64_t a, std::uint64_t b) {
  detail::check_beta_args(a, b);
  const double k = z * 4.0;
  if ((k == 1.0 || k == 2.0 || k == 3.0) && a + b - 1 <= 4096)
    return static_cast<double>(reg_inc_beta_quarter(static_cast<unsigned>(k), a, b).to_long_double());
  return static_cast<double>(reg_inc_beta_ld(z, a, b));
}

/// I_{1/2}(m + d, m) for d = 0..max_delta, exact, via the recurrence on
/// S(n, a) = sum_{j>=a} C(n, j):  S(n+1, a+1) = 2 S(n, a) - C(n, a).
inline std::vector<QuarterRational> half_gap_sequence(std::uint64_t m, std::uint64_t max_delta) {
  if (m < 1) throw InvalidArgument("half_gap_sequence needs m >= 1");
  std::vector<QuarterRational> out;
  out.reserve(max_delta + 1);
  // d = 0: n = 2m - 1, a = m.
  std::uint64_t n = 2 * m - 1;
  std::uint64_t a = m;
  mp::cpp_int binom = 1;  // C(n, a)
  for (std::uint64_t i = 1; i <= a; ++i) binom = binom * (n - a + i) / i;
  mp::cpp_int tail = 0;
  {
    mp::cpp_int c = binom;
    for (std::uint64_t j = a;; ++j) {
      tail += c;
      if (j == n) break;
      c = c * (n - j) / (j + 1);
    }
  }
  for (std::uint64_t d = 0;; ++d) {
    // I = tail / 2^n = (tail * 2^n) / 4^n.
    out.push_back({tail << n, n});
    if (d == max_delta) break;
    const mp::cpp_int next_tail = 2 * tail - binom;
    binom = binom * (n + 1) / (a + 1);
    tail = next_tail;
    ++n;
    ++a;
  }
  return out;
}

}  // namespace growthsim
