/*
   Copyright 2026 The fragerase Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Fragmentation with erasure: every interval of P_{n-1} receives one new
// point, then the old break points are erased. The break points obey
//
//   a_{n,k} = p_{n,k} a_{n-1,k-1} + (1 - p_{n,k}) a_{n-1,k},  k = 1..n,
//
// with a_{n,0} = 0 and a_{n,n+1} = 1.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

#include "fragerase/csv.hpp"
#include "fragerase/error.hpp"
#include "fragerase/proportions.hpp"

namespace fragerase {

/// Break points a_{n,1..n}, listed with multiplicity.
struct Partition {
  std::vector<double> points;

  int n() const noexcept { return static_cast<int>(points.size()); }
};

/// log a_{n,1..n}; entries may be -inf.
struct LogPartition {
  std::vector<double> log_points;

  int n() const noexcept { return static_cast<int>(log_points.size()); }
};

/// Interval [lo,hi] with per-end closure flags. Break points are counted
/// with multiplicity.
struct EmpiricalQuery {
  double lo = 0.0;
  double hi = 1.0;
  bool include_lo = true;
  bool include_hi = true;

  static EmpiricalQuery closed(double x, double y) { return {x, y, true, true}; }
  /// [x, y)
  static EmpiricalQuery half_open(double x, double y) {
    return {x, y, true, false};
  }
};

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(e^x + e^y), max-shifted; -inf is absorbing on both sides.
inline double log_add(double x, double y) noexcept {
  const double hi = std::max(x, y);
  if (hi == kNegInf) return kNegInf;
  return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

// Clamps v into [lo, hi].
inline double between(double v, double lo, double hi) noexcept {
  return std::min(std::max(v, lo), hi);
}

// `prev` holds 0, a_{m,1..m}, 1; writes 0, a_{m+1,1..m+1}, 1 into `next`.
inline void refine_linear(std::span<const double> prev, std::span<double> next,
                          std::span<const double> row) noexcept {
  const std::size_t len = row.size();
  next[0] = 0.0;
  for (std::size_t k = 1; k <= len; ++k) {
    const double p = row[k - 1];
    next[k] = between(p * prev[k - 1] + (1.0 - p) * prev[k], prev[k - 1], prev[k]);
  }
  next[len + 1] = 1.0;
}

inline void refine_linear(std::span<const double> prev, std::span<double> next,
                          double p, std::size_t len) noexcept {
  const double q = 1.0 - p;
  next[0] = 0.0;
  for (std::size_t k = 1; k <= len; ++k)
    next[k] = between(p * prev[k - 1] + q * prev[k], prev[k - 1], prev[k]);
  next[len + 1] = 1.0;
}

inline void refine_log(std::span<const double> prev, std::span<double> next,
                       std::span<const double> row) noexcept {
  const std::size_t len = row.size();
  next[0] = kNegInf;
  for (std::size_t k = 1; k <= len; ++k) {
    const double p = row[k - 1];
    next[k] = between(log_add(std::log(p) + prev[k - 1], std::log1p(-p) + prev[k]),
                      prev[k - 1], prev[k]);
  }
  next[len + 1] = 0.0;
}

inline void refine_log(std::span<const double> prev, std::span<double> next,
                       double p, std::size_t len) noexcept {
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  next[0] = kNegInf;
  for (std::size_t k = 1; k <= len; ++k)
    next[k] = between(log_add(lp + prev[k - 1], lq + prev[k]), prev[k - 1], prev[k]);
  next[len + 1] = 0.0;
}

inline void check_evolve_range(const Environment& env, int n) {
  if (n < 0 || n > env.n_max())
    throw Error(Errc::IndexOutOfRange,
                "cannot evolve to n=" + std::to_string(n) +
                    " with n_max=" + std::to_string(env.n_max()));
}

// Shared driver: two sentinel-padded buffers swapped every step.
template <bool LogDomain, typename Observer>
std::vector<double> run_evolution(const Environment& env, int n,
                                  Observer&& observe) {
  check_evolve_range(env, n);
  const double lower = LogDomain ? kNegInf : 0.0;
  const double upper = LogDomain ? 0.0 : 1.0;
  const auto cap = static_cast<std::size_t>(n) + 2;
  std::vector<double> cur(cap, lower), next(cap, lower), row;
  cur[1] = upper;
  if (!env.stratified()) row.resize(static_cast<std::size_t>(n));
  for (int m = 1; m <= n; ++m) {
    const auto len = static_cast<std::size_t>(m);
    std::span<const double> prev(cur.data(), len + 1);
    std::span<double> out(next.data(), len + 2);
    if (env.stratified()) {
      const double p = env.row_value(m);
      if constexpr (LogDomain)
        refine_log(prev, out, p, len);
      else
        refine_linear(prev, out, p, len);
    } else {
      std::span<double> r(row.data(), len);
      env.fill_row(m, r);
      if constexpr (LogDomain)
        refine_log(prev, out, r);
      else
        refine_linear(prev, out, r);
    }
    cur.swap(next);
    observe(m, std::span<const double>(cur.data() + 1, len));
  }
  return std::vector<double>(cur.begin() + 1, cur.begin() + 1 + n);
}

}  // namespace detail

/// One fragmentation-with-erasure step; `row` holds p_{n,1..n} for
/// n = part.n() + 1.
inline Partition refine(const Partition& part, std::span<const double> row) {
  const std::size_t m = part.points.size();
  if (row.size() != m + 1)
    throw Error(Errc::RowLengthMismatch,
                "row of length " + std::to_string(row.size()) +
                    " for a partition with " + std::to_string(m) + " points");
  for (double p : row) detail::require_proportion(p, "proportion");
  std::vector<double> prev(m + 2), next(m + 3);
  prev[0] = 0.0;
  std::copy(part.points.begin(), part.points.end(), prev.begin() + 1);
  prev[m + 1] = 1.0;
  detail::refine_linear(prev, next, row);
  return Partition{std::vector<double>(next.begin() + 1, next.end() - 1)};
}

/// P_n from the trivial partition. `observe(m, points)` is called after every
/// step m = 1..n with a view that is valid only during the call.
template <typename Observer>
Partition evolve(const Environment& env, int n, Observer&& observe) {
  return Partition{detail::run_evolution<false>(
      env, n, std::forward<Observer>(observe))};
}

inline Partition evolve(const Environment& env, int n) {
  return evolve(env, n, [](int, std::span<const double>) {});
}

/// Same object as evolve(), carried as log a_{n,k} so that break points far
/// below the smallest double stay representable.
template <typename Observer>
LogPartition evolve_log(const Environment& env, int n, Observer&& observe) {
  return LogPartition{detail::run_evolution<true>(
      env, n, std::forward<Observer>(observe))};
}

inline LogPartition evolve_log(const Environment& env, int n) {
  return evolve_log(env, n, [](int, std::span<const double>) {});
}

/// g_n(q): fraction of break points inside the query interval.
inline double measure_of(const Partition& part, const EmpiricalQuery& q) {
  if (part.points.empty())
    throw Error(Errc::EmptyPartition, "empirical measure of P_0 is undefined");
  if (!(q.lo <= q.hi)) throw Error(Errc::DomainError, "query needs lo <= hi");
  const auto& pts = part.points;
  const auto first = q.include_lo
                         ? std::lower_bound(pts.begin(), pts.end(), q.lo)
                         : std::upper_bound(pts.begin(), pts.end(), q.lo);
  const auto last = q.include_hi
                        ? std::upper_bound(pts.begin(), pts.end(), q.hi)
                        : std::lower_bound(pts.begin(), pts.end(), q.hi);
  const auto count = last > first ? last - first : 0;
  return static_cast<double>(count) / static_cast<double>(pts.size());
}

/// g~_n([0,x]) = g_n([0,x^n]), evaluated as log a <= n log x. With
/// `closed` false it is g~_n([0,x)).
inline double transformed_cdf(const LogPartition& lp, double x,
                              bool closed = true) {
  if (lp.log_points.empty())
    throw Error(Errc::EmptyPartition, "transformed measure of P_0");
  if (!(x >= 0.0 && x <= 1.0))
    throw Error(Errc::XOutOfRange, "x must lie in [0,1]");
  const double threshold = static_cast<double>(lp.n()) * std::log(x);
  const auto& v = lp.log_points;
  const auto it = closed ? std::upper_bound(v.begin(), v.end(), threshold)
                         : std::lower_bound(v.begin(), v.end(), threshold);
  const auto count = it - v.begin();
  return static_cast<double>(count) / static_cast<double>(v.size());
}

/// Longest gap, counting the implicit endpoints 0 and 1.
inline double longest_interval(const Partition& part) noexcept {
  double prev = 0.0;
  double best = 0.0;
  for (double a : part.points) {
    best = std::max(best, a - prev);
    prev = a;
  }
  return std::max(best, 1.0 - prev);
}

/// -(1/n) log a_{n,floor(alpha n)}, the finite-n estimate of I(alpha).
inline double rate_estimate(const LogPartition& lp, double alpha) {
  const int n = lp.n();
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(Errc::IndexOutOfRange, "alpha must lie in (0,1)");
  const auto k = static_cast<long long>(std::floor(alpha * n));
  if (k < 1 || k > n)
    throw Error(Errc::IndexOutOfRange,
                "floor(alpha n) = " + std::to_string(k) + " is not a break point");
  return -lp.log_points[static_cast<std::size_t>(k - 1)] / n;
}

/// Header `k,a,log_a`.
inline void write_partition_csv(std::ostream& os, const Partition& part,
                                const LogPartition& lp) {
  if (part.n() != lp.n())
    throw Error(Errc::SizeMismatch, "partition and log partition differ in n");
  os << "k,a,log_a\n";
  for (int k = 1; k <= part.n(); ++k)
    csv::row(os, k, part.points[k - 1], lp.log_points[k - 1]);
}

}  // namespace fragerase
