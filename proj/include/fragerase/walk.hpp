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

// The auxiliary walk x_0 = 0, x_n = x_{n-1} + y_{n, x_{n-1}+1}, where
// y_{n,k} ~ Bernoulli(p_{n,k}). Its CDF reproduces the break points:
// a_{n,k} = P(x_n <= k-1).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <thread>
#include <vector>

#include "fragerase/counter_rng.hpp"
#include "fragerase/csv.hpp"
#include "fragerase/error.hpp"
#include "fragerase/fragmenter.hpp"
#include "fragerase/proportions.hpp"

namespace fragerase {

/// probs[j] = P(x_n = j), j = 0..n.
struct WalkDistribution {
  std::vector<double> probs;

  int n() const noexcept { return static_cast<int>(probs.size()) - 1; }
};

/// Terminal values of independent quenched trajectories.
struct WalkSample {
  std::uint64_t seed = 0;
  int n = 0;
  std::vector<int> values;

  int replicas() const noexcept { return static_cast<int>(values.size()); }

  /// Fraction of replicas with x_n <= k.
  double empirical_cdf(int k) const noexcept {
    const auto c = std::count_if(values.begin(), values.end(),
                                 [k](int v) { return v <= k; });
    return static_cast<double>(c) / static_cast<double>(values.size());
  }
};

struct RepresentationReport {
  double max_abs_err = 0.0;
  int worst_k = 0;
};

inline constexpr int kMaxEnumerationSteps = 20;

/// Forward pass q_{n,k} = q_{n-1,k}(1 - p_{n,k+1}) + q_{n-1,k-1} p_{n,k}.
inline WalkDistribution walk_distribution(const Environment& env, int n) {
  detail::check_evolve_range(env, n);
  std::vector<double> q(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> row(static_cast<std::size_t>(n));
  q[0] = 1.0;
  for (int m = 1; m <= n; ++m) {
    std::span<double> r(row.data(), static_cast<std::size_t>(m));
    env.fill_row(m, r);
    // q[m-1..0] still hold step m-1; walk downward so q[k-1] is unchanged.
    q[m] = q[m - 1] * r[m - 1];
    for (int k = m - 1; k >= 1; --k)
      q[k] = q[k] * (1.0 - r[k]) + q[k - 1] * r[k - 1];
    q[0] = q[0] * (1.0 - r[0]);
  }
  return WalkDistribution{std::move(q)};
}

/// P(x_n <= k); 0 for k < 0 and 1 for k >= n.
inline double walk_cdf(const WalkDistribution& dist, int k) noexcept {
  if (k < 0) return 0.0;
  if (k >= dist.n()) return 1.0;
  double s = 0.0;
  for (int j = 0; j <= k; ++j) s += dist.probs[j];
  return std::min(s, 1.0);
}

namespace detail {

// log(n!) - log(sqrt(2 pi n) (n/e)^n).
inline double stirling_error(double n) noexcept {
  static constexpr double kTable[] = {
      0.0,
      0.08106146679532725821967026,
      0.04134069595540929409382208,
      0.02767792568499833914878929,
      0.02079067210376509311152277,
      0.01664469118982119216319487,
      0.01387612882307074799874573,
      0.01189670994589177009505572,
      0.01041126526197209649747857,
      0.009255462182712732917728637,
      0.008330563433362871256469319,
      0.007573675487951840794972024,
      0.006942840107209529865664153,
      0.006408994188004207068439631,
      0.005951370112758847735624416,
      0.00555473355196280137103869,
  };
  constexpr double s0 = 1.0 / 12.0, s1 = 1.0 / 360.0, s2 = 1.0 / 1260.0,
                   s3 = 1.0 / 1680.0, s4 = 1.0 / 1188.0;
  if (n <= 15.0) return kTable[static_cast<int>(n)];
  const double nn = n * n;
  if (n > 500.0) return (s0 - s1 / nn) / n;
  if (n > 80.0) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35.0) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x log(x/m) + m - x without cancellation (Loader's deviance term).
inline double deviance(double x, double m) noexcept {
  if (std::abs(x - m) < 0.1 * (x + m)) {
    double v = (x - m) / (x + m);
    double s = (x - m) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / m) + m - x;
}

}  // namespace detail

/// log P(Bin(n,p) = j) by the saddle-point expansion; -inf off the support.
inline double binomial_log_pmf(int n, double p, int j) noexcept {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (j < 0 || j > n) return kNegInf;
  const double q = 1.0 - p;
  if (p == 0.0) return j == 0 ? 0.0 : kNegInf;
  if (p == 1.0) return j == n ? 0.0 : kNegInf;
  const double nd = n;
  if (j == 0) return nd * std::log1p(-p);
  if (j == n) return nd * std::log(p);
  const double x = j;
  const double lc = detail::stirling_error(nd) - detail::stirling_error(x) -
                    detail::stirling_error(nd - x) - detail::deviance(x, nd * p) -
                    detail::deviance(nd - x, nd * q);
  const double lf =
      std::log(2.0 * std::numbers::pi) + std::log(x) + std::log1p(-x / nd);
  return lc - 0.5 * lf;
}

/// P(Bin(n,p) <= k). Sums whichever tail lies away from the mean, smallest
/// terms first.
inline double binomial_cdf(int n, double p, int k) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(Errc::DomainError, "binomial p must lie in [0,1]");
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (static_cast<double>(k) < n * p) {
    double s = 0.0;
    for (int j = 0; j <= k; ++j) s += std::exp(binomial_log_pmf(n, p, j));
    return s;
  }
  double upper = 0.0;
  for (int j = n; j > k; --j) upper += std::exp(binomial_log_pmf(n, p, j));
  return 1.0 - upper;
}

/// Exhaustive sum over all 2^n increment sequences; a test oracle for
/// walk_distribution.
inline WalkDistribution enumerate_paths_oracle(const Environment& env, int n) {
  if (n > kMaxEnumerationSteps)
    throw Error(Errc::TooLarge, "path enumeration limited to n <= " +
                                    std::to_string(kMaxEnumerationSteps));
  detail::check_evolve_range(env, n);
  std::vector<std::vector<double>> rows;
  for (int m = 1; m <= n; ++m) rows.push_back(env.row(m));
  std::vector<double> probs(static_cast<std::size_t>(n) + 1, 0.0);
  const std::uint32_t paths = 1u << n;
  for (std::uint32_t mask = 0; mask < paths; ++mask) {
    int x = 0;
    double w = 1.0;
    for (int m = 1; m <= n; ++m) {
      const double p = rows[m - 1][x];
      if ((mask >> (m - 1)) & 1u) {
        w *= p;
        ++x;
      } else {
        w *= 1.0 - p;
      }
    }
    probs[x] += w;
  }
  return WalkDistribution{std::move(probs)};
}

/// Quenched trajectories in `env`. Replica r consumes uniforms keyed by
/// (seed, r, m), so the result does not depend on `threads`.
inline WalkSample simulate_walk(const Environment& env, int n, int replicas,
                                std::uint64_t seed, unsigned threads = 1) {
  if (replicas < 1) throw Error(Errc::DomainError, "replicas must be >= 1");
  detail::check_evolve_range(env, n);
  WalkSample out{seed, n, std::vector<int>(static_cast<std::size_t>(replicas))};
  auto run = [&](int begin, int end) {
    for (int r = begin; r < end; ++r) {
      const auto key = rng::row_key(seed, rng::Stream::Walk, r);
      int x = 0;
      for (int m = 1; m <= n; ++m)
        if (rng::to_open_unit(rng::bits(key, m)) <= env(m, x + 1)) ++x;
      out.values[r] = x;
    }
  };
  threads = std::clamp(threads, 1u, static_cast<unsigned>(replicas));
  if (threads == 1) {
    run(0, replicas);
    return out;
  }
  std::vector<std::jthread> pool;
  const int chunk = (replicas + static_cast<int>(threads) - 1) /
                    static_cast<int>(threads);
  for (int b = 0; b < replicas; b += chunk)
    pool.emplace_back(run, b, std::min(replicas, b + chunk));
  pool.clear();
  return out;
}

/// max_k |a_{n,k} - P(x_n <= k-1)|.
inline RepresentationReport verify_representation(const Partition& part,
                                                  const WalkDistribution& dist) {
  if (part.n() != dist.n())
    throw Error(Errc::SizeMismatch, "partition has n=" +
                                        std::to_string(part.n()) +
                                        ", walk has n=" + std::to_string(dist.n()));
  RepresentationReport rep;
  double cdf = 0.0;
  for (int k = 1; k <= part.n(); ++k) {
    cdf += dist.probs[k - 1];
    const double err = std::abs(part.points[k - 1] - cdf);
    if (err > rep.max_abs_err) {
      rep.max_abs_err = err;
      rep.worst_k = k;
    }
  }
  return rep;
}

/// Header `k,prob,cdf`.
inline void write_walk_distribution_csv(std::ostream& os,
                                        const WalkDistribution& dist) {
  os << "k,prob,cdf\n";
  double cdf = 0.0;
  for (int k = 0; k <= dist.n(); ++k) {
    cdf += dist.probs[k];
    csv::row(os, k, dist.probs[k], k == dist.n() ? 1.0 : cdf);
  }
}

/// Header `replica,x_n`; replicas numbered from 0 as in the RNG key.
inline void write_walk_sample_csv(std::ostream& os, const WalkSample& sample) {
  os << "replica,x_n\n";
  for (int r = 0; r < sample.replicas(); ++r) csv::row(os, r, sample.values[r]);
}

}  // namespace fragerase
