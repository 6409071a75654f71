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

// Limit-theory diagnostics for the break-point measure g_n.
//
// Bulk: n g_n([x,y]) / sigma_n -> Q(y) - Q(x) for 0 < x <= y < 1.
//
// Endpoints: for H the limiting law of the proportions,
//   Lambda(theta) = int log(1 - t + t e^theta) H(dt),
//   I(alpha)      = alpha theta(alpha) - Lambda(theta(alpha)),
// with theta(alpha) the root of Lambda'(theta) = alpha. The pushforward of
// g_n under x -> x^{1/n} converges to the law with CDF alpha_I(x) on
// (x_*, 1), where I(alpha_I(x)) = log(1/x) and x_* = exp(-I(0)).

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "fragerase/csv.hpp"
#include "fragerase/error.hpp"
#include "fragerase/fragmenter.hpp"
#include "fragerase/measure.hpp"
#include "fragerase/normal.hpp"
#include "fragerase/proportions.hpp"

namespace fragerase {

// ---------------------------------------------------------------- bulk ----

struct BulkScaling {
  double center;  // m_n
  double sigma;   // sigma_n
};

/// Regime-specific centering and spread: (sum p_k, sqrt(s_n)) for
/// deterministic rules, (n pbar, sqrt(n s)) for the random ones.
inline BulkScaling make_bulk_scaling(const SplittingRule& rule, int n) {
  const double var = step_variance_param(rule, n);
  if (!(var > 0.0))
    throw Error(Errc::DegenerateVariance,
                "sigma_n = 0: every proportion is 0 or 1");
  return {step_mean_param(rule, n), std::sqrt(var)};
}

struct BulkRow {
  double x;
  double y;
  double scaled_mass;
  double limit;
  double abs_err;
};

/// n g_n([x,y]) / sigma_n against Q(y) - Q(x) on each grid pair; with
/// `closed` false the intervals are [x,y).
inline std::vector<BulkRow> bulk_deviation(
    const Partition& part, const BulkScaling& sc,
    std::span<const std::pair<double, double>> grid, bool closed = true) {
  if (!(sc.sigma > 0.0))
    throw Error(Errc::DegenerateVariance, "sigma_n must be positive");
  std::vector<BulkRow> rows;
  rows.reserve(grid.size());
  for (const auto& [x, y] : grid) {
    if (!(x > 0.0 && y < 1.0 && x <= y))
      throw Error(Errc::BadGrid, "bulk pairs need 0 < x <= y < 1, got (" +
                                     csv::fmt(x) + ", " + csv::fmt(y) + ")");
    const double mass =
        measure_of(part, closed ? EmpiricalQuery::closed(x, y)
                                : EmpiricalQuery::half_open(x, y));
    const double scaled = mass * part.n() / sc.sigma;
    const double limit = normal_quantile(y) - normal_quantile(x);
    rows.push_back({x, y, scaled, limit, std::abs(scaled - limit)});
  }
  return rows;
}

// ------------------------------------------------- cumulant generating ----

namespace detail {

// log(1 - t + t e^theta), accurate for theta in [-745, 745] and t near 0 or 1.
inline double log_mix(double t, double theta) noexcept {
  if (t == 0.0) return 0.0;
  if (t == 1.0) return theta;
  if (theta > 0.0) return theta + log_mix(1.0 - t, -theta);
  const double y = t * std::expm1(theta);
  if (y > -0.5) return std::log1p(y);
  return std::log((1.0 - t) + t * std::exp(theta));
}

// t e^theta / (1 - t + t e^theta).
inline double tilted_mean(double t, double theta) noexcept {
  if (t == 0.0) return 0.0;
  if (t == 1.0) return 1.0;
  if (theta > 0.0) return t / (t + (1.0 - t) * std::exp(-theta));
  const double e = t * std::exp(theta);
  return e / ((1.0 - t) + e);
}

}  // namespace detail

/// Lambda(theta) = sum_i w_i log(1 - t_i + t_i e^theta).
inline double lambda_fn(const AtomicMeasure& h, double theta) noexcept {
  double s = 0.0;
  for (const auto& a : h.atoms()) s += a.weight * detail::log_mix(a.location, theta);
  return s;
}

/// Lambda'(theta); increases strictly when H charges (0,1).
inline double lambda_prime(const AtomicMeasure& h, double theta) noexcept {
  double s = 0.0;
  for (const auto& a : h.atoms())
    s += a.weight * detail::tilted_mean(a.location, theta);
  return s;
}

/// Lambda''(theta) = sum_i w_i m_i (1 - m_i) with m_i the tilted mean.
inline double lambda_second(const AtomicMeasure& h, double theta) noexcept {
  double s = 0.0;
  for (const auto& a : h.atoms()) {
    const double m = detail::tilted_mean(a.location, theta);
    s += a.weight * m * (1.0 - m);
  }
  return s;
}

struct ThetaSolution {
  double theta;
  double residual;  // |Lambda'(theta) - alpha|
};

inline constexpr double kThetaBound = 745.0;

/// Root of Lambda'(theta) = alpha. Attainable alphas form the open interval
/// (H{1}, 1 - H{0}); anything else, or a root beyond |theta| = 745, raises
/// AlphaOutOfRange.
inline ThetaSolution solve_theta(const AtomicMeasure& h, double alpha) {
  const double floor = h.mass_at(1.0);
  const double ceil = 1.0 - h.mass_at(0.0);
  if (!h.charges_interior() || !(alpha > floor && alpha < ceil))
    throw Error(Errc::AlphaOutOfRange,
                "alpha = " + csv::fmt(alpha) + " outside (" + csv::fmt(floor) +
                    ", " + csv::fmt(ceil) + ")");
  auto f = [&](double th) { return lambda_prime(h, th) - alpha; };
  double lo = -kThetaBound, hi = kThetaBound;
  if (f(lo) > 0.0 || f(hi) < 0.0)
    throw Error(Errc::AlphaOutOfRange,
                "theta(" + csv::fmt(alpha) + ") lies beyond +-745");

  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  double theta = 0.5 * (lo + hi);
  double r = f(theta);
  for (int i = 0; i < 3 && r != 0.0; ++i) {
    const double d = lambda_second(h, theta);
    if (!(d > 0.0)) break;
    const double cand = theta - r / d;
    const double rc = f(cand);
    if (!(std::abs(rc) < std::abs(r))) break;
    theta = cand;
    r = rc;
  }
  return {theta, std::abs(r)};
}

// ------------------------------------------------------- rate function ----

struct EndpointEdge {
  double I0;      // lim_{alpha -> 0+} I(alpha); +inf when H{1} > 0
  double x_star;  // exp(-I0)
};

/// I(0) = -int log(1-t) H(dt) and x_* = exp(-I(0)).
inline EndpointEdge rate_I0_and_xstar(const AtomicMeasure& h) noexcept {
  if (h.mass_at(1.0) > 0.0)
    return {std::numeric_limits<double>::infinity(), 0.0};
  double s = 0.0;
  for (const auto& a : h.atoms()) s -= a.weight * std::log1p(-a.location);
  return {s, std::exp(-s)};
}

/// Everything needed to evaluate I, alpha_I and the endpoint limit for H.
///
/// When H{1} > 0 the rate is infinite below alpha_lo = H{1}: that fraction
/// of break points sits exactly at 0, the limit law has an atom of mass
/// alpha_lo at 0, and its continuous part starts at x_floor = exp(-I_floor)
/// with I_floor = lim_{alpha -> alpha_lo+} I(alpha). Without an atom at 1,
/// alpha_lo = 0, I_floor = I0 and x_floor = x_star.
struct RateProfile {
  AtomicMeasure H;
  double p_bar;
  double I0;
  double x_star;
  double alpha_lo;
  double alpha_hi;
  double I_floor;
  double x_floor;
};

inline RateProfile make_rate_profile(AtomicMeasure h) {
  if (!h.charges_interior())
    throw Error(Errc::InvalidMeasure, "H must charge (0,1): H({0,1}) < 1");
  const auto edge = rate_I0_and_xstar(h);
  double i_floor = 0.0;
  for (const auto& a : h.atoms())
    if (a.location < 1.0) i_floor -= a.weight * std::log1p(-a.location);
  const double p_bar = h.mean();
  const double lo = h.mass_at(1.0);
  const double hi = 1.0 - h.mass_at(0.0);
  return RateProfile{std::move(h), p_bar,   edge.I0,         edge.x_star,
                     lo,           hi,      i_floor,         std::exp(-i_floor)};
}

struct RateRow {
  double alpha;
  double theta;
  double I;
};

inline RateRow rate_row(const RateProfile& profile, double alpha) {
  const auto sol = solve_theta(profile.H, alpha);
  const double v = alpha * sol.theta - lambda_fn(profile.H, sol.theta);
  return {alpha, sol.theta, std::max(0.0, v)};
}

/// I(alpha) = alpha theta(alpha) - Lambda(theta(alpha)), clamped at 0.
inline double rate_I(const RateProfile& profile, double alpha) {
  return rate_row(profile, alpha).I;
}

/// The alpha in (alpha_lo, p_bar] with I(alpha) = log(1/x), by bisection.
/// Requires x_floor < x < 1.
inline double alpha_I(const RateProfile& profile, double x) {
  if (!(x > profile.x_floor && x < 1.0))
    throw Error(Errc::XOutOfRange, "alpha_I needs " +
                                       csv::fmt(profile.x_floor) + " < x < 1, got " +
                                       csv::fmt(x));
  const double target = -std::log(x);
  double lo = profile.alpha_lo;
  double hi = profile.p_bar;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double value;
    try {
      value = rate_I(profile, mid);
    } catch (const Error& e) {
      // theta(mid) beyond the bracket: mid hugs alpha_lo, where I ~ I_floor.
      if (e.code() != Errc::AlphaOutOfRange) throw;
      value = profile.I_floor;
    }
    (value > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// CDF of the endpoint limit law: alpha_lo on [0, x_floor], alpha_I(x) on
/// (x_floor, 1), and 1 at x = 1 (the atom 1 - p_bar sits at 1).
inline double tilde_g_cdf(const RateProfile& profile, double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw Error(Errc::XOutOfRange, "x must lie in [0,1]");
  if (x == 1.0) return 1.0;
  if (x <= profile.x_floor) return profile.alpha_lo;
  return alpha_I(profile, x);
}

// ------------------------------------------------------------ annealed ----

/// Binomial rate alpha log(alpha/pbar) + (1-alpha) log((1-alpha)/(1-pbar)),
/// with 0 log 0 = 0.
inline double annealed_rate(double p_bar, double alpha) {
  if (!(p_bar > 0.0 && p_bar < 1.0))
    throw Error(Errc::DomainError, "annealed rate needs 0 < pbar < 1");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw Error(Errc::AlphaOutOfRange, "annealed rate needs alpha in [0,1]");
  double s = 0.0;
  if (alpha > 0.0) s += alpha * std::log(alpha / p_bar);
  if (alpha < 1.0) s += (1.0 - alpha) * std::log((1.0 - alpha) / (1.0 - p_bar));
  return std::max(0.0, s);
}

/// alpha in [0, pbar] solving I_a(alpha) = log(1/x), for 1-pbar <= x <= 1.
inline double annealed_alpha(double p_bar, double x) {
  if (!(p_bar > 0.0 && p_bar < 1.0))
    throw Error(Errc::DomainError, "annealed bound needs 0 < pbar < 1");
  if (!(x >= 1.0 - p_bar && x <= 1.0))
    throw Error(Errc::XOutOfRange, "annealed bound needs 1-pbar <= x <= 1");
  if (x == 1.0) return p_bar;
  if (x == 1.0 - p_bar) return 0.0;
  const double target = -std::log(x);
  double lo = 0.0, hi = p_bar;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (annealed_rate(p_bar, mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// F_a(x) = alpha_a(x) / pbar on [1-pbar, 1].
inline double annealed_cdf_bound(double p_bar, double x) {
  return annealed_alpha(p_bar, x) / p_bar;
}

// --------------------------------------------------------- diagnostics ----

struct EndpointRow {
  double x;
  double empirical;
  double limit;
  double abs_err;
};

inline std::vector<EndpointRow> endpoint_deviation(const LogPartition& lp,
                                                   const RateProfile& profile,
                                                   std::span<const double> xs,
                                                   bool closed = true) {
  std::vector<EndpointRow> rows;
  rows.reserve(xs.size());
  for (double x : xs) {
    if (!(x > 0.0 && x < 1.0))
      throw Error(Errc::XOutOfRange, "endpoint grid must lie in (0,1)");
    const double emp = transformed_cdf(lp, x, closed);
    const double lim = tilde_g_cdf(profile, x);
    rows.push_back({x, emp, lim, std::abs(emp - lim)});
  }
  return rows;
}

struct AnnealedEndpointRow {
  double x;
  double empirical;
  double annealed_bound;  // NaN below 1 - pbar, where F_a is undefined
};

/// Fully random environments have no closed-form limit; report the
/// empirical transformed CDF next to the annealed envelope.
inline std::vector<AnnealedEndpointRow> endpoint_annealed(
    const LogPartition& lp, double p_bar, std::span<const double> xs,
    bool closed = true) {
  std::vector<AnnealedEndpointRow> rows;
  for (double x : xs) {
    if (!(x > 0.0 && x < 1.0))
      throw Error(Errc::XOutOfRange, "endpoint grid must lie in (0,1)");
    const double bound = x >= 1.0 - p_bar
                             ? annealed_cdf_bound(p_bar, x)
                             : std::numeric_limits<double>::quiet_NaN();
    rows.push_back({x, transformed_cdf(lp, x, closed), bound});
  }
  return rows;
}

inline void write_bulk_csv(std::ostream& os, std::span<const BulkRow> rows) {
  os << "x,y,scaled_mass,limit,abs_err\n";
  for (const auto& r : rows) csv::row(os, r.x, r.y, r.scaled_mass, r.limit, r.abs_err);
}

inline void write_endpoint_csv(std::ostream& os,
                               std::span<const EndpointRow> rows) {
  os << "x,empirical,limit,abs_err\n";
  for (const auto& r : rows) csv::row(os, r.x, r.empirical, r.limit, r.abs_err);
}

inline void write_endpoint_annealed_csv(
    std::ostream& os, std::span<const AnnealedEndpointRow> rows) {
  os << "x,empirical,annealed_bound\n";
  for (const auto& r : rows) csv::row(os, r.x, r.empirical, r.annealed_bound);
}

inline void write_rate_csv(std::ostream& os, std::span<const RateRow> rows) {
  os << "alpha,theta,I\n";
  for (const auto& r : rows) csv::row(os, r.alpha, r.theta, r.I);
}

}  // namespace fragerase
