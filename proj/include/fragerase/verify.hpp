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

// Oracle battery behind the `verify` command. Each check compares two
// independent routes to the same quantity and reports the worst deviation.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fragerase/fragmenter.hpp"
#include "fragerase/limits.hpp"
#include "fragerase/proportions.hpp"
#include "fragerase/walk.hpp"

namespace fragerase {

struct VerifyOptions {
  int max_enum_n = 14;
  int representation_n = 200;
  int representation_seeds = 20;
  int structure_n = 200;
  /// Added to every break point before comparison; a nonzero value must
  /// make the battery fail.
  double perturb = 0.0;
};

struct CheckResult {
  std::string name;
  bool passed;
  double max_err;
  double tolerance;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool all_passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.passed; });
  }
};

namespace detail {

inline std::vector<SplittingRule> battery_rules() {
  std::vector<double> seq;
  for (int m = 1; m <= 512; ++m) seq.push_back(m % 3 == 0 ? 0.8 : 0.25);
  return {
      SplittingRule::constant(0.3),
      SplittingRule::sequence(std::move(seq)),
      SplittingRule::random_stratified(ProportionDistribution::uniform()),
      SplittingRule::random_stratified(
          ProportionDistribution::two_point(0.0, 0.7, 0.3)),
      SplittingRule::fully_random(ProportionDistribution::uniform()),
      SplittingRule::fully_random(
          ProportionDistribution::two_point(0.2, 1.0, 0.5)),
  };
}

inline CheckResult make_check(std::string name, double err, double tol) {
  return {std::move(name), err <= tol, err, tol};
}

inline void perturb_points(Partition& part, double eps) {
  if (eps == 0.0) return;
  for (double& a : part.points) a += eps;
}

}  // namespace detail

/// a_{n,k} = P(x_n <= k-1) across every regime.
inline CheckResult check_representation(const VerifyOptions& opt) {
  double worst = 0.0;
  for (const auto& rule : detail::battery_rules()) {
    const int seeds = rule.is_random() ? opt.representation_seeds : 1;
    for (int s = 0; s < seeds; ++s) {
      const auto env = realize_environment(rule, opt.representation_n, 1000 + s);
      auto part = evolve(env, opt.representation_n);
      detail::perturb_points(part, opt.perturb);
      const auto dist = walk_distribution(env, opt.representation_n);
      worst = std::max(worst, verify_representation(part, dist).max_abs_err);
    }
  }
  return detail::make_check("representation_identity", worst, 1e-11);
}

/// DP walk law against exhaustive path enumeration.
inline CheckResult check_path_enumeration(const VerifyOptions& opt) {
  const int top = std::min(opt.max_enum_n, kMaxEnumerationSteps);
  double worst = 0.0;
  for (const auto& rule : detail::battery_rules()) {
    const auto env = realize_environment(rule, std::max(top, 1), 77);
    for (int n = 1; n <= top; ++n) {
      const auto dp = walk_distribution(env, n);
      const auto brute = enumerate_paths_oracle(env, n);
      for (int j = 0; j <= n; ++j)
        worst = std::max(worst, std::abs(dp.probs[j] - brute.probs[j]));
    }
  }
  return detail::make_check("path_enumeration", worst, 1e-12);
}

/// Constant p: break points equal the Binomial(n,p) CDF.
inline CheckResult check_binomial_reduction(const VerifyOptions& opt) {
  double worst = 0.0;
  for (int i = 1; i <= 9; ++i) {
    const double p = i / 10.0;
    const auto env = realize_environment(SplittingRule::constant(p), 50, 0);
    evolve(env, 50, [&](int m, std::span<const double> pts) {
      for (int k = 1; k <= m; ++k) {
        const double a = pts[k - 1] + opt.perturb;
        worst = std::max(worst, std::abs(a - binomial_cdf(m, p, k - 1)));
      }
    });
  }
  return detail::make_check("binomial_reduction", worst, 1e-12);
}

/// Ordering, unit total length and a_{n,k} in [a_{n-1,k-1}, a_{n-1,k}].
inline CheckResult check_partition_structure(const VerifyOptions& opt) {
  double worst = 0.0;
  for (const auto& rule : detail::battery_rules()) {
    const auto env = realize_environment(rule, opt.structure_n, 5);
    std::vector<double> prev;
    evolve(env, opt.structure_n, [&](int m, std::span<const double> pts) {
      double prev_pt = 0.0, total = 0.0;
      for (int k = 1; k <= m; ++k) {
        const double a = pts[k - 1] + opt.perturb;
        worst = std::max(worst, prev_pt - a);  // > 0 only when unsorted
        total += a - prev_pt;
        prev_pt = a;
        const double left = k >= 2 ? prev[k - 2] : 0.0;
        const double right = k <= m - 1 ? prev[k - 1] : 1.0;
        worst = std::max({worst, left - a, a - right});
      }
      total += 1.0 - prev_pt;
      worst = std::max(worst, std::abs(total - 1.0));
      prev.assign(pts.begin(), pts.end());
    });
  }
  return detail::make_check("partition_structure", worst, 1e-12);
}

/// exp(evolve_log) against evolve wherever the linear value is above 1e-290.
inline CheckResult check_log_linear(const VerifyOptions& opt) {
  double worst = 0.0;
  for (const auto& rule : detail::battery_rules()) {
    const auto env = realize_environment(rule, opt.structure_n, 9);
    auto lin = evolve(env, opt.structure_n);
    detail::perturb_points(lin, opt.perturb);
    const auto lg = evolve_log(env, opt.structure_n);
    for (int k = 0; k < lin.n(); ++k) {
      const double a = lin.points[k];
      if (a > 1e-290)
        worst = std::max(worst, std::abs(std::exp(lg.log_points[k]) - a) / a);
    }
  }
  return detail::make_check("log_linear_agreement", worst, 1e-10);
}

/// Walk law keeps unit mass and nonnegative probabilities at every step.
inline CheckResult check_walk_mass(const VerifyOptions& opt) {
  double worst = 0.0;
  for (const auto& rule : detail::battery_rules()) {
    const auto env = realize_environment(rule, opt.structure_n, 11);
    for (int n = 1; n <= opt.structure_n; n += 17) {
      const auto d = walk_distribution(env, n);
      double total = 0.0;
      for (double q : d.probs) {
        worst = std::max(worst, -q);
        total += q;
      }
      worst = std::max(worst, std::abs(total - 1.0));
    }
  }
  return detail::make_check("walk_mass_conservation", worst, 1e-12);
}

/// alpha_I(exp(-I(alpha))) = alpha.
inline CheckResult check_duality(const VerifyOptions&) {
  const std::vector<AtomicMeasure> measures = {
      AtomicMeasure::point_mass(0.5),
      AtomicMeasure::from_atoms({{0.2, 0.5}, {0.8, 0.5}}),
      ProportionDistribution::uniform().to_measure(256),
  };
  double worst = 0.0;
  for (const auto& h : measures) {
    const auto prof = make_rate_profile(h);
    for (int i = 1; i < 20; ++i) {
      const double alpha = prof.p_bar * i / 20.0;
      const double x = std::exp(-rate_I(prof, alpha));
      worst = std::max(worst, std::abs(alpha_I(prof, x) - alpha));
    }
  }
  return detail::make_check("duality_round_trip", worst, 1e-8);
}

/// Point-mass H: the Legendre route equals the binomial KL closed form.
inline CheckResult check_point_mass_reduction(const VerifyOptions&) {
  double worst = 0.0;
  for (double p : {0.2, 0.5, 0.7}) {
    const auto prof = make_rate_profile(AtomicMeasure::point_mass(p));
    for (int i = 1; i < 50; ++i) {
      const double alpha = i / 50.0;
      worst = std::max(worst, std::abs(rate_I(prof, alpha) - annealed_rate(p, alpha)));
    }
  }
  return detail::make_check("point_mass_reduction", worst, 1e-10);
}

inline VerifyReport run_oracle_battery(const VerifyOptions& opt = {}) {
  VerifyReport rep;
  rep.checks.push_back(check_representation(opt));
  rep.checks.push_back(check_path_enumeration(opt));
  rep.checks.push_back(check_binomial_reduction(opt));
  rep.checks.push_back(check_partition_structure(opt));
  rep.checks.push_back(check_log_linear(opt));
  rep.checks.push_back(check_walk_mass(opt));
  rep.checks.push_back(check_duality(opt));
  rep.checks.push_back(check_point_mass_reduction(opt));
  return rep;
}

}  // namespace fragerase
