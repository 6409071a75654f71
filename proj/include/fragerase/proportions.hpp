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

// Splitting proportions: their laws, the rules that generate p_{n,k} for the
// three fragmentation regimes, and realized environments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fragerase/counter_rng.hpp"
#include "fragerase/error.hpp"
#include "fragerase/measure.hpp"

namespace fragerase {

inline constexpr std::size_t kDefaultAtomCount = 4096;

namespace detail {

inline bool is_proportion(double p) noexcept { return p >= 0.0 && p <= 1.0; }

inline void require_proportion(double p, const char* what) {
  if (!is_proportion(p)) {
    std::ostringstream os;
    os << what << " = " << p << " is not in [0,1]";
    throw Error(Errc::InvalidProportion, os.str());
  }
}

}  // namespace detail

/// Law of a single splitting proportion.
class ProportionDistribution {
 public:
  struct PointMass {
    double value;
  };
  struct TwoPoint {
    double v1;
    double v2;
    double w1;
  };
  struct Uniform01 {};
  struct Atoms {
    std::vector<Atom> atoms;  // sorted by location
  };
  using Variant = std::variant<PointMass, TwoPoint, Uniform01, Atoms>;

  static ProportionDistribution point_mass(double v) {
    detail::require_proportion(v, "point mass");
    return ProportionDistribution(PointMass{v});
  }

  static ProportionDistribution two_point(double v1, double v2, double w1) {
    detail::require_proportion(v1, "two-point v1");
    detail::require_proportion(v2, "two-point v2");
    if (!(w1 >= 0.0 && w1 <= 1.0))
      throw Error(Errc::InvalidMeasure, "two-point weight not in [0,1]");
    return ProportionDistribution(TwoPoint{v1, v2, w1});
  }

  static ProportionDistribution uniform() {
    return ProportionDistribution(Uniform01{});
  }

  static ProportionDistribution atoms(std::vector<Atom> atoms) {
    double total = 0.0;
    for (const auto& a : atoms) {
      detail::require_proportion(a.location, "atom location");
      if (!(a.weight >= 0.0))
        throw Error(Errc::InvalidMeasure, "negative atom weight");
      total += a.weight;
    }
    if (atoms.empty() ||
        std::abs(total - 1.0) > AtomicMeasure::kMassTolerance)
      throw Error(Errc::InvalidMeasure, "atom weights do not sum to 1");
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const Atom& l, const Atom& r) {
                       return l.location < r.location;
                     });
    return ProportionDistribution(Atoms{std::move(atoms)});
  }

  const Variant& variant() const noexcept { return v_; }

  /// Generalized inverse CDF at u in (0,1).
  double quantile(double u) const noexcept {
    return std::visit(
        [u](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, PointMass>) {
            return d.value;
          } else if constexpr (std::is_same_v<T, TwoPoint>) {
            return u < d.w1 ? d.v1 : d.v2;
          } else if constexpr (std::is_same_v<T, Uniform01>) {
            return u;
          } else {
            double cum = 0.0;
            for (std::size_t i = 0; i + 1 < d.atoms.size(); ++i) {
              cum += d.atoms[i].weight;
              if (u < cum) return d.atoms[i].location;
            }
            return d.atoms.back().location;
          }
        },
        v_);
  }

  double mean() const noexcept {
    return std::visit(
        [](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, PointMass>) {
            return d.value;
          } else if constexpr (std::is_same_v<T, TwoPoint>) {
            return d.w1 * d.v1 + (1.0 - d.w1) * d.v2;
          } else if constexpr (std::is_same_v<T, Uniform01>) {
            return 0.5;
          } else {
            double s = 0.0;
            for (const auto& a : d.atoms) s += a.location * a.weight;
            return s;
          }
        },
        v_);
  }

  /// E[P(1-P)].
  double mean_bernoulli_variance() const noexcept {
    auto f = [](double t) { return t * (1.0 - t); };
    return std::visit(
        [&](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, PointMass>) {
            return f(d.value);
          } else if constexpr (std::is_same_v<T, TwoPoint>) {
            return d.w1 * f(d.v1) + (1.0 - d.w1) * f(d.v2);
          } else if constexpr (std::is_same_v<T, Uniform01>) {
            return 1.0 / 6.0;
          } else {
            double s = 0.0;
            for (const auto& a : d.atoms) s += f(a.location) * a.weight;
            return s;
          }
        },
        v_);
  }

  /// Atomic representation. Uniform01 is discretized by the midpoint rule
  /// with `uniform_atoms` cells; the log(1-t) singularity at t=1 makes the
  /// resulting x_* biased by O(log m / m).
  AtomicMeasure to_measure(std::size_t uniform_atoms = kDefaultAtomCount) const {
    return std::visit(
        [&](const auto& d) -> AtomicMeasure {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, PointMass>) {
            return AtomicMeasure::point_mass(d.value);
          } else if constexpr (std::is_same_v<T, TwoPoint>) {
            return AtomicMeasure::from_atoms(
                {{d.v1, d.w1}, {d.v2, 1.0 - d.w1}});
          } else if constexpr (std::is_same_v<T, Uniform01>) {
            if (uniform_atoms == 0)
              throw Error(Errc::InvalidMeasure, "atom count must be >= 1");
            std::vector<Atom> atoms(uniform_atoms);
            const double m = static_cast<double>(uniform_atoms);
            for (std::size_t i = 0; i < uniform_atoms; ++i)
              atoms[i] = {(static_cast<double>(i) + 0.5) / m, 1.0 / m};
            return AtomicMeasure::from_atoms(std::move(atoms));
          } else {
            return AtomicMeasure::from_atoms(d.atoms);
          }
        },
        v_);
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, PointMass>) {
            os << "point(" << d.value << ")";
          } else if constexpr (std::is_same_v<T, TwoPoint>) {
            os << "twopoint(" << d.v1 << "," << d.v2 << ",w1=" << d.w1 << ")";
          } else if constexpr (std::is_same_v<T, Uniform01>) {
            os << "uniform(0,1)";
          } else {
            os << "atoms(" << d.atoms.size() << ")";
          }
        },
        v_);
    return os.str();
  }

 private:
  explicit ProportionDistribution(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

inline double mean_proportion(const ProportionDistribution& dist) noexcept {
  return dist.mean();
}

/// How the proportions p_{n,k} are produced.
class SplittingRule {
 public:
  struct Constant {
    double p;
  };
  struct DeterministicSequence {
    std::vector<double> values;  // values[n-1] = p_n
  };
  struct RandomStratified {
    ProportionDistribution dist;
  };
  struct FullyRandom {
    ProportionDistribution dist;
  };
  struct ExplicitTable {
    std::vector<std::vector<double>> rows;  // rows[n-1][k-1]; NaN = missing
  };
  using Variant = std::variant<Constant, DeterministicSequence,
                               RandomStratified, FullyRandom, ExplicitTable>;

  static SplittingRule constant(double p) {
    detail::require_proportion(p, "constant proportion");
    return SplittingRule(Constant{p});
  }

  static SplittingRule sequence(std::vector<double> values) {
    for (double v : values) detail::require_proportion(v, "sequence entry");
    return SplittingRule(DeterministicSequence{std::move(values)});
  }

  static SplittingRule random_stratified(ProportionDistribution dist) {
    return SplittingRule(RandomStratified{std::move(dist)});
  }

  static SplittingRule fully_random(ProportionDistribution dist) {
    return SplittingRule(FullyRandom{std::move(dist)});
  }

  /// Triangular table; rows[n-1] holds p_{n,1..n}. Missing entries are NaN
  /// and only rejected when an environment needs them.
  static SplittingRule table(std::vector<std::vector<double>> rows) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() > i + 1)
        throw Error(Errc::BadRuleSpec, "table row " + std::to_string(i + 1) +
                                           " has more than n entries");
      for (double v : rows[i])
        if (!std::isnan(v)) detail::require_proportion(v, "table entry");
    }
    return SplittingRule(ExplicitTable{std::move(rows)});
  }

  struct TableEntry {
    int n;
    int k;
    double p;
  };

  static SplittingRule table(std::span<const TableEntry> entries) {
    std::vector<std::vector<double>> rows;
    for (const auto& e : entries) {
      if (e.n < 1 || e.k < 1 || e.k > e.n)
        throw Error(Errc::BadRuleSpec, "table index (" + std::to_string(e.n) +
                                           "," + std::to_string(e.k) +
                                           ") outside 1<=k<=n");
      if (rows.size() < static_cast<std::size_t>(e.n)) rows.resize(e.n);
      auto& row = rows[e.n - 1];
      if (row.size() < static_cast<std::size_t>(e.n))
        row.resize(e.n, std::numeric_limits<double>::quiet_NaN());
      row[e.k - 1] = e.p;
    }
    return table(std::move(rows));
  }

  const Variant& variant() const noexcept { return v_; }

  bool is_random() const noexcept {
    return std::holds_alternative<RandomStratified>(v_) ||
           std::holds_alternative<FullyRandom>(v_);
  }

  bool is_fully_random() const noexcept {
    return std::holds_alternative<FullyRandom>(v_);
  }

  /// Whether p_{n,k} is k-independent. A table counts as stratified when
  /// every complete row is constant.
  bool is_stratified() const noexcept {
    if (const auto* t = std::get_if<ExplicitTable>(&v_)) {
      for (const auto& row : t->rows)
        for (double v : row)
          if (!(v == row.front())) return false;
      return true;
    }
    return !std::holds_alternative<FullyRandom>(v_);
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, Constant>) {
            os << "constant(" << r.p << ")";
          } else if constexpr (std::is_same_v<T, DeterministicSequence>) {
            os << "sequence(" << r.values.size() << " values)";
          } else if constexpr (std::is_same_v<T, RandomStratified>) {
            os << "random-stratified(" << r.dist.describe() << ")";
          } else if constexpr (std::is_same_v<T, FullyRandom>) {
            os << "fully-random(" << r.dist.describe() << ")";
          } else {
            os << "table(" << r.rows.size() << " rows)";
          }
        },
        v_);
    return os.str();
  }

 private:
  explicit SplittingRule(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// A realized family p_{n,k}, 1 <= k <= n <= n_max. Immutable; copies share
/// storage.
class Environment {
 public:
  int n_max() const noexcept { return n_max_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const SplittingRule& rule() const noexcept { return *rule_; }

  /// True when every row is k-independent.
  bool stratified() const noexcept { return !row_values_->empty(); }

  double operator()(int n, int k) const {
    check_index(n, k);
    if (stratified()) return (*row_values_)[n - 1];
    if (!table_rows_->empty()) return (*table_rows_)[n - 1][k - 1];
    return fully_random_draw(rng::row_key(seed_, rng::Stream::Environment, n),
                             k);
  }

  /// Common value of row n; only meaningful when stratified().
  double row_value(int n) const {
    if (!stratified())
      throw Error(Errc::NotStratified, "rows of this environment vary in k");
    check_index(n, 1);
    return (*row_values_)[n - 1];
  }

  /// Writes p_{n,1..n} into out[0..n-1].
  void fill_row(int n, std::span<double> out) const {
    check_index(n, 1);
    if (out.size() != static_cast<std::size_t>(n))
      throw Error(Errc::RowLengthMismatch, "row buffer must have n entries");
    if (stratified()) {
      std::fill(out.begin(), out.end(), (*row_values_)[n - 1]);
    } else if (!table_rows_->empty()) {
      const auto& row = (*table_rows_)[n - 1];
      std::copy(row.begin(), row.end(), out.begin());
    } else {
      const std::uint64_t key =
          rng::row_key(seed_, rng::Stream::Environment, n);
      if (uniform_draws_) {
        for (int k = 1; k <= n; ++k)
          out[k - 1] = rng::to_open_unit(rng::bits(key, k));
      } else {
        for (int k = 1; k <= n; ++k) out[k - 1] = fully_random_draw(key, k);
      }
    }
  }

  std::vector<double> row(int n) const {
    std::vector<double> out(static_cast<std::size_t>(n));
    fill_row(n, out);
    return out;
  }

 private:
  friend Environment realize_environment(const SplittingRule&, int,
                                         std::uint64_t);

  void check_index(int n, int k) const {
    if (n < 1 || n > n_max_ || k < 1 || k > n)
      throw Error(Errc::IndexOutOfRange,
                  "p(" + std::to_string(n) + "," + std::to_string(k) +
                      ") outside environment with n_max " +
                      std::to_string(n_max_));
  }

  double fully_random_draw(std::uint64_t key, int k) const noexcept {
    const double u = rng::to_open_unit(rng::bits(key, k));
    return uniform_draws_ ? u : dist_->quantile(u);
  }

  std::shared_ptr<const SplittingRule> rule_;
  int n_max_ = 0;
  std::uint64_t seed_ = 0;
  std::shared_ptr<const std::vector<double>> row_values_;
  std::shared_ptr<const std::vector<std::vector<double>>> table_rows_;
  const ProportionDistribution* dist_ = nullptr;  // into *rule_
  bool uniform_draws_ = false;
};

/// Realizes `rule` up to row n_max. Deterministic rules ignore the seed and
/// record seed 0; random rules are a pure function of (seed, n, k).
inline Environment realize_environment(const SplittingRule& rule, int n_max,
                                       std::uint64_t seed) {
  if (n_max < 1) throw Error(Errc::IndexOutOfRange, "n_max must be >= 1");
  Environment env;
  env.rule_ = std::make_shared<const SplittingRule>(rule);
  env.n_max_ = n_max;
  env.seed_ = rule.is_random() ? seed : 0;
  auto rows = std::make_shared<std::vector<double>>();
  auto table = std::make_shared<std::vector<std::vector<double>>>();
  const auto n_sz = static_cast<std::size_t>(n_max);

  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, SplittingRule::Constant>) {
          rows->assign(n_sz, r.p);
        } else if constexpr (std::is_same_v<
                                 T, SplittingRule::DeterministicSequence>) {
          if (r.values.size() < n_sz)
            throw Error(Errc::TableTooSmall,
                        "sequence has " + std::to_string(r.values.size()) +
                            " entries, need " + std::to_string(n_max));
          rows->assign(r.values.begin(), r.values.begin() + n_max);
        } else if constexpr (std::is_same_v<T,
                                            SplittingRule::RandomStratified>) {
          rows->resize(n_sz);
          for (int n = 1; n <= n_max; ++n)
            (*rows)[n - 1] = r.dist.quantile(
                rng::uniform(seed, rng::Stream::Environment, n, 0));
        } else if constexpr (std::is_same_v<T, SplittingRule::FullyRandom>) {
          env.dist_ = &std::get<SplittingRule::FullyRandom>(
                           env.rule_->variant())
                           .dist;
          env.uniform_draws_ = std::holds_alternative<
              ProportionDistribution::Uniform01>(r.dist.variant());
        } else {
          if (r.rows.size() < n_sz)
            throw Error(Errc::TableTooSmall,
                        "table has " + std::to_string(r.rows.size()) +
                            " rows, need " + std::to_string(n_max));
          table->resize(n_sz);
          bool constant_rows = true;
          for (int n = 1; n <= n_max; ++n) {
            const auto& src = r.rows[n - 1];
            if (src.size() != static_cast<std::size_t>(n) ||
                std::any_of(src.begin(), src.end(),
                            [](double v) { return std::isnan(v); }))
              throw Error(Errc::TableTooSmall,
                          "table row " + std::to_string(n) + " is incomplete");
            (*table)[n - 1] = src;
            constant_rows =
                constant_rows && std::all_of(src.begin(), src.end(),
                                             [&](double v) {
                                               return v == src.front();
                                             });
          }
          if (constant_rows) {
            rows->resize(n_sz);
            for (int n = 1; n <= n_max; ++n)
              (*rows)[n - 1] = (*table)[n - 1].front();
            table->clear();
          }
        }
      },
      rule.variant());

  for (double v : *rows) detail::require_proportion(v, "proportion");
  env.row_values_ = std::move(rows);
  env.table_rows_ = std::move(table);
  return env;
}

/// sigma_n^2 for the bulk scaling: s_n = sum p_k(1-p_k) for deterministic
/// rules, n*E[P(1-P)] for random stratified, n*pbar(1-pbar) for fully random.
inline double step_variance_param(const SplittingRule& rule, int n) {
  if (n < 1) throw Error(Errc::IndexOutOfRange, "n must be >= 1");
  const double nd = static_cast<double>(n);
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, SplittingRule::Constant>) {
          return nd * r.p * (1.0 - r.p);
        } else if constexpr (std::is_same_v<T, SplittingRule::RandomStratified>) {
          return nd * r.dist.mean_bernoulli_variance();
        } else if constexpr (std::is_same_v<T, SplittingRule::FullyRandom>) {
          const double pbar = r.dist.mean();
          return nd * pbar * (1.0 - pbar);
        } else {
          const auto env = realize_environment(rule, n, 0);
          if (!env.stratified())
            throw Error(Errc::UnsupportedRule,
                        "no variance parameter for a non-stratified table");
          double s = 0.0;
          for (int m = 1; m <= n; ++m) {
            const double p = env.row_value(m);
            s += p * (1.0 - p);
          }
          return s;
        }
      },
      rule.variant());
}

/// Centering m_n matching step_variance_param: sum of p_k, or n*pbar.
inline double step_mean_param(const SplittingRule& rule, int n) {
  if (n < 1) throw Error(Errc::IndexOutOfRange, "n must be >= 1");
  const double nd = static_cast<double>(n);
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, SplittingRule::Constant>) {
          return nd * r.p;
        } else if constexpr (std::is_same_v<T, SplittingRule::RandomStratified> ||
                             std::is_same_v<T, SplittingRule::FullyRandom>) {
          return nd * r.dist.mean();
        } else {
          const auto env = realize_environment(rule, n, 0);
          if (!env.stratified())
            throw Error(Errc::UnsupportedRule,
                        "no centering for a non-stratified table");
          double s = 0.0;
          for (int m = 1; m <= n; ++m) s += env.row_value(m);
          return s;
        }
      },
      rule.variant());
}

/// (1/n) sum_{m<=n} delta_{p_m} for a stratified environment.
inline AtomicMeasure empirical_proportion_measure(const Environment& env,
                                                  int n) {
  if (!env.stratified())
    throw Error(Errc::NotStratified,
                "empirical proportion measure needs a stratified rule");
  if (n < 1 || n > env.n_max())
    throw Error(Errc::IndexOutOfRange, "n outside environment");
  std::vector<double> values(static_cast<std::size_t>(n));
  for (int m = 1; m <= n; ++m) values[m - 1] = env.row_value(m);
  return AtomicMeasure::empirical(values);
}

/// The measure H governing the endpoint limit of a stratified rule: the law
/// of P for random stratified rules, the empirical measure of the first n
/// proportions for deterministic ones.
inline AtomicMeasure limit_measure(const SplittingRule& rule, int n,
                                   std::size_t uniform_atoms = kDefaultAtomCount) {
  return std::visit(
      [&](const auto& r) -> AtomicMeasure {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, SplittingRule::Constant>) {
          return AtomicMeasure::point_mass(r.p);
        } else if constexpr (std::is_same_v<T, SplittingRule::RandomStratified>) {
          return r.dist.to_measure(uniform_atoms);
        } else if constexpr (std::is_same_v<T, SplittingRule::FullyRandom>) {
          throw Error(Errc::UnsupportedRule,
                      "the quenched rate of a fully random rule has no "
                      "closed form");
        } else {
          return empirical_proportion_measure(realize_environment(rule, n, 0),
                                              n);
        }
      },
      rule.variant());
}

}  // namespace fragerase
