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

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fragerase/error.hpp"

namespace fragerase {

struct Atom {
  double location;
  double weight;
};

/// Discrete probability measure on [0,1] with strictly increasing atom
/// locations and positive weights summing to one.
class AtomicMeasure {
 public:
  static constexpr double kMassTolerance = 1e-12;

  /// Sorts, merges equal locations and drops zero weights. Throws
  /// InvalidMeasure on locations outside [0,1], negative weights, or total
  /// mass off by more than kMassTolerance.
  static AtomicMeasure from_atoms(std::vector<Atom> atoms) {
    for (const auto& a : atoms) {
      if (!(a.location >= 0.0 && a.location <= 1.0))
        throw Error(Errc::InvalidMeasure,
                    "atom location " + std::to_string(a.location) +
                        " outside [0,1]");
      if (!(a.weight >= 0.0) || !std::isfinite(a.weight))
        throw Error(Errc::InvalidMeasure, "negative or non-finite weight");
    }
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const Atom& l, const Atom& r) {
                       return l.location < r.location;
                     });
    AtomicMeasure m;
    for (const auto& a : atoms) {
      if (a.weight == 0.0) continue;
      if (!m.atoms_.empty() && m.atoms_.back().location == a.location)
        m.atoms_.back().weight += a.weight;
      else
        m.atoms_.push_back(a);
    }
    if (m.atoms_.empty())
      throw Error(Errc::InvalidMeasure, "measure has no mass");
    if (std::abs(m.total() - 1.0) > kMassTolerance)
      throw Error(Errc::InvalidMeasure,
                  "total mass " + std::to_string(m.total()) + " is not 1");
    return m;
  }

  static AtomicMeasure point_mass(double t) {
    return from_atoms({{t, 1.0}});
  }

  /// (1/n) sum of unit masses at the samples.
  static AtomicMeasure empirical(std::span<const double> samples) {
    if (samples.empty())
      throw Error(Errc::InvalidMeasure, "empirical measure of no samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<Atom> atoms;
    const double n = static_cast<double>(sorted.size());
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      atoms.push_back({sorted[i], static_cast<double>(j - i) / n});
      i = j;
    }
    return from_atoms(std::move(atoms));
  }

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  double total() const noexcept {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
  }

  double mean() const noexcept {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.location * a.weight;
    return s;
  }

  double mass_at(double t) const noexcept {
    auto it = std::lower_bound(
        atoms_.begin(), atoms_.end(), t,
        [](const Atom& a, double v) { return a.location < v; });
    return (it != atoms_.end() && it->location == t) ? it->weight : 0.0;
  }

  /// H([0,x]).
  double cdf(double x) const noexcept {
    double s = 0.0;
    for (const auto& a : atoms_) {
      if (a.location > x) break;
      s += a.weight;
    }
    return s;
  }

  /// True when some mass lies strictly inside (0,1).
  bool charges_interior() const noexcept {
    return std::any_of(atoms_.begin(), atoms_.end(), [](const Atom& a) {
      return a.location > 0.0 && a.location < 1.0;
    });
  }

 private:
  std::vector<Atom> atoms_;
};

}  // namespace fragerase
