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

#include <cmath>
#include <numbers>

#include "fragerase/error.hpp"

namespace fragerase {

/// Standard normal distribution function.
inline double normal_cdf(double t) noexcept {
  return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

namespace detail {

// Acklam's rational approximation (relative error < 1.2e-9) followed by one
// Halley step against normal_cdf. Valid for 0 < v <= 0.5.
inline double lower_normal_quantile(double v) noexcept {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLowSplit = 0.02425;

  double x;
  if (v < kLowSplit) {
    const double q = std::sqrt(-2.0 * std::log(v));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = v - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double e = normal_cdf(x) - v;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace detail

/// Q = inverse of normal_cdf on (0,1). Exactly antisymmetric: Q(1-u) = -Q(u).
inline double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0))
    throw Error(Errc::DomainError, "normal quantile needs 0 < u < 1");
  if (u <= 0.5) return detail::lower_normal_quantile(u);
  return -detail::lower_normal_quantile(1.0 - u);
}

}  // namespace fragerase
