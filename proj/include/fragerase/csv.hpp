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

#include <cstdio>
#include <ostream>
#include <string>

namespace fragerase::csv {

/// 17 significant digits: round-trips every finite double.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename... Ts>
void row(std::ostream& os, const Ts&... cols) {
  bool first = true;
  auto put = [&](const auto& c) {
    if (!first) os << ',';
    first = false;
    using T = std::decay_t<decltype(c)>;
    if constexpr (std::is_floating_point_v<T>)
      os << fmt(static_cast<double>(c));
    else
      os << c;
  };
  (put(cols), ...);
  os << '\n';
}

}  // namespace fragerase::csv
