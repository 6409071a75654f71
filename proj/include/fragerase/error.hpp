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

#include <stdexcept>
#include <string>
#include <string_view>

namespace fragerase {

enum class Errc {
  TableTooSmall,
  InvalidProportion,
  InvalidMeasure,
  NotStratified,
  UnsupportedRule,
  BadRuleSpec,
  RowLengthMismatch,
  EmptyPartition,
  IndexOutOfRange,
  TooLarge,
  SizeMismatch,
  DomainError,
  DegenerateVariance,
  BadGrid,
  AlphaOutOfRange,
  XOutOfRange,
};

constexpr std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::TableTooSmall: return "TableTooSmall";
    case Errc::InvalidProportion: return "InvalidProportion";
    case Errc::InvalidMeasure: return "InvalidMeasure";
    case Errc::NotStratified: return "NotStratified";
    case Errc::UnsupportedRule: return "UnsupportedRule";
    case Errc::BadRuleSpec: return "BadRuleSpec";
    case Errc::RowLengthMismatch: return "RowLengthMismatch";
    case Errc::EmptyPartition: return "EmptyPartition";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::TooLarge: return "TooLarge";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::DomainError: return "DomainError";
    case Errc::DegenerateVariance: return "DegenerateVariance";
    case Errc::BadGrid: return "BadGrid";
    case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
    case Errc::XOutOfRange: return "XOutOfRange";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable error code. All library
/// precondition failures are reported through this type.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace fragerase
