// Copyright 2026 The bmlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BMLAB_LOGLEVEL_HPP
#define BMLAB_LOGLEVEL_HPP

#include <compare>
#include <string>

namespace bmlab {

/// Tower representation of a nonnegative-ish magnitude:
///   level 0 -> value, level 1 -> e^value, level 2 -> e^(e^value).
/// Positive values above kPromote move up one level; nothing moves down.
class LogLevelNumber {
 public:
  static constexpr double kPromote = 500.0;

  LogLevelNumber() = default;
  LogLevelNumber(int level, double value);

  static LogLevelNumber FromValue(double x) { return {0, x}; }
  static LogLevelNumber FromLog(double log_x) { return {1, log_x}; }
  static LogLevelNumber FromLogLog(double loglog_x) { return {2, loglog_x}; }

  int level() const { return level_; }
  double value() const { return value_; }

  /// log of the represented number (may be +inf for huge level-2 values).
  double log_value() const;
  /// log log of the represented number; requires the number to exceed 1.
  double loglog_value() const;
  /// The number itself, possibly +inf.
  double to_double() const;

  LogLevelNumber operator*(const LogLevelNumber& other) const;
  /// this^p for p > 0.
  LogLevelNumber pow(double p) const;

  std::partial_ordering operator<=>(const LogLevelNumber& other) const;
  bool operator==(const LogLevelNumber& other) const { return (*this <=> other) == 0; }

  std::string to_string() const;

 private:
  void canonicalize();

  int level_ = 0;
  double value_ = 0.0;
};

}  // namespace bmlab

#endif  // BMLAB_LOGLEVEL_HPP
