// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aklo {

/// Non-increasing weight alpha_t in [0, 1] given to the knowledge-base
/// prediction at step t (1-based).
///
///   linear     alpha_t = 1 - (t - 1) / N, N the task horizon
///   constant   alpha_t = v
///   custom     alpha_t = table[t - 1]
///   doubling   linear with N replaced by 2^ceil(log2 t), for unknown horizons
///
/// A linear schedule built without a horizon is a template; resolve() binds
/// it to a task length.
class MixSchedule {
 public:
  enum class Kind { Linear, Constant, Custom, Doubling };

  static MixSchedule linear(std::optional<std::size_t> horizon = std::nullopt);
  static MixSchedule constant(double value);
  static MixSchedule custom(std::vector<double> table);
  static MixSchedule doubling();

  /// Parses "linear", "linear:N", "constant:v", "custom:a,b,c", "doubling".
  static MixSchedule parse(std::string_view text);
  std::string to_string() const;

  Kind kind() const noexcept { return kind_; }
  std::optional<std::size_t> horizon() const noexcept { return horizon_; }
  bool needs_horizon() const noexcept { return kind_ == Kind::Linear && !horizon_; }

  /// Linear templates take the given horizon; other kinds are returned as is.
  MixSchedule resolve(std::size_t horizon) const;

  /// alpha_t. Past the end of a linear horizon or custom table the last value
  /// is returned and beyond_horizon(t) reports true.
  double at(std::size_t t) const;
  bool beyond_horizon(std::size_t t) const;

  /// Sum of alpha_1..alpha_n.
  double sum(std::size_t n) const;
  double sum_of_squares(std::size_t n) const;

  /// True when alpha_1 = 1 and the first n values are non-increasing.
  bool admissible(std::size_t n) const;

 private:
  MixSchedule(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::optional<std::size_t> horizon_;
  double value_ = 0.0;
  std::vector<double> table_;
};

}  // namespace aklo
