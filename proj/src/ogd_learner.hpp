// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <cstdint>

#include "frozen_model.hpp"
#include "label.hpp"
#include "vec.hpp"

namespace aklo {

/// Clamp to [lo, hi]. Throws Error(InvalidArgument) when lo > hi.
double truncate(double x, double lo, double hi);

/// A score clamped to [-1, 1].
class Confidence {
 public:
  constexpr Confidence() = default;
  static Confidence from_score(double score) { return Confidence(truncate(score, -1.0, 1.0)); }

  constexpr double value() const noexcept { return value_; }

 private:
  constexpr explicit Confidence(double v) : value_(v) {}
  double value_ = 0.0;
};

/// Online gradient descent on the L2-regularized hinge loss with step size
/// eta_t = 1 / (lambda * t). The weight vector starts at zero and is never
/// projected.
class OgdModel {
 public:
  OgdModel(std::size_t dim, double lambda);

  /// Resume from an explicit state; step is the t of the next update.
  OgdModel(ScaledDenseVec weights, std::size_t step, double lambda);

  double raw_score(const SparseVec& x) const { return w_.dot(x); }
  Confidence predict_confidence(const SparseVec& x) const {
    return Confidence::from_score(raw_score(x));
  }
  double hinge_loss(const SparseVec& x, Label y) const;

  void update(const SparseVec& x, Label y);

  FrozenModel finalize(std::int64_t task_id) const;

  std::size_t step() const noexcept { return t_; }
  double lambda() const noexcept { return lambda_; }
  double learning_rate() const noexcept { return 1.0 / (lambda_ * static_cast<double>(t_)); }
  const ScaledDenseVec& weights() const noexcept { return w_; }

 private:
  ScaledDenseVec w_;
  std::size_t t_ = 1;
  double lambda_;
};

}  // namespace aklo
