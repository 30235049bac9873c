// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#include "ogd_learner.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace aklo {

double truncate(double x, double lo, double hi) {
  if (lo > hi) fail(ErrorCode::InvalidArgument, "truncate: lower bound exceeds upper bound");
  if (x <= lo) return lo;
  if (x >= hi) return hi;
  return x;
}

double FrozenModel::l2_norm() const noexcept {
  double s = 0.0;
  for (double v : *weights_) s += v * v;
  return std::sqrt(s);
}

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorCode::InvalidArgument, "lambda must be positive and finite");
  }
}

}  // namespace

OgdModel::OgdModel(std::size_t dim, double lambda) : w_(dim), lambda_(lambda) {
  check_lambda(lambda);
}

OgdModel::OgdModel(ScaledDenseVec weights, std::size_t step, double lambda)
    : w_(std::move(weights)), t_(step), lambda_(lambda) {
  check_lambda(lambda);
  if (step == 0) fail(ErrorCode::InvalidArgument, "step count starts at 1");
}

double OgdModel::hinge_loss(const SparseVec& x, Label y) const {
  return std::max(0.0, 1.0 - to_double(y) * raw_score(x));
}

void OgdModel::update(const SparseVec& x, Label y) {
  const double eta = learning_rate();
  const double margin = to_double(y) * w_.dot(x);
  w_.scale_in_place(1.0 - eta * lambda_);
  if (margin < 1.0) w_.axpy(eta * to_double(y), x);
  ++t_;
}

FrozenModel OgdModel::finalize(std::int64_t task_id) const {
  return FrozenModel(task_id, w_.logical());
}

}  // namespace aklo
