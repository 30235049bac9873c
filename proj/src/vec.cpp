// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#include "vec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"
#include "op_counter.hpp"

namespace aklo {

SparseVec::SparseVec(std::size_t dim, std::vector<SparseEntry> entries) : dim_(dim) {
  if (dim == 0) fail(ErrorCode::InvalidArgument, "sparse vector dimension must be positive");
  entries_.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (e.index >= dim) {
      fail(ErrorCode::Dimension, "feature index " + std::to_string(e.index) +
                                     " out of range for dimension " + std::to_string(dim));
    }
    if (!std::isfinite(e.value)) {
      fail(ErrorCode::InvalidArgument, "non-finite value at feature " + std::to_string(e.index));
    }
    if (k > 0 && e.index <= entries[k - 1].index) {
      fail(ErrorCode::InvalidArgument, "feature indices must be strictly increasing (index " +
                                           std::to_string(e.index) + ")");
    }
    if (e.value != 0.0) entries_.push_back(e);
  }
}

SparseVec SparseVec::from_unsorted(std::size_t dim, std::vector<SparseEntry> entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  return SparseVec(dim, std::move(entries));
}

SparseVec SparseVec::from_dense(std::span<const double> values) {
  std::vector<SparseEntry> entries;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) entries.push_back({i, values[i]});
  }
  return SparseVec(values.size(), std::move(entries));
}

double SparseVec::squared_norm() const noexcept {
  double s = 0.0;
  for (const auto& e : entries_) s += e.value * e.value;
  return s;
}

double SparseVec::l2_norm() const noexcept { return std::sqrt(squared_norm()); }

SparseVec SparseVec::with_bias(double bias) const {
  SparseVec out = *this;
  out.dim_ = dim_ + 1;
  if (bias != 0.0) out.entries_.push_back({dim_, bias});
  return out;
}

SparseVec SparseVec::widened(std::size_t new_dim) const {
  if (new_dim < dim_) fail(ErrorCode::Dimension, "cannot shrink a sparse vector");
  SparseVec out = *this;
  out.dim_ = new_dim;
  return out;
}

double dot(std::span<const double> dense, const SparseVec& x) {
  if (x.dim() > dense.size()) {
    fail(ErrorCode::Dimension, "vector of dimension " + std::to_string(x.dim()) +
                                   " exceeds model dimension " + std::to_string(dense.size()));
  }
  double s = 0.0;
  for (const auto& e : x.entries()) s += dense[e.index] * e.value;
  count_ops(x.nnz());
  return s;
}

ScaledDenseVec::ScaledDenseVec(std::size_t dim) : base_(dim, 0.0), zero_(true) {}

ScaledDenseVec ScaledDenseVec::from_parts(std::vector<double> base, double scale) {
  if (scale == 0.0 || !std::isfinite(scale)) {
    fail(ErrorCode::InvalidArgument, "scale must be finite and nonzero");
  }
  ScaledDenseVec v;
  v.base_ = std::move(base);
  v.scale_ = scale;
  return v;
}

std::vector<double> ScaledDenseVec::logical() const {
  std::vector<double> out(base_.size());
  for (std::size_t i = 0; i < base_.size(); ++i) out[i] = scale_ * base_[i];
  return out;
}

void ScaledDenseVec::check_dim(const SparseVec& x) const {
  if (x.dim() > base_.size()) {
    fail(ErrorCode::Dimension, "vector of dimension " + std::to_string(x.dim()) +
                                   " exceeds model dimension " + std::to_string(base_.size()));
  }
}

double ScaledDenseVec::dot(const SparseVec& x) const {
  check_dim(x);
  double s = 0.0;
  for (const auto& e : x.entries()) s += base_[e.index] * e.value;
  count_ops(x.nnz());
  return scale_ * s;
}

void ScaledDenseVec::scale_in_place(double c) {
  if (c == 0.0) {
    if (!zero_) {
      std::fill(base_.begin(), base_.end(), 0.0);
      count_ops(base_.size());
      zero_ = true;
    }
    scale_ = 1.0;
    return;
  }
  scale_ *= c;
  if (std::abs(scale_) < kScaleFloor) rebase();
}

void ScaledDenseVec::axpy(double a, const SparseVec& x) {
  check_dim(x);
  if (a == 0.0) return;
  if (std::abs(scale_) < kScaleFloor) rebase();
  const double coeff = a / scale_;
  for (const auto& e : x.entries()) base_[e.index] += coeff * e.value;
  zero_ = zero_ && x.nnz() == 0;
  count_ops(x.nnz());
}

double ScaledDenseVec::l2_norm() const noexcept {
  double s = 0.0;
  for (double b : base_) s += b * b;
  return std::abs(scale_) * std::sqrt(s);
}

void ScaledDenseVec::rebase() noexcept {
  for (double& b : base_) b *= scale_;
  count_ops(base_.size());
  scale_ = 1.0;
}

}  // namespace aklo
