// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aklo {

struct SparseEntry {
  std::size_t index;
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Feature vector stored as (index, value) pairs with strictly increasing
/// indices, every index below dim() and no explicit zeros.
class SparseVec {
 public:
  SparseVec() = default;

  /// Validating constructor: entries must already be sorted and unique.
  /// Exact zeros are dropped. Throws Error(Dimension) for an index >= dim and
  /// Error(InvalidArgument) for unsorted, duplicate or non-finite entries.
  SparseVec(std::size_t dim, std::vector<SparseEntry> entries);

  /// Sorts by index first; duplicates are still rejected.
  static SparseVec from_unsorted(std::size_t dim, std::vector<SparseEntry> entries);

  static SparseVec from_dense(std::span<const double> values);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  std::span<const SparseEntry> entries() const noexcept { return entries_; }

  double squared_norm() const noexcept;
  double l2_norm() const noexcept;

  /// Copy with dimension grown by one and a constant feature at the new slot.
  SparseVec with_bias(double bias = 1.0) const;

  /// Copy with a larger declared dimension; entries unchanged.
  SparseVec widened(std::size_t new_dim) const;

  friend bool operator==(const SparseVec&, const SparseVec&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<SparseEntry> entries_;
};

double dot(std::span<const double> dense, const SparseVec& x);

/// Dense vector with a lazy multiplicative scale: logical[i] = scale * base[i].
/// Scaling is O(1); sparse updates and inner products touch only nnz(x)
/// entries.
class ScaledDenseVec {
 public:
  static constexpr double kScaleFloor = 1e-150;

  ScaledDenseVec() = default;
  explicit ScaledDenseVec(std::size_t dim);

  /// Throws Error(InvalidArgument) when scale is zero or non-finite.
  static ScaledDenseVec from_parts(std::vector<double> base, double scale);

  std::size_t dim() const noexcept { return base_.size(); }
  double scale() const noexcept { return scale_; }
  std::span<const double> base() const noexcept { return base_; }

  double at(std::size_t i) const { return scale_ * base_.at(i); }
  std::vector<double> logical() const;

  double dot(const SparseVec& x) const;
  void scale_in_place(double c);
  void axpy(double a, const SparseVec& x);
  double l2_norm() const noexcept;

  /// Folds scale into base and resets scale to 1.
  void rebase() noexcept;

 private:
  void check_dim(const SparseVec& x) const;

  std::vector<double> base_;
  double scale_ = 1.0;
  bool zero_ = false;  // base known to be all zeros
};

}  // namespace aklo
