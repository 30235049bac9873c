// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "vec.hpp"

namespace aklo {

/// Immutable snapshot of a finished task's weight vector. Copies share the
/// underlying storage.
class FrozenModel {
 public:
  FrozenModel(std::int64_t task_id, std::vector<double> weights)
      : task_id_(task_id),
        weights_(std::make_shared<const std::vector<double>>(std::move(weights))) {}

  std::int64_t task_id() const noexcept { return task_id_; }
  std::size_t dim() const noexcept { return weights_->size(); }
  std::span<const double> weights() const noexcept { return *weights_; }

  double score(const SparseVec& x) const { return dot(*weights_, x); }
  double l2_norm() const noexcept;

 private:
  std::int64_t task_id_;
  std::shared_ptr<const std::vector<double>> weights_;
};

}  // namespace aklo
