// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "dataset_io.hpp"

namespace aklo {

enum class SynKind { Syn1, Syn2 };

struct SynSpec {
  SynKind kind = SynKind::Syn1;
  std::size_t n_tasks = 50;
  std::size_t n_per_task = 100;
  double noise_variance = 1e-3;  // variance of the per-task boundary offset
  std::uint64_t seed = 0;
};

/// Generated tasks in presentation order, with the generating parameters of
/// each task kept alongside for oracles.
struct SynDataset {
  std::vector<TaskStream> tasks;
  std::vector<int> distribution;  // 0 for D1, 1 for D2
  std::vector<std::array<double, 2>> boundary;
};

/// sign(a . x), or sign(-a . x) when adversarial; sign(0) = +1.
Label syn_label(const std::array<double, 2>& a, const std::array<double, 2>& x, bool adversarial = false);

/// Two-dimensional tasks, half from each distribution:
///   D1: x ~ N([10, 10], I), a = [-1 + e, 1 + e]
///   D2: x ~ N([20, 5], I),  a = [-0.25 + e, 1 + e]
/// with e ~ N(0, noise_variance) drawn per task and y = sign(a . x). Task
/// order is a seeded uniform permutation.
SynDataset gen_syn1(const SynSpec& spec, std::mt19937_64& rng);

/// Shared marginal x ~ N([10, 10], I) and a = [-1 + e, 1 + e]; D1 tasks use
/// sign(a . x), D2 tasks the negated labeling.
SynDataset gen_syn2(const SynSpec& spec, std::mt19937_64& rng);

/// Dispatches on spec.kind with an rng seeded from spec.seed.
SynDataset generate(const SynSpec& spec);

}  // namespace aklo
