// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dataset_io.hpp"
#include "expert_pool.hpp"
#include "mix_schedule.hpp"

namespace aklo {

/// Sum of hinge losses of a dense weight vector over the stream, each step
/// weighted by weights[t] when given.
double cumulative_hinge(std::span<const double> w, const TaskStream& stream,
                        std::span<const double> weights = {});

struct WStar {
  std::vector<double> w;
  double objective = 0.0;
};

/// Minimizer of the cumulative hinge loss over the ball ||w|| <= R, found by
/// projected normalized subgradient descent (500 iterations, step R/sqrt(k))
/// from the origin and four random starts; the best iterate seen wins.
WStar comparator_wstar(const TaskStream& stream, double R, std::uint64_t seed = 0,
                       std::size_t iterations = 500, std::size_t restarts = 5);

struct WStarStar {
  std::size_t index = 0;  // position in the knowledge base
  double objective = 0.0;  // sum of squared truncated errors
};

/// Exhaustive scan for the expert with the smallest cumulative squared error;
/// ties go to the lowest task id. Throws Error(Empty) for an empty kb.
WStarStar comparator_wstarstar(const KnowledgeBase& kb, const TaskStream& stream);

struct BoundTerms {
  bool applicable = false;
  std::string reason;
  double expert_term = 0.0;         // sum alpha_t e_t(w**)
  double learner_term = 0.0;        // sum (1 - alpha_t) l_t(w*)
  double forecaster_regret = 0.0;
  double learner_regret = 0.0;
  double extra = 0.0;               // high-probability term (sampling bound)
  double value = 0.0;
};

struct BoundContext {
  const TaskStream& stream;
  const KnowledgeBase& kb;
  double R;
  double X;
  const MixSchedule& schedule;  // resolved to the task horizon when linear
};

struct Comparators {
  WStar wstar;
  WStarStar wstarstar;
};

Comparators compute_comparators(const BoundContext& ctx, std::uint64_t seed = 0);

/// Known-horizon bound on the cumulative mistakes of the weighted-sum rule.
/// Natural logarithms. Not applicable for fewer than two experts or an
/// increasing alpha.
BoundTerms bound_theorem1(const BoundContext& ctx, const Comparators& comparators);
BoundTerms bound_theorem1(const BoundContext& ctx);

/// Unknown-horizon (double trick) counterpart.
BoundTerms bound_theorem2(const BoundContext& ctx, const Comparators& comparators);
BoundTerms bound_theorem2(const BoundContext& ctx);

/// Known-horizon bound for the sampling rule, holding with probability
/// at least 1 - delta.
BoundTerms bound_corollary2(const BoundContext& ctx, const Comparators& comparators, double delta);

/// Largest t <= horizon with alpha_t >= K / (1 + K); 0 if there is none.
std::size_t corollary1_threshold(const MixSchedule& alpha, double K, std::size_t horizon);

/// Smallest admissible K = max{(1 + XR)/(gamma zeta), R(X+R)/(4 gamma sqrt(2 log T))}.
/// Throws Error(NotApplicable) when zeta <= 0 or T < 2.
double corollary1_k(double X, double R, double zeta, double gamma, std::size_t num_experts);

double max_feature_norm(std::span<const TaskStream> tasks);

}  // namespace aklo
