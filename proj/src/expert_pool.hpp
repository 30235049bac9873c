// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "frozen_model.hpp"
#include "label.hpp"
#include "mix_schedule.hpp"
#include "ogd_learner.hpp"
#include "vec.hpp"

namespace aklo {

/// Frozen models of completed tasks, in task order.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  /// Throws Error(InvalidArgument) unless task ids stay strictly increasing.
  void append(FrozenModel model);

  std::size_t size() const noexcept { return models_.size(); }
  bool empty() const noexcept { return models_.empty(); }
  const FrozenModel& operator[](std::size_t i) const { return models_[i]; }
  std::span<const FrozenModel> models() const noexcept { return models_; }

  /// Next unused task id.
  std::int64_t next_task_id() const noexcept {
    return models_.empty() ? 0 : models_.back().task_id() + 1;
  }

  /// Raw inner products <w_i, x> for every model.
  void scores(const SparseVec& x, std::vector<double>& out) const;

 private:
  std::vector<FrozenModel> models_;
};

// Binary container: "AKLOKB1\n", u64 model count, then per model
// i64 task_id, u64 dim, u64 nnz and nnz pairs of (u64 index, f64 value).
// All integers little-endian, floats IEEE-754 binary64.
void save_knowledge_base(const KnowledgeBase& kb, std::ostream& out);
void save_knowledge_base(const KnowledgeBase& kb, const std::filesystem::path& path);
KnowledgeBase load_knowledge_base(std::istream& in);
KnowledgeBase load_knowledge_base(const std::filesystem::path& path);

/// Squared error of the truncated expert score: (T(<w, x>) - y)^2, in [0, 4].
double expert_error(const FrozenModel& model, const SparseVec& x, Label y);
double expert_error_from_score(double score, Label y);

/// eps = sqrt(log T / (8 * sum_{t<=N} alpha_t)).
double make_eps_fixed(std::size_t num_experts, const MixSchedule& alpha, std::size_t horizon);
double make_eps_from_sum(double num_experts, double alpha_sum);

/// Per-interval eps for I_m = [2^m, 2^(m+1) - 1].
double make_eps_double_trick(std::size_t num_experts, const MixSchedule& alpha, unsigned m);

/// Exponentially weighted forecaster over the knowledge base:
/// p(i) proportional to exp(-eps * L(i)), L the cumulative squared errors.
///
/// Weights used for a prediction at step t reflect the errors of steps
/// 1..t-1 only. Under the double trick, L is zeroed and eps recomputed when t
/// reaches 2, 4, 8, ...
class ExpertState {
 public:
  enum class Rule { Fixed, DoubleTrick, Uniform };

  static ExpertState fixed(std::size_t num_experts, double eps);
  static ExpertState double_trick(std::size_t num_experts, MixSchedule alpha);
  /// Weights pinned to 1/T; accumulate() is a no-op apart from the step count.
  static ExpertState uniform(std::size_t num_experts);
  /// Fixed rule with explicit starting losses.
  static ExpertState from_losses(std::vector<double> losses, double eps);

  Rule rule() const noexcept { return rule_; }
  std::size_t size() const noexcept { return losses_.size(); }
  std::size_t step() const noexcept { return t_; }
  double eps() const noexcept { return eps_; }
  unsigned interval() const noexcept { return interval_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> losses() const noexcept { return losses_; }
  /// Steps at which the double trick zeroed L.
  std::span<const std::size_t> reset_steps() const noexcept { return resets_; }

  /// Observe the label for the current step. Throws Error(Empty) for an empty
  /// knowledge base and Error(Dimension) if sizes disagree.
  void accumulate(const KnowledgeBase& kb, const SparseVec& x, Label y);

  /// Same, with expert scores already computed for this step.
  void accumulate_scores(std::span<const double> scores, Label y);

 private:
  ExpertState(Rule rule, std::size_t n);
  void recompute_weights();

  Rule rule_;
  std::vector<double> losses_;
  std::vector<double> weights_;
  double eps_ = 1.0;
  std::size_t t_ = 1;
  unsigned interval_ = 0;
  MixSchedule alpha_ = MixSchedule::constant(1.0);
  std::vector<std::size_t> resets_;
};

/// T(sum_i p(i) <w_i, x>). Throws Error(Empty) for an empty knowledge base.
Confidence predict_sum(const ExpertState& state, const KnowledgeBase& kb, const SparseVec& x);
Confidence predict_sum_from_scores(std::span<const double> weights, std::span<const double> scores);

/// Inverse-CDF draw over the stored weight order; u in [0, 1).
std::size_t sample_expert(std::span<const double> weights, double u);

/// Draws one expert (one uniform variate) and returns its truncated score.
Confidence predict_sample(const ExpertState& state, const KnowledgeBase& kb, const SparseVec& x,
                          std::mt19937_64& rng);

double uniform_variate(std::mt19937_64& rng);

}  // namespace aklo
