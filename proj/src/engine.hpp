// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dataset_io.hpp"
#include "expert_pool.hpp"
#include "mix_schedule.hpp"
#include "ogd_learner.hpp"

namespace aklo {

enum class PolicyKind { Itol, Tol, UnifSum, UnifSample, AkloSum, AkloSample };

inline constexpr PolicyKind kAllPolicies[] = {PolicyKind::Itol,       PolicyKind::Tol,
                                              PolicyKind::UnifSample, PolicyKind::UnifSum,
                                              PolicyKind::AkloSample, PolicyKind::AkloSum};

/// "itol", "tol", "unif-sum", "unif-sample", "aklo-sum", "aklo-sample".
std::string_view policy_name(PolicyKind p) noexcept;
PolicyKind parse_policy(std::string_view name);

/// True for the policies that consult the knowledge base.
bool uses_knowledge_base(PolicyKind p) noexcept;

enum class LambdaMode { Grid, Theory };
enum class EpsMode { Fixed, DoubleTrick };

struct HyperParams {
  double lambda = 1.0;  // used as is in Grid mode (after selection)
  LambdaMode lambda_mode = LambdaMode::Grid;
  double R = 1.0;
  double X = 1.0;
  EpsMode eps_mode = EpsMode::Fixed;
  MixSchedule schedule = MixSchedule::linear();

  /// Theory mode: ((X+R)/R) sqrt((log N + 1)/N) with a known horizon and
  /// fixed eps, (X+R)/R otherwise.
  double lambda_for_task(std::optional<std::size_t> horizon) const;
};

struct StepRecord {
  std::size_t t = 0;
  double confidence_current = 0.0;
  double confidence_kb = 0.0;
  double alpha = 0.0;
  double score = 0.0;
  Label predicted = Label::Positive;
  Label truth = Label::Positive;
  bool error = false;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct Combined {
  double score;
  Label label;
};

/// alpha * kb + (1 - alpha) * current, labelled by its sign (sign(0) = +1).
Combined combine(Confidence kb, Confidence current, double alpha);

struct TaskResult {
  FrozenModel model{0, {}};
  std::vector<StepRecord> steps;
  std::size_t errors = 0;
  double lambda = 0.0;
  double eps = 0.0;
  bool alpha_overflow = false;
  std::vector<std::size_t> resets;

  double error_rate() const noexcept {
    return steps.empty() ? 0.0 : static_cast<double>(errors) / static_cast<double>(steps.size());
  }
};

/// Step-by-step form of the per-task loop: predict(x) for the combined
/// prediction, then observe(y) with the true label, which updates the
/// expert state and then the learner. Holds references to kb, learner and rng.
class TaskRunner {
 public:
  TaskRunner(PolicyKind policy, const KnowledgeBase& kb, const HyperParams& hp,
             std::optional<std::size_t> horizon, std::mt19937_64& rng, OgdModel& learner);

  const StepRecord& predict(const SparseVec& x);
  void observe(Label y);

  /// The latest record; complete (truth, error) once observe() ran.
  const StepRecord& last() const noexcept { return record_; }

  std::size_t step() const noexcept { return t_; }
  bool awaiting_label() const noexcept { return pending_; }
  bool uses_kb() const noexcept { return use_kb_; }
  double eps() const noexcept { return experts_ ? experts_->eps() : 0.0; }
  bool alpha_overflow() const noexcept { return overflow_; }
  const ExpertState* experts() const noexcept { return experts_ ? &*experts_ : nullptr; }

 private:
  PolicyKind policy_;
  const KnowledgeBase& kb_;
  std::mt19937_64& rng_;
  OgdModel& learner_;
  bool use_kb_;
  std::optional<MixSchedule> schedule_;
  std::optional<ExpertState> experts_;
  std::vector<double> scores_;
  std::optional<SparseVec> x_;
  StepRecord record_;
  std::size_t t_ = 1;
  bool pending_ = false;
  bool overflow_ = false;
};

/// One task of the interactive loop: predict with the current learner and
/// the knowledge base, combine, observe the label, update the expert state,
/// update the learner. The knowledge base is ignored (alpha = 0) when it is
/// empty or the policy is ITOL/TOL. The learner is updated in place, which
/// lets TOL carry it across tasks.
TaskResult run_task(PolicyKind policy, const KnowledgeBase& kb, const TaskStream& stream,
                    const HyperParams& hp, std::mt19937_64& rng, OgdModel& learner,
                    std::int64_t task_id);

/// Same with a fresh learner sized to max(stream.dim, kb dim).
TaskResult run_task(PolicyKind policy, const KnowledgeBase& kb, const TaskStream& stream,
                    const HyperParams& hp, std::mt19937_64& rng, std::int64_t task_id);

struct LifelongTrace {
  std::vector<TaskResult> tasks;
  KnowledgeBase kb;
};

/// Runs the tasks in order, appending each finished model to the knowledge
/// base. TOL keeps one learner (and its step count) for the whole sequence.
LifelongTrace run_lifelong(PolicyKind policy, std::span<const TaskStream> tasks, const HyperParams& hp,
                           std::mt19937_64& rng, KnowledgeBase initial = {});

}  // namespace aklo
