// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#include "engine.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace aklo {

std::string_view policy_name(PolicyKind p) noexcept {
  switch (p) {
    case PolicyKind::Itol: return "itol";
    case PolicyKind::Tol: return "tol";
    case PolicyKind::UnifSum: return "unif-sum";
    case PolicyKind::UnifSample: return "unif-sample";
    case PolicyKind::AkloSum: return "aklo-sum";
    case PolicyKind::AkloSample: return "aklo-sample";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view name) {
  for (PolicyKind p : kAllPolicies) {
    if (policy_name(p) == name) return p;
  }
  fail(ErrorCode::InvalidArgument, "unknown policy '" + std::string(name) + "'");
}

bool uses_knowledge_base(PolicyKind p) noexcept {
  return p != PolicyKind::Itol && p != PolicyKind::Tol;
}

double HyperParams::lambda_for_task(std::optional<std::size_t> horizon) const {
  if (lambda_mode == LambdaMode::Grid) return lambda;
  if (!(R > 0.0) || !(X >= 0.0)) fail(ErrorCode::InvalidArgument, "theory lambda needs R > 0 and X >= 0");
  const double base = (X + R) / R;
  if (eps_mode == EpsMode::DoubleTrick || !horizon) return base;
  const double n = static_cast<double>(*horizon);
  return base * std::sqrt((std::log(n) + 1.0) / n);
}

Combined combine(Confidence kb, Confidence current, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
  const double score = alpha * kb.value() + (1.0 - alpha) * current.value();
  return {score, sign_label(score)};
}

namespace {

ExpertState make_expert_state(PolicyKind policy, std::size_t experts, const MixSchedule& schedule,
                              const HyperParams& hp, std::optional<std::size_t> horizon) {
  if (policy == PolicyKind::UnifSum || policy == PolicyKind::UnifSample) {
    return ExpertState::uniform(experts);
  }
  if (hp.eps_mode == EpsMode::DoubleTrick) return ExpertState::double_trick(experts, schedule);
  if (!horizon) fail(ErrorCode::InvalidArgument, "fixed eps needs a known horizon; use the double trick");
  // With one expert the weights are a point mass, and with sum(alpha) = 0 the
  // knowledge base never contributes; any positive eps does.
  if (experts < 2 || !(schedule.sum(*horizon) > 0.0)) return ExpertState::fixed(experts, 1.0);
  return ExpertState::fixed(experts, make_eps_fixed(experts, schedule, *horizon));
}

}  // namespace

TaskRunner::TaskRunner(PolicyKind policy, const KnowledgeBase& kb, const HyperParams& hp,
                       std::optional<std::size_t> horizon, std::mt19937_64& rng, OgdModel& learner)
    : policy_(policy), kb_(kb), rng_(rng), learner_(learner),
      use_kb_(uses_knowledge_base(policy) && !kb.empty()) {
  if (!use_kb_) return;
  if (hp.schedule.needs_horizon()) {
    if (!horizon) fail(ErrorCode::InvalidArgument, "linear alpha schedule needs a known horizon");
    schedule_ = hp.schedule.resolve(*horizon);
  } else {
    schedule_ = hp.schedule;
  }
  experts_ = make_expert_state(policy, kb.size(), *schedule_, hp, horizon);
}

const StepRecord& TaskRunner::predict(const SparseVec& x) {
  if (pending_) fail(ErrorCode::InvalidArgument, "predict called twice without a label");
  const bool sampling = policy_ == PolicyKind::UnifSample || policy_ == PolicyKind::AkloSample;
  const bool weighted = policy_ == PolicyKind::AkloSum || policy_ == PolicyKind::AkloSample;

  StepRecord rec;
  rec.t = t_;
  const Confidence current = learner_.predict_confidence(x);
  rec.confidence_current = current.value();

  Confidence from_kb;
  if (use_kb_) {
    rec.alpha = schedule_->at(t_);
    overflow_ = overflow_ || schedule_->beyond_horizon(t_);
    if (sampling && !weighted) {
      // uniform sampling needs a single inner product
      const std::size_t pick = sample_expert(experts_->weights(), uniform_variate(rng_));
      from_kb = Confidence::from_score(kb_[pick].score(x));
    } else {
      kb_.scores(x, scores_);
      if (sampling) {
        const std::size_t pick = sample_expert(experts_->weights(), uniform_variate(rng_));
        from_kb = Confidence::from_score(scores_[pick]);
      } else {
        from_kb = predict_sum_from_scores(experts_->weights(), scores_);
      }
    }
    rec.confidence_kb = from_kb.value();
  }

  const Combined c = combine(from_kb, current, rec.alpha);
  rec.score = c.score;
  rec.predicted = c.label;
  record_ = rec;
  x_ = x;
  pending_ = true;
  return record_;
}

void TaskRunner::observe(Label y) {
  if (!pending_) fail(ErrorCode::InvalidArgument, "label observed before a prediction");
  const bool weighted = policy_ == PolicyKind::AkloSum || policy_ == PolicyKind::AkloSample;
  if (use_kb_ && weighted) experts_->accumulate_scores(scores_, y);
  learner_.update(*x_, y);
  record_.truth = y;
  record_.error = record_.predicted != y;
  pending_ = false;
  ++t_;
}

TaskResult run_task(PolicyKind policy, const KnowledgeBase& kb, const TaskStream& stream,
                    const HyperParams& hp, std::mt19937_64& rng, OgdModel& learner,
                    std::int64_t task_id) {
  if (stream.empty()) fail(ErrorCode::Empty, "task stream is empty");
  if (stream.dim > learner.weights().dim()) {
    fail(ErrorCode::Dimension, "task dimension " + std::to_string(stream.dim) +
                                   " exceeds learner dimension " + std::to_string(learner.weights().dim()));
  }
  TaskRunner runner(policy, kb, hp, stream.known_horizon, rng, learner);

  TaskResult result;
  result.lambda = learner.lambda();
  result.eps = runner.eps();
  result.steps.reserve(stream.size());
  for (const auto& [x, y] : stream.examples) {
    runner.predict(x);
    runner.observe(y);
    result.steps.push_back(runner.last());
    result.errors += result.steps.back().error ? 1 : 0;
  }
  result.alpha_overflow = runner.alpha_overflow();
  if (const ExpertState* e = runner.experts()) {
    result.resets.assign(e->reset_steps().begin(), e->reset_steps().end());
  }
  result.model = learner.finalize(task_id);
  return result;
}

namespace {

std::size_t model_dim(const KnowledgeBase& kb, std::size_t dim) {
  for (const auto& m : kb.models()) dim = std::max(dim, m.dim());
  return dim;
}

}  // namespace

TaskResult run_task(PolicyKind policy, const KnowledgeBase& kb, const TaskStream& stream,
                    const HyperParams& hp, std::mt19937_64& rng, std::int64_t task_id) {
  OgdModel learner(model_dim(kb, stream.dim), hp.lambda_for_task(stream.known_horizon));
  return run_task(policy, kb, stream, hp, rng, learner, task_id);
}

LifelongTrace run_lifelong(PolicyKind policy, std::span<const TaskStream> tasks, const HyperParams& hp,
                           std::mt19937_64& rng, KnowledgeBase initial) {
  if (tasks.empty()) fail(ErrorCode::Empty, "no tasks to run");
  std::size_t dim = model_dim(initial, 1);
  for (const auto& t : tasks) dim = std::max(dim, t.dim);

  LifelongTrace trace;
  trace.kb = std::move(initial);
  trace.tasks.reserve(tasks.size());
  std::optional<OgdModel> carried;
  for (const auto& stream : tasks) {
    const std::int64_t id = trace.kb.next_task_id();
    OgdModel fresh(dim, hp.lambda_for_task(stream.known_horizon));
    OgdModel& learner = policy == PolicyKind::Tol ? (carried ? *carried : carried.emplace(fresh)) : fresh;
    TaskResult r = run_task(policy, trace.kb, stream, hp, rng, learner, id);
    trace.kb.append(r.model);
    trace.tasks.push_back(std::move(r));
  }
  return trace;
}

}  // namespace aklo
