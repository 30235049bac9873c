// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "engine.hpp"

namespace aklo {

/// Mean over tasks of the per-task mistake rate. Throws Error(Empty).
double ace(std::span<const TaskResult> tasks);
double ace_of_rates(std::span<const double> rates);

std::vector<double> default_lambda_grid();

struct LambdaSelection {
  double lambda = 1.0;
  std::vector<double> grid;
  std::vector<double> validation_ace;
};

/// Picks the grid value with the lowest ITOL ACE on a seeded validation
/// sample (ceil(fraction * N) examples per task, shuffled). Ties keep the
/// earlier grid value.
LambdaSelection select_lambda(std::span<const TaskStream> tasks, std::span<const double> grid,
                              std::uint64_t seed, double fraction = 0.2);

/// 64-bit seed for stream `a`, sub-stream `b` of a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) noexcept;

struct ExperimentConfig {
  std::vector<PolicyKind> policies{std::begin(kAllPolicies), std::end(kAllPolicies)};
  std::size_t repetitions = 10;
  std::uint64_t seed = 1;
  LambdaMode lambda_mode = LambdaMode::Grid;
  std::vector<double> grid = default_lambda_grid();
  MixSchedule schedule = MixSchedule::linear();
  EpsMode eps_mode = EpsMode::Fixed;
  std::optional<double> R;
  std::optional<double> X;
  double validation_fraction = 0.2;
  unsigned jobs = 1;
  bool timing = true;
  bool keep_traces = false;
  bool bounds_on_real_data = false;
  double gamma = 0.5;  // threshold step (t0) parameter
  double delta = 0.05;  // sampling-bound confidence
};

struct RepetitionRow {
  PolicyKind policy;
  std::size_t repetition;
  double ace;
  double seconds;
  std::uint64_t seed;
};

struct SummaryRow {
  PolicyKind policy;
  double mean_ace, sd_ace, mean_seconds, sd_seconds;
};

struct ExperimentReport {
  HyperParams hp;
  LambdaSelection lambda_selection;
  std::vector<RepetitionRow> rows;  // policy-major, then repetition
  std::vector<SummaryRow> summary;
  /// Per policy: mean over repetitions of the ACE over the first k+1 tasks.
  std::vector<std::vector<double>> trajectory;
  /// Per policy: cumulative mistakes over the last task of repetition 0.
  std::vector<std::vector<std::size_t>> last_task_curve;
  /// traces[policy][repetition], filled when keep_traces is set.
  std::vector<std::vector<LifelongTrace>> traces;
  std::vector<std::vector<std::int64_t>> task_orders;
};

/// Resolves lambda (grid selection), X (max ||x||) and R (2 max ||w_j|| over
/// ITOL models, at least 1) for a dataset.
HyperParams resolve_hyperparams(const ExperimentConfig& config, std::span<const TaskStream> tasks,
                                LambdaSelection* selection = nullptr);

/// Task order and example order shuffled per repetition with derived seeds.
std::vector<TaskStream> shuffled_repetition(std::span<const TaskStream> tasks, std::uint64_t seed,
                                            std::vector<std::int64_t>* order = nullptr);

ExperimentReport run_experiment(const ExperimentConfig& config, std::span<const TaskStream> tasks);

/// repetitions.csv, summary.csv, trajectory.csv, curve.csv,
/// lambda_selection.csv and, with traces, traces/rep<r>_<policy>.csv.
void write_report(const ExperimentReport& report, const ExperimentConfig& config,
                  const std::filesystem::path& dir);

struct BoundRow {
  std::size_t repetition;
  std::size_t position;  // index in presentation order; also the kb size T
  std::int64_t task_id;
  std::size_t n;
  std::size_t errors;              // weighted-sum rule, fixed eps
  BoundTerms theorem1;
  std::size_t errors_double_trick;  // weighted-sum rule, double trick
  BoundTerms theorem2;
  std::size_t errors_sample;        // sampling rule
  BoundTerms corollary2;
  std::optional<std::size_t> t0;
};

struct BoundsReport {
  HyperParams hp;
  std::vector<BoundRow> rows;
  std::size_t violations_t1 = 0;
  std::size_t violations_t2 = 0;
  std::size_t violations_c2 = 0;
};

/// Runs the weighted-sum rule (fixed eps and double trick) and the sampling
/// rule over shuffled repetitions and evaluates the bounds on every task.
BoundsReport run_bounds(const ExperimentConfig& config, std::span<const TaskStream> tasks);

/// bounds.csv: repetition, task_id, E_observed, bound_t1, bound_t2, t0, then
/// the double-trick and sampling columns.
void write_bounds(const BoundsReport& report, const std::filesystem::path& dir);

void write_trace_csv(const LifelongTrace& trace, std::span<const std::int64_t> task_ids,
                     const std::filesystem::path& path);

std::string format_csv_double(double v);

}  // namespace aklo
