// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "error.hpp"

namespace aklo {

double ace_of_rates(std::span<const double> rates) {
  if (rates.empty()) fail(ErrorCode::Empty, "ACE of zero tasks");
  return std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
}

double ace(std::span<const TaskResult> tasks) {
  std::vector<double> rates;
  rates.reserve(tasks.size());
  for (const auto& t : tasks) rates.push_back(t.error_rate());
  return ace_of_rates(rates);
}

std::vector<double> default_lambda_grid() { return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}; }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) noexcept {
  // splitmix64 finalizer over a simple combination of the inputs
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ (b * 0xd6e8feb86659fd93ull));
}

LambdaSelection select_lambda(std::span<const TaskStream> tasks, std::span<const double> grid,
                              std::uint64_t seed, double fraction) {
  if (grid.empty()) fail(ErrorCode::InvalidArgument, "lambda grid is empty");
  if (!(fraction > 0.0 && fraction <= 1.0)) fail(ErrorCode::InvalidArgument, "validation fraction must lie in (0, 1]");
  LambdaSelection sel;
  sel.grid.assign(grid.begin(), grid.end());
  if (grid.size() == 1) {
    sel.lambda = grid[0];
    sel.validation_ace = {std::numeric_limits<double>::quiet_NaN()};
    return sel;
  }
  std::mt19937_64 rng(seed);
  std::vector<TaskStream> validation;
  validation.reserve(tasks.size());
  for (const auto& t : tasks) {
    const auto k = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(t.size()))), 1, t.size());
    validation.push_back(subsample(t, k, rng));
  }
  double best = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    HyperParams hp;
    hp.lambda = lambda;
    std::mt19937_64 unused(seed);
    const double a = ace(run_lifelong(PolicyKind::Itol, validation, hp, unused).tasks);
    sel.validation_ace.push_back(a);
    if (a < best) {
      best = a;
      sel.lambda = lambda;
    }
  }
  return sel;
}

HyperParams resolve_hyperparams(const ExperimentConfig& config, std::span<const TaskStream> tasks,
                                LambdaSelection* selection) {
  HyperParams hp;
  hp.lambda_mode = config.lambda_mode;
  hp.eps_mode = config.eps_mode;
  hp.schedule = config.schedule;
  const LambdaSelection sel = select_lambda(tasks, config.grid, derive_seed(config.seed, 0xa1), config.validation_fraction);
  hp.lambda = sel.lambda;
  if (selection) *selection = sel;
  hp.X = config.X.value_or(max_feature_norm(tasks));
  if (config.R) {
    hp.R = *config.R;
  } else {
    HyperParams itol;
    itol.lambda = sel.lambda;
    std::mt19937_64 unused(config.seed);
    const auto trace = run_lifelong(PolicyKind::Itol, tasks, itol, unused);
    double wmax = 0.0;
    for (const auto& m : trace.kb.models()) wmax = std::max(wmax, m.l2_norm());
    hp.R = std::max(1.0, 2.0 * wmax);
  }
  return hp;
}

std::vector<TaskStream> shuffled_repetition(std::span<const TaskStream> tasks, std::uint64_t seed,
                                            std::vector<std::int64_t>* order) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> idx(tasks.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<TaskStream> out;
  out.reserve(tasks.size());
  if (order) order->clear();
  for (std::size_t i : idx) {
    out.push_back(tasks[i]);
    shuffle_examples(out.back(), rng);
    if (order) order->push_back(tasks[i].id);
  }
  return out;
}

namespace {

// Runs body(r) for r in [0, n) on up to `jobs` threads. Results must be
// written to per-index slots so the outcome does not depend on scheduling.
template <typename Body>
void parallel_for(std::size_t n, unsigned jobs, Body&& body) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (jobs == 1) {
    for (std::size_t r = 0; r < n; ++r) body(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned j = 0; j < jobs; ++j) {
      workers.emplace_back([&] {
        for (std::size_t r = next++; r < n; r = next++) {
          try {
            body(r);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

double mean(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double a : v) s += (a - m) * (a - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

struct PolicyRun {
  double ace = 0.0;
  double seconds = 0.0;
  std::vector<double> prefix_ace;
  std::vector<std::size_t> last_curve;
  LifelongTrace trace;
};

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, std::span<const TaskStream> tasks) {
  if (tasks.empty()) fail(ErrorCode::Empty, "dataset has no tasks");
  if (config.policies.empty()) fail(ErrorCode::InvalidArgument, "no policies selected");
  if (config.repetitions == 0) fail(ErrorCode::InvalidArgument, "need at least one repetition");

  ExperimentReport report;
  report.hp = resolve_hyperparams(config, tasks, &report.lambda_selection);
  const std::size_t np = config.policies.size();
  const std::size_t nr = config.repetitions;

  std::vector<std::vector<PolicyRun>> runs(nr, std::vector<PolicyRun>(np));
  std::vector<std::uint64_t> rep_seeds(nr);
  report.task_orders.resize(nr);

  parallel_for(nr, config.jobs, [&](std::size_t r) {
    rep_seeds[r] = derive_seed(config.seed, 1, r);
    const auto rep_tasks = shuffled_repetition(tasks, rep_seeds[r], &report.task_orders[r]);
    for (std::size_t p = 0; p < np; ++p) {
      const PolicyKind policy = config.policies[p];
      std::mt19937_64 rng(derive_seed(rep_seeds[r], 2, static_cast<std::uint64_t>(policy)));
      const auto start = std::chrono::steady_clock::now();
      LifelongTrace trace = run_lifelong(policy, rep_tasks, report.hp, rng);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

      PolicyRun& run = runs[r][p];
      run.seconds = config.timing ? elapsed.count() : 0.0;
      run.ace = ace(trace.tasks);
      double running = 0.0;
      for (std::size_t k = 0; k < trace.tasks.size(); ++k) {
        running += trace.tasks[k].error_rate();
        run.prefix_ace.push_back(running / static_cast<double>(k + 1));
      }
      if (r == 0) {
        std::size_t cum = 0;
        for (const auto& s : trace.tasks.back().steps) run.last_curve.push_back(cum += s.error ? 1 : 0);
      }
      if (config.keep_traces) run.trace = std::move(trace);
    }
  });

  report.trajectory.assign(np, std::vector<double>(tasks.size(), 0.0));
  report.last_task_curve.resize(np);
  if (config.keep_traces) report.traces.assign(np, std::vector<LifelongTrace>(nr));
  for (std::size_t p = 0; p < np; ++p) {
    std::vector<double> aces, secs;
    for (std::size_t r = 0; r < nr; ++r) {
      const PolicyRun& run = runs[r][p];
      report.rows.push_back({config.policies[p], r, run.ace, run.seconds, rep_seeds[r]});
      aces.push_back(run.ace);
      secs.push_back(run.seconds);
      for (std::size_t k = 0; k < tasks.size(); ++k) {
        report.trajectory[p][k] += run.prefix_ace[k] / static_cast<double>(nr);
      }
      if (config.keep_traces) report.traces[p][r] = std::move(runs[r][p].trace);
    }
    report.last_task_curve[p] = runs[0][p].last_curve;
    report.summary.push_back({config.policies[p], mean(aces), sample_sd(aces), mean(secs), sample_sd(secs)});
  }
  return report;
}

std::string format_csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create '" + dir.string() + "': " + ec.message());
}

}  // namespace

void write_trace_csv(const LifelongTrace& trace, std::span<const std::int64_t> task_ids,
                     const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "task_position,task_id,t,confidence_current,confidence_kb,alpha,score,predicted,truth,error\n";
  for (std::size_t k = 0; k < trace.tasks.size(); ++k) {
    const std::int64_t id = k < task_ids.size() ? task_ids[k] : static_cast<std::int64_t>(k);
    for (const auto& s : trace.tasks[k].steps) {
      out << k << ',' << id << ',' << s.t << ',' << format_csv_double(s.confidence_current) << ','
          << format_csv_double(s.confidence_kb) << ',' << format_csv_double(s.alpha) << ','
          << format_csv_double(s.score) << ',' << static_cast<int>(s.predicted) << ','
          << static_cast<int>(s.truth) << ',' << (s.error ? 1 : 0) << '\n';
    }
  }
}

void write_report(const ExperimentReport& report, const ExperimentConfig& config,
                  const std::filesystem::path& dir) {
  ensure_dir(dir);
  {
    auto out = open_csv(dir / "repetitions.csv");
    out << "policy,repetition,ace,seconds,seed\n";
    for (const auto& r : report.rows) {
      out << policy_name(r.policy) << ',' << r.repetition << ',' << format_csv_double(r.ace) << ','
          << format_csv_double(r.seconds) << ',' << r.seed << '\n';
    }
  }
  {
    auto out = open_csv(dir / "summary.csv");
    out << "policy,mean_ace,sd_ace,mean_s,sd_s\n";
    for (const auto& s : report.summary) {
      out << policy_name(s.policy) << ',' << format_csv_double(s.mean_ace) << ','
          << format_csv_double(s.sd_ace) << ',' << format_csv_double(s.mean_seconds) << ','
          << format_csv_double(s.sd_seconds) << '\n';
    }
  }
  {
    auto out = open_csv(dir / "trajectory.csv");
    out << "policy,tasks_seen,mean_ace\n";
    for (std::size_t p = 0; p < report.trajectory.size(); ++p) {
      for (std::size_t k = 0; k < report.trajectory[p].size(); ++k) {
        out << policy_name(report.summary[p].policy) << ',' << k + 1 << ','
            << format_csv_double(report.trajectory[p][k]) << '\n';
      }
    }
  }
  {
    auto out = open_csv(dir / "curve.csv");
    out << "policy,t,cumulative_errors\n";
    for (std::size_t p = 0; p < report.last_task_curve.size(); ++p) {
      for (std::size_t t = 0; t < report.last_task_curve[p].size(); ++t) {
        out << policy_name(report.summary[p].policy) << ',' << t + 1 << ',' << report.last_task_curve[p][t] << '\n';
      }
    }
  }
  {
    auto out = open_csv(dir / "lambda_selection.csv");
    out << "lambda,validation_ace,selected\n";
    const auto& sel = report.lambda_selection;
    for (std::size_t i = 0; i < sel.grid.size(); ++i) {
      out << format_csv_double(sel.grid[i]) << ','
          << (std::isnan(sel.validation_ace[i]) ? std::string("n/a") : format_csv_double(sel.validation_ace[i]))
          << ',' << (sel.grid[i] == sel.lambda ? 1 : 0) << '\n';
    }
  }
  if (config.keep_traces && !report.traces.empty()) {
    ensure_dir(dir / "traces");
    for (std::size_t p = 0; p < report.traces.size(); ++p) {
      for (std::size_t r = 0; r < report.traces[p].size(); ++r) {
        const auto name = "rep" + std::to_string(r) + "_" + std::string(policy_name(report.summary[p].policy)) + ".csv";
        write_trace_csv(report.traces[p][r], report.task_orders[r], dir / "traces" / name);
      }
    }
  }
}

// ---- bounds ----------------------------------------------------------------

namespace {

KnowledgeBase prefix(const KnowledgeBase& kb, std::size_t k) {
  KnowledgeBase out;
  for (std::size_t i = 0; i < k; ++i) out.append(kb[i]);
  return out;
}

}  // namespace

BoundsReport run_bounds(const ExperimentConfig& config, std::span<const TaskStream> tasks) {
  if (tasks.empty()) fail(ErrorCode::Empty, "dataset has no tasks");
  if (config.repetitions == 0) fail(ErrorCode::InvalidArgument, "need at least one repetition");
  BoundsReport report;
  HyperParams hp = resolve_hyperparams(config, tasks);
  hp.eps_mode = EpsMode::Fixed;
  HyperParams hp_dt = hp;
  hp_dt.eps_mode = EpsMode::DoubleTrick;
  report.hp = hp;

  std::vector<std::vector<BoundRow>> per_rep(config.repetitions);
  parallel_for(config.repetitions, config.jobs, [&](std::size_t r) {
    const std::uint64_t rep_seed = derive_seed(config.seed, 1, r);
    std::vector<std::int64_t> order;
    const auto rep_tasks = shuffled_repetition(tasks, rep_seed, &order);
    std::mt19937_64 rng_sum(derive_seed(rep_seed, 2, static_cast<std::uint64_t>(PolicyKind::AkloSum)));
    std::mt19937_64 rng_dt(derive_seed(rep_seed, 4, static_cast<std::uint64_t>(PolicyKind::AkloSum)));
    std::mt19937_64 rng_sample(derive_seed(rep_seed, 2, static_cast<std::uint64_t>(PolicyKind::AkloSample)));
    const auto fixed = run_lifelong(PolicyKind::AkloSum, rep_tasks, hp, rng_sum);
    const auto dt = run_lifelong(PolicyKind::AkloSum, rep_tasks, hp_dt, rng_dt);
    const auto sample = run_lifelong(PolicyKind::AkloSample, rep_tasks, hp, rng_sample);

    for (std::size_t k = 0; k < rep_tasks.size(); ++k) {
      const TaskStream& stream = rep_tasks[k];
      BoundRow row{};
      row.repetition = r;
      row.position = k;
      row.task_id = order[k];
      row.n = stream.size();
      row.errors = fixed.tasks[k].errors;
      row.errors_double_trick = dt.tasks[k].errors;
      row.errors_sample = sample.tasks[k].errors;
      if (k < 2) {
        row.theorem1.reason = row.theorem2.reason = row.corollary2.reason = "fewer than two experts";
        per_rep[r].push_back(row);
        continue;
      }
      const MixSchedule schedule = hp.schedule.resolve(stream.size());
      const KnowledgeBase kb = prefix(fixed.kb, k);
      const KnowledgeBase kb_dt = prefix(dt.kb, k);
      const BoundContext ctx{stream, kb, hp.R, hp.X, schedule};
      const BoundContext ctx_dt{stream, kb_dt, hp.R, hp.X, schedule};
      const WStar wstar = comparator_wstar(stream, hp.R, derive_seed(rep_seed, 3, k));
      const Comparators cmp{wstar, comparator_wstarstar(kb, stream)};
      const Comparators cmp_dt{wstar, comparator_wstarstar(kb_dt, stream)};
      row.theorem1 = bound_theorem1(ctx, cmp);
      row.theorem2 = bound_theorem2(ctx_dt, cmp_dt);
      row.corollary2 = bound_corollary2(ctx, cmp, config.delta);
      if (cmp.wstarstar.objective > 0.0) {
        const double K = corollary1_k(hp.X, hp.R, cmp.wstarstar.objective, config.gamma, k);
        row.t0 = corollary1_threshold(schedule, K, stream.size());
      }
      per_rep[r].push_back(row);
    }
  });

  for (auto& rows : per_rep) {
    for (auto& row : rows) {
      if (row.theorem1.applicable && static_cast<double>(row.errors) > row.theorem1.value) ++report.violations_t1;
      if (row.theorem2.applicable && static_cast<double>(row.errors_double_trick) > row.theorem2.value) ++report.violations_t2;
      if (row.corollary2.applicable && static_cast<double>(row.errors_sample) > row.corollary2.value) ++report.violations_c2;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

void write_bounds(const BoundsReport& report, const std::filesystem::path& dir) {
  ensure_dir(dir);
  auto out = open_csv(dir / "bounds.csv");
  out << "repetition,task_id,E_observed,bound_t1,bound_t2,t0,position,n,E_double_trick,E_sample,"
         "bound_c2,c2_violated\n";
  auto value = [](const BoundTerms& b) { return b.applicable ? format_csv_double(b.value) : std::string("n/a"); };
  for (const auto& row : report.rows) {
    out << row.repetition << ',' << row.task_id << ',' << row.errors << ',' << value(row.theorem1) << ','
        << value(row.theorem2) << ',' << (row.t0 ? std::to_string(*row.t0) : std::string("n/a")) << ','
        << row.position << ',' << row.n << ',' << row.errors_double_trick << ',' << row.errors_sample << ','
        << value(row.corollary2) << ','
        << (row.corollary2.applicable ? (static_cast<double>(row.errors_sample) > row.corollary2.value ? "1" : "0") : "n/a")
        << '\n';
  }
}

}  // namespace aklo
