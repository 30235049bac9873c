// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

// End-to-end checks. Prints one PASS/FAIL line per criterion; the arguments
// select criteria (all by default). Exit status 1 if any selected one fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dataset_io.hpp"
#include "harness.hpp"
#include "op_counter.hpp"
#include "synth_data.hpp"

using namespace aklo;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path work_dir() {
  const char* env = std::getenv("AKLO_ACCEPTANCE_TMP");
  fs::path p = env ? fs::path(env) : fs::temp_directory_path() / "aklo_acceptance";
  fs::create_directories(p);
  return p;
}

std::vector<TaskStream> syn(SynKind kind, std::uint64_t seed) {
  SynSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  return generate(spec).tasks;
}

ExperimentConfig table_config(bool timing) {
  ExperimentConfig c;
  c.repetitions = 10;
  c.seed = 1;
  c.timing = timing;
  c.jobs = 0;
  return c;
}

struct TableRun {
  ExperimentReport report;
  double seconds;
};

// Cached so criteria 1-3 share the runs within one process.
const TableRun& table_run(SynKind kind) {
  static std::map<SynKind, TableRun> cache;
  auto it = cache.find(kind);
  if (it != cache.end()) return it->second;
  const auto tasks = syn(kind, 1);
  const auto start = Clock::now();
  ExperimentReport r = run_experiment(table_config(true), tasks);
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  return cache.emplace(kind, TableRun{std::move(r), s}).first->second;
}

double mean_ace(const ExperimentReport& r, PolicyKind p) {
  for (const auto& s : r.summary) {
    if (s.policy == p) return s.mean_ace;
  }
  return std::nan("");
}

std::string table_line(const ExperimentReport& r) {
  std::string out;
  for (const auto& s : r.summary) out += fmt(" %s=%.2f%%", std::string(policy_name(s.policy)).c_str(), 100 * s.mean_ace);
  return out;
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

Outcome table_criterion(SynKind kind, std::array<double, 2> aklo, std::array<double, 2> itol,
                        std::array<double, 2> unif, double max_seconds) {
  const TableRun& t = table_run(kind);
  const double a = mean_ace(t.report, PolicyKind::AkloSum);
  const double i = mean_ace(t.report, PolicyKind::Itol);
  const double u = mean_ace(t.report, PolicyKind::UnifSample);
  const bool ok = within(a, aklo[0], aklo[1]) && within(i, itol[0], itol[1]) && within(u, unif[0], unif[1]) &&
                  t.seconds < max_seconds;
  return {ok, fmt("lambda=%g R=%.3g X=%.3g%s time=%.1fs", t.report.hp.lambda, t.report.hp.R, t.report.hp.X,
                  table_line(t.report).c_str(), t.seconds)};
}

Outcome criterion1() { return table_criterion(SynKind::Syn1, {0.07, 0.17}, {0.35, 0.47}, {0.34, 0.47}, 60.0); }

Outcome criterion2() {
  return table_criterion(SynKind::Syn2, {0.07, 0.20}, {0.37, 0.47}, {0.44, 0.55},
                         std::numeric_limits<double>::infinity());
}

Outcome criterion3() {
  bool ok = true;
  std::string detail;
  for (SynKind kind : {SynKind::Syn1, SynKind::Syn2}) {
    const ExperimentReport& r = table_run(kind).report;
    const double sum = mean_ace(r, PolicyKind::AkloSum), sample = mean_ace(r, PolicyKind::AkloSample);
    const double unif = mean_ace(r, PolicyKind::UnifSample), itol = mean_ace(r, PolicyKind::Itol);
    const double gap = 0.03;
    const bool k = sum + gap <= sample && sample + gap <= unif && sum + gap <= itol;
    ok = ok && k;
    detail += fmt("%s: sum=%.2f%% sample=%.2f%% unif-sample=%.2f%% itol=%.2f%% %s; ", kind == SynKind::Syn1 ? "syn1" : "syn2",
                  100 * sum, 100 * sample, 100 * unif, 100 * itol, k ? "ordered" : "not ordered");
  }
  return {ok, detail};
}

Outcome criterion4() {
  std::size_t applicable = 0, violations = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (SynKind kind : {SynKind::Syn1, SynKind::Syn2}) {
      ExperimentConfig c;
      c.repetitions = 1;
      c.seed = seed;
      c.jobs = 0;
      const BoundsReport r = run_bounds(c, syn(kind, seed));
      for (const auto& row : r.rows) applicable += row.theorem1.applicable;
      violations += r.violations_t1;
    }
  }
  return {violations == 0 && applicable == 10 * 2 * 48,
          fmt("%zu tasks checked, %zu violations", applicable, violations)};
}

Outcome criterion5() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::size_t N = 500, dim = 8;
  const MixSchedule ones = MixSchedule::constant(1.0);
  std::size_t streams = 0, violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t T : {2u, 10u, 50u}) {
    for (int trial = 0; trial < 100; ++trial) {
      KnowledgeBase kb;
      for (std::size_t i = 0; i < T; ++i) {
        std::vector<double> w(dim);
        for (double& v : w) v = 0.6 * g(rng);
        kb.append(FrozenModel(static_cast<std::int64_t>(i), w));
      }
      std::vector<Example> data;
      for (std::size_t t = 0; t < N; ++t) {
        std::vector<double> x(dim);
        for (double& v : x) v = g(rng);
        data.push_back({SparseVec::from_dense(x), rng() % 2 ? Label::Positive : Label::Negative});
      }
      ExpertState st = ExpertState::fixed(T, make_eps_fixed(T, ones, N));
      double loss = 0.0;
      for (const auto& [x, y] : data) {
        const double p = predict_sum(st, kb, x).value();
        loss += (p - to_double(y)) * (p - to_double(y));
        st.accumulate(kb, x, y);
      }
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < T; ++i) {
        double e = 0.0;
        for (const auto& [x, y] : data) e += expert_error(kb[i], x, y);
        best = std::min(best, e);
      }
      const double bound = best + 4.0 * std::sqrt(2.0 * N * std::log(static_cast<double>(T)));
      violations += loss > bound;
      worst_slack = std::min(worst_slack, bound - loss);
      ++streams;
    }
  }
  return {violations == 0, fmt("%zu streams, %zu violations, smallest slack %.2f", streams, violations, worst_slack)};
}

bool same_predictions(const TaskResult& a, const TaskResult& b) {
  if (a.steps.size() != b.steps.size()) return false;
  for (std::size_t t = 0; t < a.steps.size(); ++t) {
    const StepRecord &x = a.steps[t], &y = b.steps[t];
    if (x.predicted != y.predicted || x.score != y.score || x.confidence_current != y.confidence_current) return false;
  }
  return true;
}

Outcome criterion6() {
  const auto tasks = syn(SynKind::Syn1, 6);
  HyperParams hp;
  hp.lambda = 0.01;
  std::vector<std::string> failed;

  std::mt19937_64 r0(1);
  const LifelongTrace itol = run_lifelong(PolicyKind::Itol, tasks, hp, r0);

  HyperParams zero = hp;
  zero.schedule = MixSchedule::constant(0.0);
  for (PolicyKind p : {PolicyKind::AkloSum, PolicyKind::AkloSample, PolicyKind::UnifSum, PolicyKind::UnifSample}) {
    std::mt19937_64 r(1);
    const LifelongTrace tr = run_lifelong(p, tasks, zero, r);
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      if (!same_predictions(tr.tasks[k], itol.tasks[k])) {
        failed.push_back("alpha=0 " + std::string(policy_name(p)));
        break;
      }
    }
    std::mt19937_64 r2(1);
    const TaskResult empty = run_task(p, KnowledgeBase{}, tasks[0], hp, r2, 0);
    if (!same_predictions(empty, itol.tasks[0])) failed.push_back("empty kb " + std::string(policy_name(p)));
  }

  const std::vector<TaskStream> first(tasks.begin(), tasks.begin() + 10);
  std::mt19937_64 r3(1);
  const LifelongTrace tol = run_lifelong(PolicyKind::Tol, first, hp, r3);
  TaskStream concat;
  concat.dim = first[0].dim;
  for (const auto& t : first) concat.examples.insert(concat.examples.end(), t.examples.begin(), t.examples.end());
  std::mt19937_64 r4(1);
  const TaskResult joined = run_task(PolicyKind::Itol, KnowledgeBase{}, concat, hp, r4, 0);
  std::size_t pos = 0;
  bool tol_ok = true;
  for (const auto& t : tol.tasks) {
    for (const auto& s : t.steps) {
      const StepRecord& j = joined.steps[pos++];
      tol_ok = tol_ok && s.predicted == j.predicted && s.score == j.score;
    }
  }
  if (!tol_ok || pos != joined.steps.size()) failed.push_back("tol vs concatenation");

  std::string detail = failed.empty() ? "all traces bit-identical" : "mismatch:";
  for (const auto& f : failed) detail += " [" + f + "]";
  return {failed.empty(), detail};
}

Outcome criterion7() {
  // both knowledge bases fit in L2 so the timing follows the operation count
  const std::size_t d = 1000, nnz = 100, N = 4000, T = 64;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  auto make_kb = [&](std::size_t n) {
    KnowledgeBase kb;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> w(d);
      for (double& v : w) v = 0.05 * g(rng);
      kb.append(FrozenModel(static_cast<std::int64_t>(i), w));
    }
    return kb;
  };
  TaskStream s;
  s.dim = d;
  s.known_horizon = N;
  for (std::size_t t = 0; t < N; ++t) {
    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<SparseEntry> e;
    for (std::size_t j = 0; j < nnz; ++j) e.push_back({idx[j], g(rng)});
    s.examples.push_back({SparseVec::from_unsorted(d, e), rng() % 2 ? Label::Positive : Label::Negative});
  }
  const KnowledgeBase small = make_kb(T), large = make_kb(2 * T);
  HyperParams hp;
  hp.lambda = 0.1;
  auto time_once = [&](const KnowledgeBase& kb) {
    std::mt19937_64 r(1);
    const auto start = Clock::now();
    const TaskResult res = run_task(PolicyKind::AkloSum, kb, s, hp, r, 0);
    const double sec = std::chrono::duration<double>(Clock::now() - start).count();
    return res.steps.size() == N ? sec : std::nan("");
  };
  // interleaved runs, best of each
  double t1 = std::numeric_limits<double>::infinity(), t2 = t1;
  for (int rep = 0; rep < 9; ++rep) {
    t1 = std::min(t1, time_once(small));
    t2 = std::min(t2, time_once(large));
  }
  const double ratio = t2 / t1;

  // per-step operation count against c (T nnz + T + nnz)
  const double c = 8.0;
  double worst = 0.0;
  for (const KnowledgeBase* kb : {&small, &large}) {
    for (PolicyKind p : {PolicyKind::AkloSum, PolicyKind::AkloSample}) {
      OgdModel learner(d, hp.lambda);
      std::mt19937_64 r(1);
      TaskRunner runner(p, *kb, hp, N, r, learner);
      const double budget = static_cast<double>(kb->size() * nnz + kb->size() + nnz);
      for (const auto& [x, y] : s.examples) {
        const std::uint64_t before = op_counter();
        runner.predict(x);
        runner.observe(y);
        worst = std::max(worst, static_cast<double>(op_counter() - before) / budget);
      }
    }
  }
  return {within(ratio, 1.5, 2.5) && worst <= c,
          fmt("time T=%zu %.4fs, 2T %.4fs, ratio %.2f; worst ops/(T nnz+T+nnz) %.2f (c=%g)", T, t1, t2, ratio, worst, c)};
}

Outcome criterion8() {
  const auto tasks = syn(SynKind::Syn1, 1);
  HyperParams hp;
  hp.lambda = 0.01;
  hp.eps_mode = EpsMode::DoubleTrick;
  std::mt19937_64 rng(8);
  const LifelongTrace tr = run_lifelong(PolicyKind::AkloSum, tasks, hp, rng);
  const std::vector<std::size_t> expected{2, 4, 8, 16, 32, 64};
  bool resets_ok = true;
  for (std::size_t k = 1; k < tr.tasks.size(); ++k) resets_ok = resets_ok && tr.tasks[k].resets == expected;

  ExperimentConfig c = table_config(false);
  c.policies = {PolicyKind::AkloSum};
  const double fixed = run_experiment(c, tasks).summary[0].mean_ace;
  c.eps_mode = EpsMode::DoubleTrick;
  const double dt = run_experiment(c, tasks).summary[0].mean_ace;
  const double gap = std::abs(dt - fixed);
  return {resets_ok && gap <= 0.08,
          fmt("resets %s; aklo-sum ace known horizon %.2f%%, double trick %.2f%%, gap %.2f pp",
              resets_ok ? "at 2,4,...,64" : "wrong", 100 * fixed, 100 * dt, 100 * gap)};
}

Outcome criterion9() {
  const fs::path dir = work_dir() / "loaders";
  fs::remove_all(dir);
  const auto tasks = syn(SynKind::Syn2, 9);
  write_dataset(tasks, dir / "syn");
  const auto back = load_manifest_tasks(read_manifest(dir / "syn" / "manifest.txt"));
  bool round_trip = back.size() == tasks.size();
  for (std::size_t k = 0; round_trip && k < tasks.size(); ++k) round_trip = back[k].examples == tasks[k].examples;

  // nine raw features plus the bias slot
  fs::create_directories(dir / "bias");
  {
    std::ofstream t(dir / "bias" / "t.txt");
    t << "+1 0:0.5 4:1 8:2\n-1 1:1 8:-1\n";
    std::ofstream m(dir / "bias" / "manifest.txt");
    m << "task = t.txt\ndim = 9\nadd_bias = true\n";
  }
  const auto biased = load_manifest_tasks(read_manifest(dir / "bias" / "manifest.txt"));
  bool bias_ok = biased.size() == 1 && biased[0].dim == 10;
  for (const auto& ex : biased[0].examples) {
    const auto last = ex.x.entries().back();
    bias_ok = bias_ok && last.index == 9 && last.value == 1.0;
  }

  std::string extra = "Landmine not supplied (set AKLO_LANDMINE_MANIFEST to check the ordering there)";
  bool landmine_ok = true;
  if (const char* lm = std::getenv("AKLO_LANDMINE_MANIFEST")) {
    const auto real = load_manifest_tasks(read_manifest(lm));
    ExperimentConfig c = table_config(false);
    c.policies = {PolicyKind::Itol, PolicyKind::UnifSample, PolicyKind::AkloSample, PolicyKind::AkloSum};
    const ExperimentReport r = run_experiment(c, real);
    const double sum = mean_ace(r, PolicyKind::AkloSum), sample = mean_ace(r, PolicyKind::AkloSample);
    const double unif = mean_ace(r, PolicyKind::UnifSample), itol = mean_ace(r, PolicyKind::Itol);
    landmine_ok = sum + 0.03 <= sample && sample + 0.03 <= unif && sum + 0.03 <= itol;
    extra = "Landmine" + table_line(r) + (landmine_ok ? " ordered" : " not ordered");
  }
  fs::remove_all(dir);
  return {round_trip && bias_ok && landmine_ok,
          fmt("round trip %s; bias 9->%zu features %s; %s", round_trip ? "exact" : "differs",
              biased.empty() ? 0 : biased[0].dim, bias_ok ? "ok" : "wrong", extra.c_str())};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion10() {
  const auto tasks = syn(SynKind::Syn1, 1);
  const fs::path base = work_dir() / "determinism";
  fs::remove_all(base);
  ExperimentConfig c = table_config(false);
  c.keep_traces = true;
  for (const char* run : {"a", "b"}) write_report(run_experiment(c, tasks), c, base / run);
  std::size_t files = 0, differ = 0;
  for (const auto& e : fs::recursive_directory_iterator(base / "a")) {
    if (!e.is_regular_file()) continue;
    ++files;
    const fs::path other = base / "b" / fs::relative(e.path(), base / "a");
    differ += slurp(e.path()) != slurp(other);
  }
  fs::remove_all(base);
  return {files > 0 && differ == 0, fmt("%zu CSV files compared, %zu differ", files, differ)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (int i = 1; i <= 10; ++i) selected.push_back(i);
  }
  bool all = true;
  for (int n : selected) {
    if (n < 1 || n > 10) {
      std::fprintf(stderr, "no criterion %d\n", n);
      return 2;
    }
    Outcome o{false, ""};
    try {
      o = criteria[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %2d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
