// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0
//
// aklo generate | run | bounds | convert

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "aklo/aklo.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Failure {
  int exit_code;
  std::string message;
};

void check(aklo_status st, int exit_code = kExitRuntime) {
  if (st != AKLO_OK) {
    std::string msg = aklo_last_error();
    if (msg.empty()) msg = aklo_status_name(st);
    throw Failure{exit_code, msg};
  }
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Dataset = Handle<aklo_dataset, aklo_dataset_free>;
using Config = Handle<aklo_config, aklo_config_free>;
using Report = Handle<aklo_report, aklo_report_free>;
using Bounds = Handle<aklo_bounds, aklo_bounds_free>;

struct ExperimentFlags {
  std::string dataset = "syn1";
  std::optional<std::uint64_t> data_seed;
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string out;
};

// Registers a flag whose value is forwarded verbatim as a config key.
void forward(CLI::App* cmd, ExperimentFlags& f, const std::string& flag, const std::string& key,
             const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&f, key](const std::string& v) { f.overrides.emplace_back(key, v); }, help);
}

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
  cmd->add_option("--dataset", f.dataset, "syn1, syn2 or a manifest path")->capture_default_str();
  cmd->add_option("--data-seed", f.data_seed, "seed for synthetic generation (default: --seed)");
  cmd->add_option("--config", f.config_path, "key = value file; flags override it");
  cmd->add_option("--seed", f.seed, "experiment seed (default: AKLO_SEED, else 1)");
  forward(cmd, f, "--reps", "repetitions", "number of repetitions");
  forward(cmd, f, "--lambda-mode", "lambda_mode", "grid | theory");
  forward(cmd, f, "--grid", "grid", "comma list of lambda candidates");
  forward(cmd, f, "--lambda", "lambda", "single lambda, skips selection");
  forward(cmd, f, "--alpha", "alpha", "linear | linear:N | constant:v | custom:a,b,.. | doubling");
  forward(cmd, f, "--eps", "eps", "fixed | double-trick");
  forward(cmd, f, "--R", "R", "comparator radius or auto");
  forward(cmd, f, "--X", "X", "feature norm bound or auto");
  forward(cmd, f, "--validation-fraction", "validation_fraction", "share of each task used for lambda selection");
  forward(cmd, f, "--jobs", "jobs", "worker threads, 0 for all cores");
  cmd->add_option("--out", f.out, "output directory")->required();
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("AKLO_SEED");
  if (!s || !*s) return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (*end != '\0' || s[0] == '-') throw Failure{kExitUsage, "AKLO_SEED is not a nonnegative integer"};
  return v;
}

std::uint64_t build_config(const ExperimentFlags& f, Config& cfg) {
  check(aklo_config_create(cfg.out()));
  std::uint64_t seed = 1;
  if (auto e = env_seed()) seed = *e;
  check(aklo_config_set(cfg.get(), "seed", std::to_string(seed).c_str()), kExitUsage);
  if (f.config_path) check(aklo_config_load(cfg.get(), f.config_path->c_str()), kExitUsage);
  for (const auto& [k, v] : f.overrides) check(aklo_config_set(cfg.get(), k.c_str(), v.c_str()), kExitUsage);
  if (f.seed) {
    seed = *f.seed;
    check(aklo_config_set(cfg.get(), "seed", std::to_string(seed).c_str()), kExitUsage);
  }
  return seed;
}

void load_dataset(const ExperimentFlags& f, std::uint64_t seed, Dataset& ds) {
  const std::uint64_t data_seed = f.data_seed.value_or(seed);
  if (f.dataset == "syn1") {
    check(aklo_dataset_generate(AKLO_SYN1, data_seed, ds.out()));
  } else if (f.dataset == "syn2") {
    check(aklo_dataset_generate(AKLO_SYN2, data_seed, ds.out()));
  } else {
    check(aklo_dataset_load_manifest(f.dataset.c_str(), ds.out()));
  }
}

void cmd_generate(const std::string& kind, std::uint64_t seed, const std::string& out) {
  Dataset ds;
  if (kind == "syn1") check(aklo_dataset_generate(AKLO_SYN1, seed, ds.out()));
  else if (kind == "syn2") check(aklo_dataset_generate(AKLO_SYN2, seed, ds.out()));
  else throw Failure{kExitUsage, "--kind must be syn1 or syn2"};
  check(aklo_dataset_write(ds.get(), out.c_str()));
  std::printf("wrote %zu tasks to %s\n", aklo_dataset_num_tasks(ds.get()), out.c_str());
}

void cmd_run(const ExperimentFlags& f) {
  Config cfg;
  const std::uint64_t seed = build_config(f, cfg);
  Dataset ds;
  load_dataset(f, seed, ds);
  Report rep;
  check(aklo_run_experiment(cfg.get(), ds.get(), rep.out()));
  check(aklo_report_write(rep.get(), f.out.c_str()));

  const double lambda = aklo_report_lambda(rep.get());
  if (lambda == lambda) std::printf("lambda %g  R %g  X %g\n", lambda, aklo_report_R(rep.get()), aklo_report_X(rep.get()));
  else std::printf("lambda theory  R %g  X %g\n", aklo_report_R(rep.get()), aklo_report_X(rep.get()));
  std::printf("%-12s %10s %10s %10s\n", "policy", "ace%", "sd%", "seconds");
  for (std::size_t i = 0; i < aklo_report_num_policies(rep.get()); ++i) {
    std::printf("%-12s %10.2f %10.2f %10.4f\n", aklo_report_policy(rep.get(), i),
                100.0 * aklo_report_mean_ace(rep.get(), i), 100.0 * aklo_report_sd_ace(rep.get(), i),
                aklo_report_mean_seconds(rep.get(), i));
  }
}

void cmd_bounds(const ExperimentFlags& f, bool real_data) {
  Config cfg;
  const std::uint64_t seed = build_config(f, cfg);
  if (real_data) check(aklo_config_set(cfg.get(), "bounds_on_real_data", "on"));
  Dataset ds;
  load_dataset(f, seed, ds);
  Bounds b;
  check(aklo_run_bounds(cfg.get(), ds.get(), b.out()));
  check(aklo_bounds_write(b.get(), f.out.c_str()));
  std::printf("rows %zu  applicable %zu\n", aklo_bounds_num_rows(b.get()), aklo_bounds_num_applicable(b.get()));
  std::printf("violations  t1 %zu  t2 %zu  c2 %zu\n", aklo_bounds_violations(b.get(), AKLO_BOUND_T1),
              aklo_bounds_violations(b.get(), AKLO_BOUND_T2), aklo_bounds_violations(b.get(), AKLO_BOUND_C2));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifelong online learning with a knowledge base of past-task models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(aklo_version()));

  std::string gen_kind = "syn1";
  std::optional<std::uint64_t> gen_seed;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "write a synthetic dataset as task files and a manifest");
  gen->add_option("--kind", gen_kind, "syn1 | syn2")->capture_default_str()->check(CLI::IsMember({"syn1", "syn2"}));
  gen->add_option("--seed", gen_seed, "generator seed (default: AKLO_SEED, else 1)");
  gen->add_option("--out", gen_out, "output directory")->required();

  ExperimentFlags run_flags;
  auto* run = app.add_subcommand("run", "run policies over shuffled repetitions and write CSV reports");
  add_experiment_flags(run, run_flags);
  forward(run, run_flags, "--policies", "policies", "comma list or all");
  run->add_option_function<std::string>(
      "--timing", [&](const std::string& v) { run_flags.overrides.emplace_back("timing", v); },
      "on | off; off writes 0 seconds so reports are byte-reproducible");
  run->add_flag_callback("--traces", [&] { run_flags.overrides.emplace_back("traces", "on"); },
                         "write per-step traces");

  ExperimentFlags bound_flags;
  bool real_data = false;
  auto* bounds = app.add_subcommand("bounds", "evaluate the mistake bounds task by task");
  add_experiment_flags(bounds, bound_flags);
  forward(bounds, bound_flags, "--gamma", "gamma", "threshold parameter in (0, 1)");
  forward(bounds, bound_flags, "--delta", "delta", "sampling-bound confidence in (0, 1)");
  bounds->add_flag("--allow-real-data", real_data, "evaluate bounds on a manifest dataset");

  std::string conv_in, conv_out, conv_format = "libsvm";
  std::optional<std::string> conv_labels;
  bool zero_based = false;
  auto* conv = app.add_subcommand("convert", "convert libsvm or dense csv into the task format");
  conv->add_option("--in", conv_in, "input file")->required();
  conv->add_option("--out", conv_out, "output task file")->required();
  conv->add_option("--format", conv_format, "libsvm | csv")->capture_default_str();
  conv->add_option("--label-map", conv_labels, "e.g. 0:-1,1:+1");
  conv->add_flag("--zero-based", zero_based, "libsvm indices start at 0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      std::uint64_t seed = 1;
      if (auto e = env_seed()) seed = *e;
      cmd_generate(gen_kind, gen_seed.value_or(seed), gen_out);
    } else if (*run) {
      cmd_run(run_flags);
    } else if (*bounds) {
      cmd_bounds(bound_flags, real_data);
    } else if (*conv) {
      check(aklo_convert(conv_in.c_str(), conv_out.c_str(), conv_format.c_str(),
                         conv_labels ? conv_labels->c_str() : nullptr, zero_based ? 0 : 1));
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "aklo: %s\n", f.message.c_str());
    return f.exit_code;
  }
  return kExitOk;
}
