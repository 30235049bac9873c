// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#include "aklo/aklo.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "dataset_io.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "expert_pool.hpp"
#include "harness.hpp"
#include "synth_data.hpp"

struct aklo_dataset {
  std::vector<aklo::TaskStream> tasks;
  bool synthetic = false;
};

struct aklo_config {
  aklo::ExperimentConfig config;
};

struct aklo_report {
  aklo::ExperimentReport report;
  aklo::ExperimentConfig config;
  std::vector<std::string> names;
};

struct aklo_bounds {
  aklo::BoundsReport report;
};

struct aklo_kb {
  aklo::KnowledgeBase kb;
};

struct aklo_session {
  const aklo_kb* owner;
  aklo::PolicyKind policy;
  aklo::HyperParams hp;
  std::mt19937_64 rng;
  aklo::OgdModel learner;
  std::unique_ptr<aklo::TaskRunner> runner;
  std::size_t mistakes = 0;
  std::size_t steps = 0;
  bool finished = false;
};

namespace {

thread_local std::string g_last_error;

aklo_status to_status(aklo::ErrorCode code) {
  switch (code) {
    case aklo::ErrorCode::InvalidArgument: return AKLO_ERR_INVALID_ARGUMENT;
    case aklo::ErrorCode::Dimension: return AKLO_ERR_DIMENSION;
    case aklo::ErrorCode::Io: return AKLO_ERR_IO;
    case aklo::ErrorCode::Format: return AKLO_ERR_FORMAT;
    case aklo::ErrorCode::Version: return AKLO_ERR_VERSION;
    case aklo::ErrorCode::Empty: return AKLO_ERR_EMPTY;
    case aklo::ErrorCode::NotApplicable: return AKLO_ERR_NOT_APPLICABLE;
  }
  return AKLO_ERR_INTERNAL;
}

template <class F>
aklo_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return AKLO_OK;
  } catch (const aklo::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return AKLO_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AKLO_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return AKLO_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) aklo::fail(aklo::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) {
    aklo::fail(aklo::ErrorCode::InvalidArgument, key + ": not a number '" + v + "'");
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    aklo::fail(aklo::ErrorCode::InvalidArgument, key + ": not a nonnegative integer '" + v + "'");
  }
  return out;
}

bool parse_switch(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  aklo::fail(aklo::ErrorCode::InvalidArgument, key + ": expected on or off, got '" + v + "'");
}

double parse_unit_open(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (!(d > 0.0 && d < 1.0)) aklo::fail(aklo::ErrorCode::InvalidArgument, key + " must lie in (0, 1)");
  return d;
}

std::optional<double> parse_auto_positive(const std::string& key, const std::string& v) {
  if (v == "auto") return std::nullopt;
  const double d = parse_double(key, v);
  if (!(d > 0.0)) aklo::fail(aklo::ErrorCode::InvalidArgument, key + " must be positive");
  return d;
}

void set_key(aklo::ExperimentConfig& c, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "policies") {
    std::vector<aklo::PolicyKind> ps;
    if (v == "all") {
      ps.assign(std::begin(aklo::kAllPolicies), std::end(aklo::kAllPolicies));
    } else {
      for (const auto& name : split(v, ',')) {
        const aklo::PolicyKind p = aklo::parse_policy(name);
        if (std::find(ps.begin(), ps.end(), p) != ps.end()) {
          aklo::fail(aklo::ErrorCode::InvalidArgument, "policy '" + name + "' listed twice");
        }
        ps.push_back(p);
      }
    }
    c.policies = std::move(ps);
  } else if (key == "repetitions") {
    const auto n = parse_u64(key, v);
    if (n == 0) aklo::fail(aklo::ErrorCode::InvalidArgument, "repetitions must be positive");
    c.repetitions = n;
  } else if (key == "seed") {
    c.seed = parse_u64(key, v);
  } else if (key == "lambda_mode") {
    if (v == "grid") c.lambda_mode = aklo::LambdaMode::Grid;
    else if (v == "theory") c.lambda_mode = aklo::LambdaMode::Theory;
    else aklo::fail(aklo::ErrorCode::InvalidArgument, "lambda_mode: expected grid or theory, got '" + v + "'");
  } else if (key == "grid" || key == "lambda") {
    std::vector<double> grid;
    for (const auto& s : split(v, ',')) {
      const double d = parse_double(key, s);
      if (!(d > 0.0)) aklo::fail(aklo::ErrorCode::InvalidArgument, key + " values must be positive");
      grid.push_back(d);
    }
    if (key == "lambda" && grid.size() != 1) aklo::fail(aklo::ErrorCode::InvalidArgument, "lambda takes one value");
    c.grid = std::move(grid);
  } else if (key == "alpha") {
    c.schedule = aklo::MixSchedule::parse(v);
  } else if (key == "eps") {
    if (v == "fixed") c.eps_mode = aklo::EpsMode::Fixed;
    else if (v == "double-trick") c.eps_mode = aklo::EpsMode::DoubleTrick;
    else aklo::fail(aklo::ErrorCode::InvalidArgument, "eps: expected fixed or double-trick, got '" + v + "'");
  } else if (key == "R") {
    c.R = parse_auto_positive(key, v);
  } else if (key == "X") {
    c.X = parse_auto_positive(key, v);
  } else if (key == "validation_fraction") {
    const double d = parse_double(key, v);
    if (!(d > 0.0 && d <= 1.0)) aklo::fail(aklo::ErrorCode::InvalidArgument, "validation_fraction must lie in (0, 1]");
    c.validation_fraction = d;
  } else if (key == "jobs") {
    const auto n = parse_u64(key, v);
    c.jobs = n == 0 ? std::max(1u, std::thread::hardware_concurrency()) : static_cast<unsigned>(std::min<std::uint64_t>(n, 1024));
  } else if (key == "timing") {
    c.timing = parse_switch(key, v);
  } else if (key == "traces") {
    c.keep_traces = parse_switch(key, v);
  } else if (key == "bounds_on_real_data") {
    c.bounds_on_real_data = parse_switch(key, v);
  } else if (key == "gamma") {
    c.gamma = parse_unit_open(key, v);
  } else if (key == "delta") {
    c.delta = parse_unit_open(key, v);
  } else {
    aklo::fail(aklo::ErrorCode::InvalidArgument, "unknown configuration key '" + key + "'");
  }
}

}  // namespace

extern "C" {

const char* aklo_version(void) { return "1.0.0"; }

const char* aklo_status_name(aklo_status status) {
  switch (status) {
    case AKLO_OK: return "ok";
    case AKLO_ERR_INVALID_ARGUMENT: return "invalid argument";
    case AKLO_ERR_DIMENSION: return "dimension mismatch";
    case AKLO_ERR_IO: return "i/o error";
    case AKLO_ERR_FORMAT: return "format error";
    case AKLO_ERR_VERSION: return "version mismatch";
    case AKLO_ERR_EMPTY: return "empty input";
    case AKLO_ERR_NOT_APPLICABLE: return "not applicable";
    case AKLO_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* aklo_last_error(void) { return g_last_error.c_str(); }

aklo_status aklo_dataset_generate(aklo_syn_kind kind, uint64_t seed, aklo_dataset** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    aklo::SynSpec spec;
    if (kind == AKLO_SYN1) spec.kind = aklo::SynKind::Syn1;
    else if (kind == AKLO_SYN2) spec.kind = aklo::SynKind::Syn2;
    else aklo::fail(aklo::ErrorCode::InvalidArgument, "unknown synthetic kind");
    spec.seed = seed;
    auto ds = std::make_unique<aklo_dataset>();
    ds->tasks = aklo::generate(spec).tasks;
    ds->synthetic = true;
    *out = ds.release();
  });
}

aklo_status aklo_dataset_load_manifest(const char* path, aklo_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto ds = std::make_unique<aklo_dataset>();
    ds->tasks = aklo::load_manifest_tasks(aklo::read_manifest(path));
    *out = ds.release();
  });
}

aklo_status aklo_dataset_write(const aklo_dataset* ds, const char* dir) {
  return guarded([&] {
    require(ds, "dataset");
    require(dir, "dir");
    aklo::write_dataset(ds->tasks, dir);
  });
}

size_t aklo_dataset_num_tasks(const aklo_dataset* ds) { return ds ? ds->tasks.size() : 0; }

size_t aklo_dataset_dim(const aklo_dataset* ds) {
  if (!ds) return 0;
  std::size_t d = 0;
  for (const auto& t : ds->tasks) d = std::max(d, t.dim);
  return d;
}

size_t aklo_dataset_task_size(const aklo_dataset* ds, size_t task) {
  return ds && task < ds->tasks.size() ? ds->tasks[task].size() : 0;
}

int aklo_dataset_is_synthetic(const aklo_dataset* ds) { return ds && ds->synthetic ? 1 : 0; }

void aklo_dataset_free(aklo_dataset* ds) { delete ds; }

aklo_status aklo_config_create(aklo_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new aklo_config();
  });
}

aklo_status aklo_config_set(aklo_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "config");
    require(key, "key");
    require(value, "value");
    // validate on a copy so a failed set leaves the config untouched
    aklo::ExperimentConfig next = cfg->config;
    set_key(next, trim(key), value);
    cfg->config = std::move(next);
  });
}

aklo_status aklo_config_load(aklo_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg, "config");
    require(path, "path");
    std::ifstream in(path);
    if (!in) aklo::fail(aklo::ErrorCode::Io, std::string("cannot open '") + path + "'");
    aklo::ExperimentConfig next = cfg->config;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        aklo::fail(aklo::ErrorCode::Format, std::string(path) + ":" + std::to_string(lineno) + ": expected key = value");
      }
      try {
        set_key(next, trim(t.substr(0, eq)), t.substr(eq + 1));
      } catch (const aklo::Error& e) {
        aklo::fail(e.code(), std::string(path) + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    cfg->config = std::move(next);
  });
}

void aklo_config_free(aklo_config* cfg) { delete cfg; }

aklo_status aklo_run_experiment(const aklo_config* cfg, const aklo_dataset* ds, aklo_report** out) {
  return guarded([&] {
    require(cfg, "config");
    require(ds, "dataset");
    require(out, "out");
    *out = nullptr;
    auto rep = std::make_unique<aklo_report>();
    rep->config = cfg->config;
    rep->report = aklo::run_experiment(cfg->config, ds->tasks);
    for (const auto& row : rep->report.summary) rep->names.emplace_back(aklo::policy_name(row.policy));
    *out = rep.release();
  });
}

aklo_status aklo_report_write(const aklo_report* rep, const char* dir) {
  return guarded([&] {
    require(rep, "report");
    require(dir, "dir");
    aklo::write_report(rep->report, rep->config, dir);
  });
}

size_t aklo_report_num_policies(const aklo_report* rep) { return rep ? rep->report.summary.size() : 0; }

const char* aklo_report_policy(const aklo_report* rep, size_t i) {
  return rep && i < rep->names.size() ? rep->names[i].c_str() : nullptr;
}

namespace {
double summary_field(const aklo_report* rep, size_t i, double aklo::SummaryRow::*field) {
  if (!rep || i >= rep->report.summary.size()) return std::numeric_limits<double>::quiet_NaN();
  return rep->report.summary[i].*field;
}
}  // namespace

double aklo_report_mean_ace(const aklo_report* rep, size_t i) { return summary_field(rep, i, &aklo::SummaryRow::mean_ace); }
double aklo_report_sd_ace(const aklo_report* rep, size_t i) { return summary_field(rep, i, &aklo::SummaryRow::sd_ace); }
double aklo_report_mean_seconds(const aklo_report* rep, size_t i) {
  return summary_field(rep, i, &aklo::SummaryRow::mean_seconds);
}

double aklo_report_lambda(const aklo_report* rep) {
  if (!rep || rep->report.hp.lambda_mode != aklo::LambdaMode::Grid) return std::numeric_limits<double>::quiet_NaN();
  return rep->report.hp.lambda;
}

double aklo_report_R(const aklo_report* rep) { return rep ? rep->report.hp.R : std::numeric_limits<double>::quiet_NaN(); }
double aklo_report_X(const aklo_report* rep) { return rep ? rep->report.hp.X : std::numeric_limits<double>::quiet_NaN(); }

void aklo_report_free(aklo_report* rep) { delete rep; }

aklo_status aklo_run_bounds(const aklo_config* cfg, const aklo_dataset* ds, aklo_bounds** out) {
  return guarded([&] {
    require(cfg, "config");
    require(ds, "dataset");
    require(out, "out");
    *out = nullptr;
    if (!ds->synthetic && !cfg->config.bounds_on_real_data) {
      aklo::fail(aklo::ErrorCode::NotApplicable,
                 "bounds are evaluated on synthetic data only; enable bounds_on_real_data to override");
    }
    auto b = std::make_unique<aklo_bounds>();
    b->report = aklo::run_bounds(cfg->config, ds->tasks);
    *out = b.release();
  });
}

aklo_status aklo_bounds_write(const aklo_bounds* b, const char* dir) {
  return guarded([&] {
    require(b, "bounds");
    require(dir, "dir");
    aklo::write_bounds(b->report, dir);
  });
}

size_t aklo_bounds_num_rows(const aklo_bounds* b) { return b ? b->report.rows.size() : 0; }

size_t aklo_bounds_num_applicable(const aklo_bounds* b) {
  if (!b) return 0;
  return static_cast<size_t>(std::count_if(b->report.rows.begin(), b->report.rows.end(),
                                           [](const aklo::BoundRow& r) { return r.theorem1.applicable; }));
}

size_t aklo_bounds_violations(const aklo_bounds* b, aklo_bound_kind kind) {
  if (!b) return 0;
  switch (kind) {
    case AKLO_BOUND_T1: return b->report.violations_t1;
    case AKLO_BOUND_T2: return b->report.violations_t2;
    case AKLO_BOUND_C2: return b->report.violations_c2;
  }
  return 0;
}

void aklo_bounds_free(aklo_bounds* b) { delete b; }

aklo_status aklo_kb_create(aklo_kb** out) {
  return guarded([&] {
    require(out, "out");
    *out = new aklo_kb();
  });
}

aklo_status aklo_kb_load(const char* path, aklo_kb** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto kb = std::make_unique<aklo_kb>();
    kb->kb = aklo::load_knowledge_base(std::filesystem::path(path));
    *out = kb.release();
  });
}

aklo_status aklo_kb_save(const aklo_kb* kb, const char* path) {
  return guarded([&] {
    require(kb, "kb");
    require(path, "path");
    aklo::save_knowledge_base(kb->kb, std::filesystem::path(path));
  });
}

size_t aklo_kb_size(const aklo_kb* kb) { return kb ? kb->kb.size() : 0; }

aklo_status aklo_kb_model(const aklo_kb* kb, size_t i, int64_t* task_id, size_t* dim) {
  return guarded([&] {
    require(kb, "kb");
    if (i >= kb->kb.size()) aklo::fail(aklo::ErrorCode::InvalidArgument, "model index out of range");
    if (task_id) *task_id = kb->kb[i].task_id();
    if (dim) *dim = kb->kb[i].dim();
  });
}

aklo_status aklo_kb_weights(const aklo_kb* kb, size_t i, double* out, size_t n) {
  return guarded([&] {
    require(kb, "kb");
    if (i >= kb->kb.size()) aklo::fail(aklo::ErrorCode::InvalidArgument, "model index out of range");
    if (n > 0) require(out, "out");
    const auto w = kb->kb[i].weights();
    std::copy_n(w.begin(), std::min(n, w.size()), out);
  });
}

void aklo_kb_free(aklo_kb* kb) { delete kb; }

aklo_status aklo_session_create(const aklo_kb* kb, const char* policy, const aklo_config* cfg, size_t dim,
                                size_t horizon, uint64_t seed, aklo_session** out) {
  return guarded([&] {
    require(kb, "kb");
    require(policy, "policy");
    require(out, "out");
    *out = nullptr;
    if (dim == 0) aklo::fail(aklo::ErrorCode::InvalidArgument, "dimension must be positive");
    const aklo::ExperimentConfig c = cfg ? cfg->config : aklo::ExperimentConfig{};
    const aklo::PolicyKind p = aklo::parse_policy(policy);

    aklo::HyperParams hp;
    hp.lambda_mode = c.lambda_mode;
    hp.eps_mode = c.eps_mode;
    hp.schedule = c.schedule;
    if (!cfg) {
      hp.lambda = 1.0;
    } else if (c.lambda_mode == aklo::LambdaMode::Grid) {
      if (c.grid.size() != 1) aklo::fail(aklo::ErrorCode::InvalidArgument, "a session needs a single lambda");
      hp.lambda = c.grid.front();
    } else {
      if (!c.R || !c.X) aklo::fail(aklo::ErrorCode::InvalidArgument, "theory lambda in a session needs R and X");
      hp.R = *c.R;
      hp.X = *c.X;
    }
    const std::optional<std::size_t> known = horizon ? std::optional<std::size_t>(horizon) : std::nullopt;

    std::size_t d = dim;
    for (const auto& m : kb->kb.models()) d = std::max(d, m.dim());
    auto s = std::unique_ptr<aklo_session>(new aklo_session{
        kb, p, hp, std::mt19937_64(seed), aklo::OgdModel(d, hp.lambda_for_task(known)), nullptr});
    s->runner = std::make_unique<aklo::TaskRunner>(p, kb->kb, s->hp, known, s->rng, s->learner);
    *out = s.release();
  });
}

aklo_status aklo_session_predict(aklo_session* s, const uint64_t* indices, const double* values, size_t nnz,
                                 double* score, int* label) {
  return guarded([&] {
    require(s, "session");
    if (s->finished) aklo::fail(aklo::ErrorCode::InvalidArgument, "session already finished");
    if (nnz > 0) {
      require(indices, "indices");
      require(values, "values");
    }
    std::vector<aklo::SparseEntry> entries(nnz);
    for (std::size_t i = 0; i < nnz; ++i) entries[i] = {static_cast<std::size_t>(indices[i]), values[i]};
    const aklo::SparseVec x = aklo::SparseVec::from_unsorted(s->learner.weights().dim(), std::move(entries));
    const aklo::StepRecord& rec = s->runner->predict(x);
    if (score) *score = rec.score;
    if (label) *label = static_cast<int>(rec.predicted);
  });
}

aklo_status aklo_session_observe(aklo_session* s, int label) {
  return guarded([&] {
    require(s, "session");
    if (s->finished) aklo::fail(aklo::ErrorCode::InvalidArgument, "session already finished");
    s->runner->observe(aklo::label_from_int(label));
    ++s->steps;
    if (s->runner->last().error) ++s->mistakes;
  });
}

size_t aklo_session_mistakes(const aklo_session* s) { return s ? s->mistakes : 0; }
size_t aklo_session_steps(const aklo_session* s) { return s ? s->steps : 0; }

aklo_status aklo_session_finish(aklo_session* s, aklo_kb* kb) {
  return guarded([&] {
    require(s, "session");
    require(kb, "kb");
    if (s->finished) aklo::fail(aklo::ErrorCode::InvalidArgument, "session already finished");
    if (kb != s->owner) aklo::fail(aklo::ErrorCode::InvalidArgument, "session belongs to another knowledge base");
    if (s->runner->awaiting_label()) aklo::fail(aklo::ErrorCode::InvalidArgument, "a prediction awaits its label");
    if (s->steps == 0) aklo::fail(aklo::ErrorCode::Empty, "session saw no examples");
    s->runner.reset();
    kb->kb.append(s->learner.finalize(kb->kb.next_task_id()));
    s->finished = true;
  });
}

void aklo_session_free(aklo_session* s) { delete s; }

aklo_status aklo_convert(const char* in_path, const char* out_path, const char* format, const char* label_map,
                         int one_based) {
  return guarded([&] {
    require(in_path, "input path");
    require(out_path, "output path");
    require(format, "format");
    aklo::ConvertOptions opt;
    opt.format = aklo::parse_foreign_format(format);
    if (label_map) opt.label_map = aklo::parse_label_map(label_map);
    opt.one_based = one_based != 0;
    aklo::convert_task(std::filesystem::path(in_path), std::filesystem::path(out_path), opt);
  });
}

}  // extern "C"
