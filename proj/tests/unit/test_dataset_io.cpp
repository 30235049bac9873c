// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "dataset_io.hpp"
#include "doctest.h"
#include "synth_data.hpp"

using namespace aklo;
namespace fs = std::filesystem;

namespace {

RawTask parse(const std::string& text) {
  std::istringstream in(text);
  return parse_task(in, "mem");
}

TaskStream build(const std::string& text, LoadOptions opt = {}) { return build_task(parse(text), opt, "mem"); }

std::string canonical(const TaskStream& s) {
  std::ostringstream out;
  write_task(s, out);
  return out.str();
}

std::string error_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("task line format") {
  const TaskStream s = build("+1 0:1.5 3:-2\n", {5, false});
  REQUIRE(s.size() == 1);
  CHECK(s.dim == 5);
  CHECK(s.examples[0].y == Label::Positive);
  CHECK(s.examples[0].x == SparseVec(5, {{0, 1.5}, {3, -2.0}}));
  CHECK(s.known_horizon == std::optional<std::size_t>(1));

  const TaskStream t = build("# comment\n\n1 2:1\n-1 0:4\n");
  CHECK(t.dim == 3);
  CHECK(t.size() == 2);
  CHECK(t.examples[1].y == Label::Negative);
}

TEST_CASE("malformed input") {
  CHECK(error_of([] { build(""); }).find("empty task") != std::string::npos);
  CHECK(error_of([] { build("# only a comment\n"); }).find("empty task") != std::string::npos);
  CHECK(error_of([] { build("+1 0:1\n0 1:1\n"); }).find("mem:2") != std::string::npos);
  CHECK(error_of([] { build("+1 0:1\n2 1:1\n"); }).find("mem:2") != std::string::npos);
  CHECK(error_of([] { build("+1 a:1\n"); }).find("mem:1") != std::string::npos);
  CHECK(error_of([] { build("+1 0:x\n"); }).find("mem:1") != std::string::npos);
  CHECK(error_of([] { build("+1 1:1 1:2\n"); }) != "");
  CHECK(error_of([] { build("+1 7:1\n", {5, false}); }) != "");
  CHECK_THROWS_AS(read_task_file("/nonexistent/task.txt"), Error);
}

TEST_CASE("bias slot") {
  const TaskStream s = build("+1 0:1 8:2\n-1 3:1\n", {9, true});
  CHECK(s.dim == 10);
  for (const auto& ex : s.examples) {
    const auto last = ex.x.entries().back();
    CHECK(last.index == 9);
    CHECK(last.value == 1.0);
  }
  CHECK(s.examples[1].x.nnz() == 2);
}

TEST_CASE("canonical round trip") {
  const TaskStream s = build("+1   3:2.50   0:1e0\n-1 2:-0.125\n1\n");
  const std::string text = canonical(s);
  CHECK(text == "+1 0:1 3:2.5\n-1 2:-0.125\n+1\n");
  CHECK(canonical(build(text)) == text);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1e3);
  TaskStream r;
  r.dim = 40;
  for (int i = 0; i < 200; ++i) {
    std::vector<SparseEntry> e;
    for (std::size_t j = 0; j < 40; ++j) {
      if (rng() % 4 == 0) e.push_back({j, g(rng)});
    }
    r.examples.push_back({SparseVec(40, e), rng() % 2 ? Label::Positive : Label::Negative});
  }
  const TaskStream back = build(canonical(r), {40, false});
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(back.examples[i] == r.examples[i]);
}

TEST_CASE("subsample") {
  const TaskStream s = build("+1 0:1\n-1 0:2\n+1 0:3\n-1 0:4\n+1 0:5\n");
  std::mt19937_64 rng(1);
  const TaskStream all = subsample(s, s.size(), rng);
  std::multiset<double> a, b;
  for (const auto& ex : s.examples) a.insert(ex.x.entries()[0].value);
  for (const auto& ex : all.examples) b.insert(ex.x.entries()[0].value);
  CHECK(a == b);
  CHECK(all.known_horizon == std::optional<std::size_t>(5));

  std::mt19937_64 r1(9), r2(9);
  const TaskStream one = subsample(s, 1, r1);
  CHECK(one.size() == 1);
  CHECK(one == subsample(s, 1, r2));
  CHECK_THROWS_AS(subsample(s, 6, rng), Error);

  std::array<int, 5> hits{};
  std::mt19937_64 r3(4);
  for (int i = 0; i < 5000; ++i) ++hits[static_cast<int>(subsample(s, 1, r3).examples[0].x.entries()[0].value) - 1];
  for (int h : hits) CHECK(h > 800);
}

TEST_CASE("manifest") {
  TempDir dir("aklo_manifest_test");
  fs::create_directories(dir.path / "sub");
  write_file(dir.path / "sub" / "a.txt", "+1 0:1 8:1\n-1 2:1\n");
  write_file(dir.path / "b.txt", "-1 4:1\n+1 1:1\n+1 0:2\n");
  write_file(dir.path / "m.txt", "# tasks\ntask = sub/a.txt\ntask = b.txt\nadd_bias = true\n");

  const TaskManifest m = read_manifest(dir.path / "m.txt");
  CHECK(m.tasks.size() == 2);
  CHECK(m.add_bias);
  const auto tasks = load_manifest_tasks(m);
  REQUIRE(tasks.size() == 2);
  CHECK(tasks[0].dim == 10);
  CHECK(tasks[1].dim == 10);
  CHECK(tasks[1].id == 1);
  CHECK(tasks[1].examples[0].x == SparseVec(10, {{4, 1.0}, {9, 1.0}}));

  write_file(dir.path / "bad.txt", "task = b.txt\nflavour = mint\n");
  CHECK_THROWS_AS(read_manifest(dir.path / "bad.txt"), Error);
  write_file(dir.path / "missing.txt", "task = nope.txt\n");
  CHECK_THROWS_AS(load_manifest_tasks(read_manifest(dir.path / "missing.txt")), Error);
  write_file(dir.path / "none.txt", "add_bias = false\n");
  CHECK_THROWS_AS(load_manifest_tasks(read_manifest(dir.path / "none.txt")), Error);
}

TEST_CASE("manifest subsampling is seeded") {
  TempDir dir("aklo_manifest_sub");
  std::string body;
  for (int i = 0; i < 50; ++i) body += (i % 2 ? "+1 0:" : "-1 0:") + std::to_string(i + 1) + "\n";
  write_file(dir.path / "t.txt", body);
  write_file(dir.path / "m.txt", "task = t.txt\nsubsample = 10\nseed = 3\n");
  const auto a = load_manifest_tasks(read_manifest(dir.path / "m.txt"));
  const auto b = load_manifest_tasks(read_manifest(dir.path / "m.txt"));
  CHECK(a[0].size() == 10);
  CHECK(a == b);
}

TEST_CASE("dataset write and reload") {
  TempDir dir("aklo_dataset_write");
  SynSpec spec;
  spec.seed = 5;
  const auto ds = generate(spec);
  write_dataset(ds.tasks, dir.path);
  CHECK(fs::exists(dir.path / "task_000.txt"));
  CHECK(fs::exists(dir.path / "task_049.txt"));
  const auto back = load_manifest_tasks(read_manifest(dir.path / "manifest.txt"));
  REQUIRE(back.size() == 50);
  for (std::size_t k = 0; k < 50; ++k) {
    CHECK(back[k].examples == ds.tasks[k].examples);
    CHECK(back[k].dim == 2);
  }
}

TEST_CASE("libsvm conversion") {
  std::istringstream in("1 1:0.5 3:2\n0 2:1\n");
  std::ostringstream out;
  ConvertOptions opt;
  opt.label_map = parse_label_map("0:-1,1:+1");
  convert_task(in, out, opt, "mem");
  CHECK(out.str() == "+1 0:0.5 2:2\n-1 1:1\n");

  std::istringstream zero_based("+1 0:1\n");
  std::ostringstream out2;
  ConvertOptions z;
  z.one_based = false;
  convert_task(zero_based, out2, z, "mem");
  CHECK(out2.str() == "+1 0:1\n");

  std::istringstream unmapped("0 1:1\n");
  std::ostringstream sink;
  CHECK_THROWS_AS(convert_task(unmapped, sink, ConvertOptions{}, "mem"), Error);
}

TEST_CASE("dense csv conversion") {
  std::istringstream in("1,0.5,0,2\n0,0,0,1\n");
  std::ostringstream out;
  ConvertOptions opt;
  opt.format = ForeignFormat::DenseCsv;
  opt.label_map = parse_label_map("0:-1,1:+1");
  convert_task(in, out, opt, "mem");
  CHECK(out.str() == "+1 0:0.5 2:2\n-1 2:1\n");
}

TEST_CASE("label maps and formats") {
  const auto m = parse_label_map("0:-1,1:+1");
  CHECK(m.at("0") == -1);
  CHECK(m.at("1") == 1);
  CHECK_THROWS_AS(parse_label_map("0:2"), Error);
  CHECK_THROWS_AS(parse_label_map(""), Error);
  CHECK(parse_foreign_format("csv") == ForeignFormat::DenseCsv);
  CHECK_THROWS_AS(parse_foreign_format("arff"), Error);
}
