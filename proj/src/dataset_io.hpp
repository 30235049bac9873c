// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "label.hpp"
#include "vec.hpp"

namespace aklo {

struct Example {
  SparseVec x;
  Label y;

  friend bool operator==(const Example&, const Example&) = default;
};

/// One task's examples in arrival order.
struct TaskStream {
  std::vector<Example> examples;
  std::optional<std::size_t> known_horizon;
  std::size_t dim = 0;
  std::int64_t id = 0;

  std::size_t size() const noexcept { return examples.size(); }
  bool empty() const noexcept { return examples.empty(); }

  friend bool operator==(const TaskStream&, const TaskStream&) = default;
};

// Sparse task file, one example per line:
//
//   <label> <idx>:<val> <idx>:<val> ...
//
// label is +1/1/-1, indices are nonnegative decimal integers, blank lines and
// lines starting with '#' are skipped.

/// Parsed but not yet dimensioned task file.
struct RawTask {
  std::vector<Label> labels;
  std::vector<std::vector<SparseEntry>> rows;
  std::optional<std::size_t> max_index;
};

RawTask parse_task(std::istream& in, const std::string& source);
RawTask read_task_file(const std::filesystem::path& path);

struct LoadOptions {
  std::optional<std::size_t> dim;
  bool add_bias = false;
};

/// Builds a stream of dimension dim (or max index + 1), then appends a bias
/// feature of value 1 at the last slot when requested.
TaskStream build_task(const RawTask& raw, const LoadOptions& options, const std::string& source);
TaskStream load_task(const std::filesystem::path& path, const LoadOptions& options);

/// Canonical form: sorted indices, single spaces, shortest round-trip values.
void write_task(const TaskStream& stream, std::ostream& out);
void write_task(const TaskStream& stream, const std::filesystem::path& path);

/// k examples drawn uniformly without replacement, in random order.
TaskStream subsample(const TaskStream& stream, std::size_t k, std::mt19937_64& rng);

/// Uniform random reordering of a stream's examples.
void shuffle_examples(TaskStream& stream, std::mt19937_64& rng);

// Manifest, key = value per line:
//
//   task = relative/or/absolute/path     (repeatable, order kept)
//   add_bias = true|false
//   subsample = <count>
//   seed = <integer>
//   dim = <integer>
struct TaskManifest {
  std::vector<std::filesystem::path> tasks;
  std::optional<std::size_t> dim;
  bool add_bias = false;
  std::optional<std::size_t> subsample;
  std::uint64_t seed = 0;
};

/// Task paths are resolved relative to the manifest's directory.
TaskManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const TaskManifest& manifest, const std::filesystem::path& path);

/// Loads every task with a common dimension (max index over all tasks + 1
/// unless overridden, plus one for the bias slot) and applies subsampling.
std::vector<TaskStream> load_manifest_tasks(const TaskManifest& manifest);

/// Writes tasks as task_NNN.txt plus manifest.txt under dir.
void write_dataset(const std::vector<TaskStream>& tasks, const std::filesystem::path& dir);

// Converters from foreign formats into the task format. Labels go through
// label_map; a label missing from the map is an error.
enum class ForeignFormat { Libsvm, DenseCsv };

struct ConvertOptions {
  ForeignFormat format = ForeignFormat::Libsvm;
  std::map<std::string, int> label_map = {{"+1", 1}, {"1", 1}, {"-1", -1}};
  bool one_based = true;
};

/// Parses "0:-1,1:+1".
std::map<std::string, int> parse_label_map(const std::string& text);
ForeignFormat parse_foreign_format(const std::string& text);

void convert_task(std::istream& in, std::ostream& out, const ConvertOptions& options,
                  const std::string& source);
void convert_task(const std::filesystem::path& in, const std::filesystem::path& out,
                  const ConvertOptions& options);

std::string format_double(double v);

}  // namespace aklo
