// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#include "dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string_view>

#include "error.hpp"

namespace aklo {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

Label parse_label(std::string_view tok, const std::string& source, std::size_t line) {
  int v = 0;
  if (!parse_number(tok, v) || (v != 1 && v != -1)) {
    fail(ErrorCode::Format, where(source, line) + "label must be +1 or -1, got '" + std::string(tok) + "'");
  }
  return v == 1 ? Label::Positive : Label::Negative;
}

SparseEntry parse_pair(std::string_view tok, const std::string& source, std::size_t line, bool one_based) {
  const auto colon = tok.find(':');
  std::size_t idx = 0;
  double val = 0.0;
  if (colon == std::string_view::npos || !parse_number(tok.substr(0, colon), idx) ||
      !parse_number(tok.substr(colon + 1), val) || !std::isfinite(val)) {
    fail(ErrorCode::Format, where(source, line) + "malformed feature '" + std::string(tok) + "'");
  }
  if (one_based) {
    if (idx == 0) fail(ErrorCode::Format, where(source, line) + "index 0 in one-based input");
    --idx;
  }
  return {idx, val};
}

void sort_row(std::vector<SparseEntry>& row, const std::string& source, std::size_t line) {
  std::stable_sort(row.begin(), row.end(), [](auto& a, auto& b) { return a.index < b.index; });
  for (std::size_t k = 1; k < row.size(); ++k) {
    if (row[k].index == row[k - 1].index) {
      fail(ErrorCode::Format, where(source, line) + "duplicate feature index " + std::to_string(row[k].index));
    }
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

RawTask parse_task(std::istream& in, const std::string& source) {
  RawTask raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto toks = split_ws(body);
    raw.labels.push_back(parse_label(toks[0], source, line_no));
    std::vector<SparseEntry> row;
    row.reserve(toks.size() - 1);
    for (std::size_t k = 1; k < toks.size(); ++k) row.push_back(parse_pair(toks[k], source, line_no, false));
    sort_row(row, source, line_no);
    if (!row.empty()) {
      raw.max_index = std::max(raw.max_index.value_or(0), row.back().index);
    }
    raw.rows.push_back(std::move(row));
  }
  if (in.bad()) fail(ErrorCode::Io, "read error in " + source);
  if (raw.rows.empty()) fail(ErrorCode::Empty, source + ": empty task");
  return raw;
}

RawTask read_task_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open task file '" + path.string() + "'");
  return parse_task(in, path.string());
}

TaskStream build_task(const RawTask& raw, const LoadOptions& options, const std::string& source) {
  std::size_t dim = options.dim.value_or(raw.max_index ? *raw.max_index + 1 : 1);
  if (dim == 0) fail(ErrorCode::InvalidArgument, "dimension must be positive");
  if (raw.max_index && *raw.max_index >= dim) {
    fail(ErrorCode::Dimension, source + ": feature index " + std::to_string(*raw.max_index) +
                                   " exceeds dimension " + std::to_string(dim));
  }
  TaskStream stream;
  stream.examples.reserve(raw.rows.size());
  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    SparseVec x(dim, raw.rows[i]);
    if (options.add_bias) x = x.with_bias(1.0);
    stream.examples.push_back({std::move(x), raw.labels[i]});
  }
  stream.dim = options.add_bias ? dim + 1 : dim;
  stream.known_horizon = stream.size();
  return stream;
}

TaskStream load_task(const std::filesystem::path& path, const LoadOptions& options) {
  return build_task(read_task_file(path), options, path.string());
}

void write_task(const TaskStream& stream, std::ostream& out) {
  for (const auto& ex : stream.examples) {
    out << (ex.y == Label::Positive ? "+1" : "-1");
    for (const auto& e : ex.x.entries()) out << ' ' << e.index << ':' << format_double(e.value);
    out << '\n';
  }
}

void write_task(const TaskStream& stream, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
  write_task(stream, out);
  if (!out) fail(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

TaskStream subsample(const TaskStream& stream, std::size_t k, std::mt19937_64& rng) {
  if (k > stream.size()) {
    fail(ErrorCode::InvalidArgument, "cannot subsample " + std::to_string(k) + " of " +
                                         std::to_string(stream.size()) + " examples");
  }
  std::vector<std::size_t> order(stream.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  TaskStream out;
  out.dim = stream.dim;
  out.id = stream.id;
  out.examples.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.examples.push_back(stream.examples[order[i]]);
  out.known_horizon = k;
  return out;
}

void shuffle_examples(TaskStream& stream, std::mt19937_64& rng) {
  std::shuffle(stream.examples.begin(), stream.examples.end(), rng);
}

// ---- manifest --------------------------------------------------------------

TaskManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open manifest '" + path.string() + "'");
  const auto base = path.parent_path();
  TaskManifest m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::Format, where(path.string(), line_no) + "expected 'key = value'");
    }
    const auto key = trim(body.substr(0, eq));
    const auto value = trim(body.substr(eq + 1));
    std::size_t n = 0;
    if (key == "task") {
      std::filesystem::path p{std::string(value)};
      m.tasks.push_back(p.is_absolute() ? p : base / p);
    } else if (key == "add_bias") {
      if (value == "true" || value == "1") m.add_bias = true;
      else if (value == "false" || value == "0") m.add_bias = false;
      else fail(ErrorCode::Format, where(path.string(), line_no) + "add_bias must be true or false");
    } else if (key == "subsample" && parse_number(value, n)) {
      m.subsample = n;
    } else if (key == "dim" && parse_number(value, n) && n > 0) {
      m.dim = n;
    } else if (key == "seed" && parse_number(value, m.seed)) {
    } else {
      fail(ErrorCode::Format, where(path.string(), line_no) + "bad manifest entry '" + std::string(body) + "'");
    }
  }
  if (m.tasks.empty()) fail(ErrorCode::Empty, path.string() + ": manifest lists no tasks");
  return m;
}

void write_manifest(const TaskManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << "# aklo task manifest\n";
  if (manifest.dim) out << "dim = " << *manifest.dim << '\n';
  out << "add_bias = " << (manifest.add_bias ? "true" : "false") << '\n';
  if (manifest.subsample) out << "subsample = " << *manifest.subsample << '\n';
  out << "seed = " << manifest.seed << '\n';
  const auto base = path.parent_path();
  for (const auto& t : manifest.tasks) {
    out << "task = " << t.lexically_relative(base.empty() ? "." : base).generic_string() << '\n';
  }
  if (!out) fail(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

std::vector<TaskStream> load_manifest_tasks(const TaskManifest& manifest) {
  std::vector<RawTask> raws;
  raws.reserve(manifest.tasks.size());
  std::optional<std::size_t> max_index;
  for (const auto& p : manifest.tasks) {
    raws.push_back(read_task_file(p));
    if (raws.back().max_index) max_index = std::max(max_index.value_or(0), *raws.back().max_index);
  }
  LoadOptions opts;
  opts.dim = manifest.dim.value_or(max_index ? *max_index + 1 : 1);
  opts.add_bias = manifest.add_bias;

  std::mt19937_64 rng(manifest.seed);
  std::vector<TaskStream> tasks;
  tasks.reserve(raws.size());
  for (std::size_t j = 0; j < raws.size(); ++j) {
    TaskStream t = build_task(raws[j], opts, manifest.tasks[j].string());
    t.id = static_cast<std::int64_t>(j);
    if (manifest.subsample) {
      if (*manifest.subsample > t.size()) {
        fail(ErrorCode::InvalidArgument, manifest.tasks[j].string() + ": subsample " +
                                             std::to_string(*manifest.subsample) + " exceeds " +
                                             std::to_string(t.size()) + " examples");
      }
      t = subsample(t, *manifest.subsample, rng);
    }
    tasks.push_back(std::move(t));
  }
  return tasks;
}

void write_dataset(const std::vector<TaskStream>& tasks, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create '" + dir.string() + "': " + ec.message());
  TaskManifest m;
  std::size_t dim = 1;
  for (std::size_t j = 0; j < tasks.size(); ++j) {
    char name[32];
    std::snprintf(name, sizeof name, "task_%03zu.txt", j);
    write_task(tasks[j], dir / name);
    m.tasks.push_back(dir / name);
    dim = std::max(dim, tasks[j].dim);
  }
  m.dim = dim;
  write_manifest(m, dir / "manifest.txt");
}

// ---- converters ------------------------------------------------------------

std::map<std::string, int> parse_label_map(const std::string& text) {
  std::map<std::string, int> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    const auto colon = item.rfind(':');
    int v = 0;
    if (colon == std::string_view::npos || !parse_number(item.substr(colon + 1), v) || (v != 1 && v != -1)) {
      fail(ErrorCode::InvalidArgument, "bad label map entry '" + std::string(item) + "'");
    }
    out[std::string(trim(item.substr(0, colon)))] = v;
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (out.empty()) fail(ErrorCode::InvalidArgument, "empty label map");
  return out;
}

ForeignFormat parse_foreign_format(const std::string& text) {
  if (text == "libsvm") return ForeignFormat::Libsvm;
  if (text == "csv") return ForeignFormat::DenseCsv;
  fail(ErrorCode::InvalidArgument, "unknown input format '" + text + "' (libsvm|csv)");
}

void convert_task(std::istream& in, std::ostream& out, const ConvertOptions& options,
                  const std::string& source) {
  TaskStream stream;
  std::size_t max_dim = 1;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<Label, std::vector<SparseEntry>>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<std::string_view> toks;
    if (options.format == ForeignFormat::DenseCsv) {
      std::string_view rest = body;
      while (true) {
        const auto comma = rest.find(',');
        toks.push_back(trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
    } else {
      toks = split_ws(body);
    }
    const auto it = options.label_map.find(std::string(toks[0]));
    if (it == options.label_map.end()) {
      fail(ErrorCode::Format, where(source, line_no) + "label '" + std::string(toks[0]) + "' not in label map");
    }
    std::vector<SparseEntry> row;
    for (std::size_t k = 1; k < toks.size(); ++k) {
      if (options.format == ForeignFormat::DenseCsv) {
        double v = 0.0;
        if (!parse_number(toks[k], v) || !std::isfinite(v)) {
          fail(ErrorCode::Format, where(source, line_no) + "bad value '" + std::string(toks[k]) + "'");
        }
        if (v != 0.0) row.push_back({k - 1, v});
      } else {
        row.push_back(parse_pair(toks[k], source, line_no, options.one_based));
      }
    }
    sort_row(row, source, line_no);
    if (!row.empty()) max_dim = std::max(max_dim, row.back().index + 1);
    rows.emplace_back(label_from_int(it->second), std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::Empty, source + ": empty task");
  for (auto& [y, row] : rows) stream.examples.push_back({SparseVec(max_dim, std::move(row)), y});
  stream.dim = max_dim;
  write_task(stream, out);
}

void convert_task(const std::filesystem::path& in, const std::filesystem::path& out,
                  const ConvertOptions& options) {
  std::ifstream is(in);
  if (!is) fail(ErrorCode::Io, "cannot open '" + in.string() + "'");
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorCode::Io, "cannot write '" + out.string() + "'");
  convert_task(is, os, options, in.string());
}

}  // namespace aklo
