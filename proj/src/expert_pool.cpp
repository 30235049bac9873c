// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#include "expert_pool.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "error.hpp"
#include "op_counter.hpp"

namespace aklo {

void KnowledgeBase::append(FrozenModel model) {
  if (!models_.empty() && model.task_id() <= models_.back().task_id()) {
    fail(ErrorCode::InvalidArgument, "knowledge base task ids must be strictly increasing");
  }
  models_.push_back(std::move(model));
}

void KnowledgeBase::scores(const SparseVec& x, std::vector<double>& out) const {
  out.resize(models_.size());
  for (std::size_t i = 0; i < models_.size(); ++i) out[i] = models_[i].score(x);
}

// ---- persistence -----------------------------------------------------------

namespace {

constexpr std::array<char, 8> kMagic = {'A', 'K', 'L', 'O', 'K', 'B', '1', '\n'};
constexpr std::size_t kVersionByte = 6;

void put_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(buf, 8);
}

std::uint64_t get_u64(std::istream& in, const char* what) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) {
    fail(ErrorCode::Format, std::string("knowledge base file truncated while reading ") + what);
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

bool is_stored(double v) { return v != 0.0 || std::signbit(v); }

}  // namespace

void save_knowledge_base(const KnowledgeBase& kb, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, kb.size());
  for (const auto& m : kb.models()) {
    put_u64(out, static_cast<std::uint64_t>(m.task_id()));
    put_u64(out, m.dim());
    const auto w = m.weights();
    const auto nnz = static_cast<std::uint64_t>(std::count_if(w.begin(), w.end(), is_stored));
    put_u64(out, nnz);
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!is_stored(w[i])) continue;
      put_u64(out, i);
      put_u64(out, std::bit_cast<std::uint64_t>(w[i]));
    }
  }
  if (!out) fail(ErrorCode::Io, "failed writing knowledge base");
}

void save_knowledge_base(const KnowledgeBase& kb, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  save_knowledge_base(kb, out);
}

KnowledgeBase load_knowledge_base(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size())) fail(ErrorCode::Format, "knowledge base file too short");
  if (magic != kMagic) {
    if (std::memcmp(magic.data(), kMagic.data(), kVersionByte) == 0) {
      fail(ErrorCode::Version, std::string("unsupported knowledge base version '") +
                                   magic[kVersionByte] + "'");
    }
    fail(ErrorCode::Format, "not a knowledge base file (bad magic)");
  }
  KnowledgeBase kb;
  const std::uint64_t count = get_u64(in, "model count");
  for (std::uint64_t k = 0; k < count; ++k) {
    const auto task_id = static_cast<std::int64_t>(get_u64(in, "task id"));
    const std::uint64_t dim = get_u64(in, "dimension");
    const std::uint64_t nnz = get_u64(in, "nnz");
    if (nnz > dim) fail(ErrorCode::Format, "model nnz exceeds its dimension");
    if (dim > (std::uint64_t{1} << 40)) fail(ErrorCode::Format, "implausible model dimension");
    std::vector<double> w(dim, 0.0);
    std::uint64_t prev = 0;
    for (std::uint64_t e = 0; e < nnz; ++e) {
      const std::uint64_t idx = get_u64(in, "index");
      const double v = std::bit_cast<double>(get_u64(in, "value"));
      if (idx >= dim || (e > 0 && idx <= prev)) fail(ErrorCode::Format, "bad entry index in model");
      w[idx] = v;
      prev = idx;
    }
    kb.append(FrozenModel(task_id, std::move(w)));
  }
  if (in.peek() != std::char_traits<char>::eof()) fail(ErrorCode::Format, "trailing bytes after knowledge base");
  return kb;
}

KnowledgeBase load_knowledge_base(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return load_knowledge_base(in);
}

// ---- forecaster ------------------------------------------------------------

double expert_error_from_score(double score, Label y) {
  const double d = truncate(score, -1.0, 1.0) - to_double(y);
  return d * d;
}

double expert_error(const FrozenModel& model, const SparseVec& x, Label y) {
  return expert_error_from_score(model.score(x), y);
}

double make_eps_from_sum(double num_experts, double alpha_sum) {
  if (!(alpha_sum > 0.0)) fail(ErrorCode::InvalidArgument, "sum of alpha must be positive");
  if (!(num_experts >= 1.0)) fail(ErrorCode::InvalidArgument, "need at least one expert");
  return std::sqrt(std::log(num_experts) / (8.0 * alpha_sum));
}

double make_eps_fixed(std::size_t num_experts, const MixSchedule& alpha, std::size_t horizon) {
  if (horizon == 0) fail(ErrorCode::InvalidArgument, "horizon must be at least 1");
  return make_eps_from_sum(static_cast<double>(num_experts), alpha.sum(horizon));
}

double make_eps_double_trick(std::size_t num_experts, const MixSchedule& alpha, unsigned m) {
  const double s = alpha.sum(std::size_t{1} << m);
  // a non-increasing alpha with a zero prefix sum is zero throughout, so the
  // weights never reach a prediction
  if (!(s > 0.0)) return 1.0;
  return std::sqrt(std::log(static_cast<double>(num_experts)) / (8.0 * s));
}

ExpertState::ExpertState(Rule rule, std::size_t n)
    : rule_(rule), losses_(n, 0.0), weights_(n, n ? 1.0 / static_cast<double>(n) : 0.0) {}

ExpertState ExpertState::fixed(std::size_t num_experts, double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::InvalidArgument, "eps must be positive");
  ExpertState s(Rule::Fixed, num_experts);
  s.eps_ = eps;
  return s;
}

ExpertState ExpertState::double_trick(std::size_t num_experts, MixSchedule alpha) {
  ExpertState s(Rule::DoubleTrick, num_experts);
  s.alpha_ = std::move(alpha);
  s.eps_ = make_eps_double_trick(num_experts, s.alpha_, 0);
  return s;
}

ExpertState ExpertState::uniform(std::size_t num_experts) {
  return ExpertState(Rule::Uniform, num_experts);
}

ExpertState ExpertState::from_losses(std::vector<double> losses, double eps) {
  ExpertState s = fixed(losses.size(), eps);
  s.losses_ = std::move(losses);
  s.recompute_weights();
  return s;
}

void ExpertState::recompute_weights() {
  const std::size_t n = losses_.size();
  if (n == 0) return;
  const double lo = *std::min_element(losses_.begin(), losses_.end());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double shifted = losses_[i] - lo;
    // shifted == 0 is handled apart so that eps = inf keeps all argmins.
    weights_[i] = shifted == 0.0 ? 1.0 : std::exp(-eps_ * shifted);
    total += weights_[i];
  }
  for (double& p : weights_) p /= total;
  count_ops(n);
}

void ExpertState::accumulate(const KnowledgeBase& kb, const SparseVec& x, Label y) {
  if (kb.empty()) fail(ErrorCode::Empty, "expert update on an empty knowledge base");
  std::vector<double> scores;
  kb.scores(x, scores);
  accumulate_scores(scores, y);
}

void ExpertState::accumulate_scores(std::span<const double> scores, Label y) {
  if (losses_.empty()) fail(ErrorCode::Empty, "expert update on an empty knowledge base");
  if (scores.size() != losses_.size()) {
    fail(ErrorCode::Dimension, "knowledge base size does not match expert state");
  }
  ++t_;
  if (rule_ == Rule::Uniform) return;
  for (std::size_t i = 0; i < scores.size(); ++i) losses_[i] += expert_error_from_score(scores[i], y);
  count_ops(scores.size());
  if (rule_ == Rule::DoubleTrick && std::has_single_bit(t_)) {
    std::fill(losses_.begin(), losses_.end(), 0.0);
    interval_ = static_cast<unsigned>(std::bit_width(t_) - 1);
    eps_ = make_eps_double_trick(losses_.size(), alpha_, interval_);
    resets_.push_back(t_);
  }
  recompute_weights();
}

Confidence predict_sum_from_scores(std::span<const double> weights, std::span<const double> scores) {
  if (scores.empty()) fail(ErrorCode::Empty, "prediction from an empty knowledge base");
  if (weights.size() != scores.size()) fail(ErrorCode::Dimension, "weights and scores differ in size");
  double s = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) s += weights[i] * scores[i];
  count_ops(scores.size());
  return Confidence::from_score(s);
}

Confidence predict_sum(const ExpertState& state, const KnowledgeBase& kb, const SparseVec& x) {
  if (kb.empty()) fail(ErrorCode::Empty, "prediction from an empty knowledge base");
  std::vector<double> scores;
  kb.scores(x, scores);
  return predict_sum_from_scores(state.weights(), scores);
}

std::size_t sample_expert(std::span<const double> weights, double u) {
  if (weights.empty()) fail(ErrorCode::Empty, "sampling from an empty knowledge base");
  count_ops(weights.size());
  double cdf = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last_positive = i;
    cdf += weights[i];
    if (u < cdf) return i;
  }
  return last_positive;
}

double uniform_variate(std::mt19937_64& rng) {
  // 53 random bits mapped to [0, 1).
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Confidence predict_sample(const ExpertState& state, const KnowledgeBase& kb, const SparseVec& x,
                          std::mt19937_64& rng) {
  if (kb.empty()) fail(ErrorCode::Empty, "prediction from an empty knowledge base");
  const std::size_t i = sample_expert(state.weights(), uniform_variate(rng));
  return Confidence::from_score(kb[i].score(x));
}

}  // namespace aklo
