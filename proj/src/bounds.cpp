// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#include "bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "error.hpp"

namespace aklo {

double cumulative_hinge(std::span<const double> w, const TaskStream& stream, std::span<const double> weights) {
  double total = 0.0;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    const auto& [x, y] = stream.examples[t];
    const double loss = std::max(0.0, 1.0 - to_double(y) * dot(w, x));
    total += weights.empty() ? loss : weights[t] * loss;
  }
  return total;
}

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

void project_to_ball(std::vector<double>& w, double R) {
  const double n = norm(w);
  if (n > R) {
    for (double& a : w) a *= R / n;
  }
}

}  // namespace

WStar comparator_wstar(const TaskStream& stream, double R, std::uint64_t seed, std::size_t iterations,
                       std::size_t restarts) {
  if (!(R >= 0.0)) fail(ErrorCode::InvalidArgument, "comparator radius must be nonnegative");
  const std::size_t d = std::max<std::size_t>(stream.dim, 1);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  WStar best{std::vector<double>(d, 0.0), cumulative_hinge(std::vector<double>(d, 0.0), stream)};
  std::vector<double> grad(d);
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    std::vector<double> w(d, 0.0);
    if (r > 0 && R > 0.0) {
      for (double& a : w) a = gauss(rng);
      const double radius = R * std::pow(uniform_variate(rng), 1.0 / static_cast<double>(d));
      const double n = norm(w);
      for (double& a : w) a *= radius / n;
    }
    for (std::size_t k = 1; k <= iterations; ++k) {
      const double obj = cumulative_hinge(w, stream);
      if (obj < best.objective) best = {w, obj};
      std::fill(grad.begin(), grad.end(), 0.0);
      for (const auto& [x, y] : stream.examples) {
        if (to_double(y) * dot(w, x) < 1.0) {
          for (const auto& e : x.entries()) grad[e.index] -= to_double(y) * e.value;
        }
      }
      const double gn = norm(grad);
      if (gn == 0.0) break;
      const double step = R / std::sqrt(static_cast<double>(k));
      for (std::size_t i = 0; i < d; ++i) w[i] -= step * grad[i] / gn;
      project_to_ball(w, R);
    }
    const double obj = cumulative_hinge(w, stream);
    if (obj < best.objective) best = {w, obj};
  }
  return best;
}

WStarStar comparator_wstarstar(const KnowledgeBase& kb, const TaskStream& stream) {
  if (kb.empty()) fail(ErrorCode::Empty, "comparator over an empty knowledge base");
  WStarStar best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t j = 0; j < kb.size(); ++j) {
    double total = 0.0;
    for (const auto& [x, y] : stream.examples) total += expert_error(kb[j], x, y);
    if (total < best.objective) best = {j, total};
  }
  return best;
}

Comparators compute_comparators(const BoundContext& ctx, std::uint64_t seed) {
  return {comparator_wstar(ctx.stream, ctx.R, seed), comparator_wstarstar(ctx.kb, ctx.stream)};
}

namespace {

struct Sums {
  double n = 0.0;
  double alpha = 0.0;
  double one_minus_alpha = 0.0;
  double alpha_sq = 0.0;
  double expert_term = 0.0;
  double learner_term = 0.0;
};

// Shared data-dependent part of all three bounds, or a reason why they do
// not apply.
BoundTerms prepare(const BoundContext& ctx, const Comparators& cmp, Sums& s) {
  BoundTerms b;
  const std::size_t n = ctx.stream.size();
  if (n == 0) {
    b.reason = "empty task";
    return b;
  }
  if (ctx.kb.size() < 2) {
    b.reason = "fewer than two experts";
    return b;
  }
  std::vector<double> alpha(n), rest(n);
  for (std::size_t t = 1; t <= n; ++t) {
    alpha[t - 1] = ctx.schedule.at(t);
    rest[t - 1] = 1.0 - alpha[t - 1];
    if (t > 1 && alpha[t - 1] > alpha[t - 2]) {
      b.reason = "alpha schedule is not non-increasing";
      return b;
    }
  }
  s.n = static_cast<double>(n);
  for (double a : alpha) {
    s.alpha += a;
    s.one_minus_alpha += 1.0 - a;
    s.alpha_sq += a * a;
  }
  const FrozenModel& best = ctx.kb[cmp.wstarstar.index];
  for (std::size_t t = 0; t < n; ++t) {
    const auto& [x, y] = ctx.stream.examples[t];
    s.expert_term += alpha[t] * expert_error(best, x, y);
  }
  s.learner_term = cumulative_hinge(cmp.wstar.w, ctx.stream, rest);
  b.applicable = true;
  b.expert_term = s.expert_term;
  b.learner_term = s.learner_term;
  return b;
}

}  // namespace

BoundTerms bound_theorem1(const BoundContext& ctx, const Comparators& cmp) {
  Sums s;
  BoundTerms b = prepare(ctx, cmp, s);
  if (!b.applicable) return b;
  const double log_t = std::log(static_cast<double>(ctx.kb.size()));
  b.forecaster_regret = 4.0 * std::sqrt(2.0 * log_t * s.alpha);
  b.learner_regret = s.one_minus_alpha * ctx.R * (ctx.X + ctx.R) * std::sqrt((std::log(s.n) + 1.0) / s.n);
  b.value = b.expert_term + b.learner_term + b.forecaster_regret + b.learner_regret;
  return b;
}

BoundTerms bound_theorem1(const BoundContext& ctx) {
  if (ctx.kb.size() < 2) return BoundTerms{false, "fewer than two experts"};
  return bound_theorem1(ctx, compute_comparators(ctx));
}

BoundTerms bound_theorem2(const BoundContext& ctx, const Comparators& cmp) {
  Sums s;
  BoundTerms b = prepare(ctx, cmp, s);
  if (!b.applicable) return b;
  const double log_t = std::log(static_cast<double>(ctx.kb.size()));
  b.forecaster_regret = 4.0 * std::log(s.n) * std::sqrt(2.0 * log_t * s.alpha);
  b.learner_regret = ctx.R * (ctx.X + ctx.R) * s.one_minus_alpha;
  b.value = b.expert_term + b.learner_term + b.forecaster_regret + b.learner_regret;
  return b;
}

BoundTerms bound_theorem2(const BoundContext& ctx) {
  if (ctx.kb.size() < 2) return BoundTerms{false, "fewer than two experts"};
  return bound_theorem2(ctx, compute_comparators(ctx));
}

BoundTerms bound_corollary2(const BoundContext& ctx, const Comparators& cmp, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  BoundTerms b = bound_theorem1(ctx, cmp);
  if (!b.applicable) return b;
  Sums s;
  prepare(ctx, cmp, s);
  b.extra = std::sqrt(8.0 * s.alpha_sq * std::log(1.0 / delta));
  b.value += b.extra;
  return b;
}

std::size_t corollary1_threshold(const MixSchedule& alpha, double K, std::size_t horizon) {
  if (!(K > 0.0)) fail(ErrorCode::InvalidArgument, "K must be positive");
  const double threshold = K / (1.0 + K);
  std::size_t t0 = 0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    if (alpha.at(t) >= threshold) t0 = t;
  }
  return t0;
}

double corollary1_k(double X, double R, double zeta, double gamma, std::size_t num_experts) {
  if (!(zeta > 0.0)) fail(ErrorCode::NotApplicable, "best expert has zero error");
  if (num_experts < 2) fail(ErrorCode::NotApplicable, "fewer than two experts");
  if (!(gamma > 0.0 && gamma < 1.0)) fail(ErrorCode::InvalidArgument, "gamma must lie in (0, 1)");
  const double a = (1.0 + X * R) / (gamma * zeta);
  const double b = R * (X + R) / (4.0 * gamma * std::sqrt(2.0 * std::log(static_cast<double>(num_experts))));
  return std::max(a, b);
}

double max_feature_norm(std::span<const TaskStream> tasks) {
  double x = 0.0;
  for (const auto& t : tasks) {
    for (const auto& ex : t.examples) x = std::max(x, ex.x.l2_norm());
  }
  return x;
}

}  // namespace aklo
