// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#include "synth_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace aklo {

namespace {

struct DistParams {
  std::array<double, 2> mean;
  std::array<double, 2> boundary;
  bool adversarial;
};

SynDataset generate_tasks(const SynSpec& spec, std::mt19937_64& rng, const DistParams& d1,
                          const DistParams& d2) {
  if (spec.n_tasks == 0) fail(ErrorCode::InvalidArgument, "synthetic task count must be positive");
  if (spec.n_per_task == 0) fail(ErrorCode::InvalidArgument, "synthetic tasks need examples");
  if (!(spec.noise_variance >= 0.0)) fail(ErrorCode::InvalidArgument, "noise variance must be >= 0");

  const double noise_sd = std::sqrt(spec.noise_variance);
  std::normal_distribution<double> unit(0.0, 1.0);

  SynDataset generated;
  // the first distribution gets the extra task when the count is odd
  const std::size_t half = spec.n_tasks - spec.n_tasks / 2;
  for (std::size_t j = 0; j < spec.n_tasks; ++j) {
    const int dist = j < half ? 0 : 1;
    const DistParams& p = dist == 0 ? d1 : d2;
    const double e = noise_sd * unit(rng);
    const std::array<double, 2> a = {p.boundary[0] + e, p.boundary[1] + e};

    TaskStream t;
    t.dim = 2;
    t.id = static_cast<std::int64_t>(j);
    t.known_horizon = spec.n_per_task;
    t.examples.reserve(spec.n_per_task);
    for (std::size_t i = 0; i < spec.n_per_task; ++i) {
      const std::array<double, 2> x = {p.mean[0] + unit(rng), p.mean[1] + unit(rng)};
      t.examples.push_back({SparseVec::from_dense(x), syn_label(a, x, p.adversarial)});
    }
    generated.tasks.push_back(std::move(t));
    generated.distribution.push_back(dist);
    generated.boundary.push_back(a);
  }

  std::vector<std::size_t> order(spec.n_tasks);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  SynDataset out;
  for (std::size_t k : order) {
    out.tasks.push_back(std::move(generated.tasks[k]));
    out.distribution.push_back(generated.distribution[k]);
    out.boundary.push_back(generated.boundary[k]);
  }
  return out;
}

}  // namespace

Label syn_label(const std::array<double, 2>& a, const std::array<double, 2>& x, bool adversarial) {
  const double s = a[0] * x[0] + a[1] * x[1];
  return sign_label(adversarial ? -s : s);
}

SynDataset gen_syn1(const SynSpec& spec, std::mt19937_64& rng) {
  return generate_tasks(spec, rng, {{10.0, 10.0}, {-1.0, 1.0}, false},
                        {{20.0, 5.0}, {-0.25, 1.0}, false});
}

SynDataset gen_syn2(const SynSpec& spec, std::mt19937_64& rng) {
  return generate_tasks(spec, rng, {{10.0, 10.0}, {-1.0, 1.0}, false},
                        {{10.0, 10.0}, {-1.0, 1.0}, true});
}

SynDataset generate(const SynSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  return spec.kind == SynKind::Syn1 ? gen_syn1(spec, rng) : gen_syn2(spec, rng);
}

}  // namespace aklo
