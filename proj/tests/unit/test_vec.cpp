// Copyright 2026 The AKLO Authors
// Licensed under the Apache License, Version 2.0

#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "error.hpp"
#include "op_counter.hpp"
#include "vec.hpp"

using namespace aklo;

namespace {

SparseVec e0(std::size_t dim = 2) { return SparseVec(dim, {{0, 1.0}}); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("sparse vector validation") {
  SparseVec v(5, {{0, 1.5}, {3, -2.0}});
  CHECK(v.dim() == 5);
  CHECK(v.nnz() == 2);
  CHECK(v.squared_norm() == doctest::Approx(6.25));

  CHECK(SparseVec(3, {{1, 0.0}, {2, 1.0}}).nnz() == 1);
  CHECK(code_of([] { SparseVec(2, {{2, 1.0}}); }) == ErrorCode::Dimension);
  CHECK(code_of([] { SparseVec(4, {{2, 1.0}, {1, 1.0}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { SparseVec(4, {{1, 1.0}, {1, 2.0}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { SparseVec(4, {{1, std::nan("")}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { SparseVec::from_unsorted(4, {{3, 1.0}, {3, 2.0}}); }) == ErrorCode::InvalidArgument);

  const SparseVec u = SparseVec::from_unsorted(4, {{3, 1.0}, {0, 2.0}});
  REQUIRE(u.nnz() == 2);
  CHECK(u.entries()[0].index == 0);
  CHECK(u.entries()[1].index == 3);
}

TEST_CASE("bias slot and widening") {
  const SparseVec b = SparseVec(9, {{2, 1.0}}).with_bias();
  CHECK(b.dim() == 10);
  REQUIRE(b.nnz() == 2);
  CHECK(b.entries()[1].index == 9);
  CHECK(b.entries()[1].value == 1.0);
  CHECK(SparseVec(3, {{0, 1.0}}).widened(7).dim() == 7);
  CHECK_THROWS_AS(SparseVec(3, {}).widened(2), Error);
}

TEST_CASE("dot") {
  SUBCASE("zero vector") {
    ScaledDenseVec w(2);
    CHECK(w.dot(SparseVec(2, {{0, 3.0}, {1, -7.0}})) == 0.0);
  }
  SUBCASE("plain") {
    auto w = ScaledDenseVec::from_parts({1.25, 0.0}, 1.0);
    CHECK(w.dot(e0()) == 1.25);
  }
  SUBCASE("scaled") {
    auto w = ScaledDenseVec::from_parts({2.0, 4.0}, 0.5);
    CHECK(w.dot(SparseVec(2, {{1, 3.0}})) == 6.0);
  }
  SUBCASE("index beyond the weights") {
    ScaledDenseVec w(2);
    CHECK(code_of([&] { w.dot(SparseVec(3, {{2, 1.0}})); }) == ErrorCode::Dimension);
  }
}

TEST_CASE("scale in place") {
  ScaledDenseVec w = ScaledDenseVec::from_parts({1.0, 0.0}, 1.0);
  w.scale_in_place(0.5);
  CHECK(w.scale() == 0.5);
  w.scale_in_place(0.5);
  w.scale_in_place(0.5);
  CHECK(w.scale() == 0.125);

  ScaledDenseVec z = ScaledDenseVec::from_parts({1.0, 0.0}, 1.0);
  z.scale_in_place(0.0);
  CHECK(z.logical() == std::vector<double>{0.0, 0.0});
}

TEST_CASE("axpy") {
  SUBCASE("from zero") {
    ScaledDenseVec w(3);
    w.axpy(1.0, SparseVec(3, {{0, 1.0}}));
    CHECK(w.logical() == std::vector<double>{1.0, 0.0, 0.0});
  }
  SUBCASE("under a scale") {
    auto w = ScaledDenseVec::from_parts({0.5, 0.0}, 0.5);
    CHECK(w.at(0) == 0.25);
    w.axpy(1.0, e0());
    CHECK(w.base()[0] == 2.5);
    CHECK(w.at(0) == 1.25);
  }
  SUBCASE("zero coefficient") {
    auto w = ScaledDenseVec::from_parts({0.5, 3.0}, 0.5);
    const auto before = w.logical();
    w.axpy(0.0, SparseVec(2, {{0, 1.0}, {1, 2.0}}));
    CHECK(w.logical() == before);
  }
}

TEST_CASE("norm") {
  CHECK(ScaledDenseVec(4).l2_norm() == 0.0);
  CHECK(ScaledDenseVec::from_parts({3.0, 4.0}, 1.0).l2_norm() == doctest::Approx(5.0));
  CHECK(ScaledDenseVec::from_parts({1.0, 0.0}, 2.0).l2_norm() == doctest::Approx(2.0));
}

TEST_CASE("scale floor triggers a rebase") {
  auto w = ScaledDenseVec::from_parts({1.0, -2.0}, 1.0);
  for (int i = 0; i < 40; ++i) w.scale_in_place(1e-10);
  CHECK(std::abs(w.scale()) >= ScaledDenseVec::kScaleFloor);
  CHECK(std::isfinite(w.base()[0]));
}

TEST_CASE("scale then axpy matches the direct formula") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> c_dist(0.01, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + rng() % 20;
    std::vector<double> base(d);
    for (double& v : base) v = g(rng);
    auto w = ScaledDenseVec::from_parts(base, c_dist(rng));
    std::vector<double> dense(d);
    for (double& v : dense) v = g(rng);
    const SparseVec x = SparseVec::from_dense(dense);
    const double c = c_dist(rng), a = g(rng);
    const double before = w.dot(x);
    w.scale_in_place(c);
    w.axpy(a, x);
    const double expect = c * before + a * x.squared_norm();
    CHECK(w.dot(x) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("rebase is invisible") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> base(8);
    for (double& v : base) v = g(rng);
    auto w = ScaledDenseVec::from_parts(base, std::exp(g(rng)));
    const auto before = w.logical();
    w.rebase();
    CHECK(w.scale() == 1.0);
    const auto after = w.logical();
    for (std::size_t i = 0; i < before.size(); ++i) {
      CHECK(std::abs(after[i] - before[i]) <= 1e-12 * std::max(1.0, std::abs(before[i])));
    }
  }
}

TEST_CASE("sparse operations touch only the nonzeros") {
  ScaledDenseVec w(100000);
  const SparseVec x(100000, {{5, 1.0}, {70000, 2.0}, {99999, -1.0}});
  op_counter() = 0;
  w.dot(x);
  w.axpy(0.5, x);
  w.scale_in_place(0.9);
  CHECK(op_counter() <= 3 * (x.nnz() + 1));
}
