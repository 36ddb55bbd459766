// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "trajcast/nn.hpp"
#include "trajcast/rng.hpp"

using namespace trajcast;
using nn::CgBlock;
using nn::GradBuffer;
using nn::Linear;
using nn::Mat;
using nn::McgStack;
using nn::Mlp;
using nn::ParamStore;
using nn::ParamUse;
using nn::Tape;
using nn::Value;

namespace {

Mat random_mat(Rng& rng, int r, int c, double lo = -1.0, double hi = 1.0) {
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("param store create, duplicate and lookup") {
  ParamStore store;
  Mat& w = store.create("w", 2, 3);
  CHECK(w.rows() == 2);
  CHECK(w.isZero());
  CHECK(store.has("w"));
  CHECK(!store.has("v"));
  CHECK_THROWS_AS(store.create("w", 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(store.at("v"), std::out_of_range);
  store.create("v", 4, 4);
  CHECK(store.scalar_count() == 2 * 3 + 4 * 4);
}

TEST_CASE("xavier init is bounded, nonzero and seed-deterministic") {
  Mat a(8, 16), b(8, 16), c(8, 16);
  Rng r1(3), r2(3), r3(4);
  nn::xavier_init(a, r1);
  nn::xavier_init(b, r2);
  nn::xavier_init(c, r3);
  double bound = std::sqrt(6.0 / (8 + 16));
  CHECK(a.cwiseAbs().maxCoeff() <= bound);
  CHECK(a.cwiseAbs().maxCoeff() > 0.0);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("param use binds one leaf per name") {
  ParamStore store;
  Rng rng(1);
  Mat& w = store.create("w", 2, 2);
  nn::xavier_init(w, rng);

  Tape t;
  ParamUse p(t, store);
  Value a = p("w");
  Value b = p("w");
  CHECK(a.id == b.id);

  Value loss = t.sum_all(t.add(a, b));  // w appears twice: grad = 2
  t.backward(loss);
  GradBuffer grads;
  p.collect(grads);
  CHECK(grads.grads.at("w")(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("grad buffer accumulates, merges and scales") {
  GradBuffer g1, g2;
  g1.accumulate("a", Mat::Ones(2, 2));
  g1.accumulate("a", Mat::Ones(2, 2));
  g2.accumulate("a", Mat::Ones(2, 2));
  g2.accumulate("b", 3.0 * Mat::Ones(1, 1));
  g1.add(g2);
  CHECK(g1.grads.at("a")(0, 0) == doctest::Approx(3.0));
  CHECK(g1.grads.at("b")(0, 0) == doctest::Approx(3.0));
  // norm = sqrt(4 * 9 + 9)
  CHECK(g1.global_norm() == doctest::Approx(std::sqrt(45.0)));
  g1.scale(0.5);
  CHECK(g1.grads.at("a")(1, 1) == doctest::Approx(1.5));
}

TEST_CASE("linear and mlp shapes and gradients") {
  ParamStore store;
  Rng rng(5);
  Linear lin(store, rng, "lin", 4, 3);
  Mlp mlp(store, rng, "mlp", 4, {6, 6}, 2);

  Mat x = random_mat(rng, 5, 4);
  {
    Tape t;
    ParamUse p(t, store);
    CHECK(t.val(lin.apply(t, p, t.input(x))).cols() == 3);
    CHECK(t.val(mlp.apply(t, p, t.input(x))).rows() == 5);
    CHECK(t.val(mlp.apply(t, p, t.input(x))).cols() == 2);
  }

  Rng sample_rng(6);
  Mat w = random_mat(sample_rng, 5, 2);
  auto build = [&](Tape& t, ParamUse& p) {
    return t.sum_all(t.hadamard(mlp.apply(t, p, t.input(x)), t.input(w)));
  };
  oracles::FdReport rep = oracles::fd_check(store, build, sample_rng, 4);
  CAPTURE(rep.worst);
  CHECK(rep.max_rel_err < 1e-4);
  CHECK(rep.checked > 0);
}

TEST_CASE("valid mask matrix replicates flags") {
  Tape t;
  Mat m = t.val(nn::valid_mask_matrix(t, {1, 0, 1}, 4));
  CHECK(m.rows() == 3);
  CHECK(m.cols() == 4);
  CHECK(m(0, 3) == 1.0);
  CHECK(m(1, 0) == 0.0);
  CHECK(m(2, 2) == 1.0);
}

TEST_CASE("cg block gates valid rows and pools their max") {
  constexpr int kDim = 8;
  ParamStore store;
  Rng rng(7);
  CgBlock block(store, rng, "cg", kDim);

  Mat elems = random_mat(rng, 5, kDim);
  Mat ctx = random_mat(rng, 1, kDim);
  std::vector<std::uint8_t> valid = {1, 1, 0, 1, 0};

  Tape t;
  ParamUse p(t, store);
  CgBlock::Out out = block.apply(t, p, t.input(elems), t.input(ctx), valid);
  Mat oe = t.val(out.elements);
  Mat oc = t.val(out.context);
  REQUIRE(oe.rows() == 5);
  REQUIRE(oc.rows() == 1);
  REQUIRE(oc.cols() == kDim);

  // Invalid rows pass through unchanged.
  CHECK(oe.row(2) == elems.row(2));
  CHECK(oe.row(4) == elems.row(4));
  CHECK(oe.row(0) != elems.row(0));

  // The context is the column max over the gated valid rows.
  for (int c = 0; c < kDim; ++c)
    CHECK(oc(0, c) == doctest::Approx(std::max({oe(0, c), oe(1, c), oe(3, c)})));
}

TEST_CASE("cg block ignores invalid row payloads everywhere but their own row") {
  constexpr int kDim = 8;
  ParamStore store;
  Rng rng(8);
  CgBlock block(store, rng, "cg", kDim);

  Mat elems = random_mat(rng, 4, kDim);
  Mat ctx = random_mat(rng, 1, kDim);
  std::vector<std::uint8_t> valid = {1, 0, 1, 1};

  Mat oe1, oc1;
  {
    Tape t;
    ParamUse p(t, store);
    CgBlock::Out out = block.apply(t, p, t.input(elems), t.input(ctx), valid);
    oe1 = t.val(out.elements);
    oc1 = t.val(out.context);
  }

  Mat tampered = elems;
  tampered.row(1).setConstant(1e6);
  Mat oe2, oc2;
  {
    Tape t;
    ParamUse p(t, store);
    CgBlock::Out out = block.apply(t, p, t.input(tampered), t.input(ctx), valid);
    oe2 = t.val(out.elements);
    oc2 = t.val(out.context);
  }

  CHECK(oc1 == oc2);
  CHECK(oe1.row(0) == oe2.row(0));
  CHECK(oe1.row(2) == oe2.row(2));
  CHECK(oe1.row(3) == oe2.row(3));
  CHECK(oe2.row(1) == tampered.row(1));  // passthrough carries the new payload
}

TEST_CASE("cg block falls back to the learned default context") {
  constexpr int kDim = 4;
  ParamStore store;
  Rng rng(9);
  CgBlock block(store, rng, "cg", kDim);
  store.at("cg.default_ctx") = random_mat(rng, 1, kDim);

  Mat elems = random_mat(rng, 3, kDim);
  Tape t;
  ParamUse p(t, store);
  CgBlock::Out out = block.apply(t, p, t.input(elems), t.input(random_mat(rng, 1, kDim)),
                                 {0, 0, 0});
  CHECK(t.val(out.context) == store.at("cg.default_ctx"));
  CHECK(t.val(out.elements) == elems);  // every row passes through
}

TEST_CASE("cg block context is permutation-invariant") {
  constexpr int kDim = 8;
  ParamStore store;
  Rng rng(10);
  CgBlock block(store, rng, "cg", kDim);

  Mat elems = random_mat(rng, 6, kDim);
  Mat ctx = random_mat(rng, 1, kDim);
  std::vector<std::uint8_t> valid = {1, 1, 0, 1, 1, 0};

  Mat base;
  {
    Tape t;
    ParamUse p(t, store);
    base = t.val(block.apply(t, p, t.input(elems), t.input(ctx), valid).context);
  }

  std::vector<int> perm = {3, 0, 5, 1, 4, 2};
  Mat pe(6, kDim);
  std::vector<std::uint8_t> pv(6);
  for (int i = 0; i < 6; ++i) {
    pe.row(i) = elems.row(perm[static_cast<std::size_t>(i)]);
    pv[static_cast<std::size_t>(i)] = valid[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
  }
  Tape t;
  ParamUse p(t, store);
  Mat permuted = t.val(block.apply(t, p, t.input(pe), t.input(ctx), pv).context);
  CHECK((base - permuted).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mcg stack averages block outputs") {
  constexpr int kDim = 6;
  ParamStore stack_store;
  Rng stack_rng(21);
  McgStack stack(stack_store, stack_rng, "m", kDim, 2);

  ParamStore block_store;
  Rng block_rng(21);
  CgBlock b0(block_store, block_rng, "m.cg0", kDim);
  CgBlock b1(block_store, block_rng, "m.cg1", kDim);

  // Identical creation order and seed: the stores must match bit for bit.
  REQUIRE(stack_store.params.size() == block_store.params.size());
  for (const auto& [name, value] : stack_store.params) {
    REQUIRE(block_store.has(name));
    REQUIRE(value == block_store.at(name));
  }

  Rng data_rng(22);
  Mat elems = random_mat(data_rng, 4, kDim);
  Mat ctx = random_mat(data_rng, 1, kDim);
  std::vector<std::uint8_t> valid = {1, 1, 1, 1};

  Mat stacked_e, stacked_c;
  {
    Tape t;
    ParamUse p(t, stack_store);
    CgBlock::Out out = stack.apply(t, p, t.input(elems), t.input(ctx), valid);
    stacked_e = t.val(out.elements);
    stacked_c = t.val(out.context);
  }

  // Manual composition: the first block replaces the stream, the second
  // averages in: s2 = (s1 + o2) / 2.
  Tape t;
  ParamUse p(t, block_store);
  CgBlock::Out o0 = b0.apply(t, p, t.input(elems), t.input(ctx), valid);
  CgBlock::Out o1 = b1.apply(t, p, o0.elements, o0.context, valid);
  Mat manual_e = 0.5 * (t.val(o0.elements) + t.val(o1.elements));
  Mat manual_c = 0.5 * (t.val(o0.context) + t.val(o1.context));
  CHECK((stacked_e - manual_e).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((stacked_c - manual_c).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mcg stack gradients pass finite differences") {
  constexpr int kDim = 6;
  ParamStore store;
  Rng rng(23);
  McgStack stack(store, rng, "m", kDim, 2);

  Mat elems = random_mat(rng, 4, kDim);
  Mat ctx = random_mat(rng, 1, kDim);
  Mat w = random_mat(rng, 1, kDim);
  std::vector<std::uint8_t> valid = {1, 0, 1, 1};

  auto build = [&](Tape& t, ParamUse& p) {
    CgBlock::Out out = stack.apply(t, p, t.input(elems), t.input(ctx), valid);
    return t.sum_all(t.hadamard(out.context, t.input(w)));
  };
  Rng sample_rng(24);
  oracles::FdReport rep = oracles::fd_check(store, build, sample_rng, 4);
  CAPTURE(rep.worst);
  CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("mcg stack rejects zero blocks and bad widths") {
  ParamStore store;
  Rng rng(25);
  CHECK_THROWS_AS(McgStack(store, rng, "m", 4, 0), std::invalid_argument);

  McgStack stack(store, rng, "ok", 4, 1);
  Tape t;
  ParamUse p(t, store);
  CHECK_THROWS_AS(stack.apply(t, p, t.input(Mat::Zero(2, 5)), t.input(Mat::Zero(1, 4)), {1, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(stack.apply(t, p, t.input(Mat::Zero(2, 4)), t.input(Mat::Zero(1, 4)), {1}),
                  std::invalid_argument);
}

}  // TEST_SUITE
