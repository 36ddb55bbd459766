// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "trajcast/predictor.hpp"
#include "trajcast/rng.hpp"

using namespace trajcast;
using nn::Mat;
using nn::ParamStore;
using nn::ParamUse;
using nn::Tape;
using nn::Value;

namespace {

Mat random_row(Rng& rng, int cols) {
  Mat m(1, cols);
  for (int c = 0; c < cols; ++c) m(0, c) = rng.uniform(-1.0, 1.0);
  return m;
}

}  // namespace

TEST_SUITE("predictor") {

TEST_CASE("raw rows turn into prefix-summed positions") {
  Tape t;
  Mat raw(1, 16);  // steps=3: [dx dy sxr syr rhor] x3 + logit
  raw << 1, 2, 0.1, 0.2, 0.3,
         3, 4, 0.4, 0.5, 0.6,
         5, 6, 0.7, 0.8, 0.9,
         2.5;
  ModeSetGraph g = raw_modes_to_graph(t, {t.input(raw)}, 3);
  REQUIRE(g.modes.size() == 1);

  Mat mean = t.val(g.modes[0].mean);
  Mat want_mean(3, 2);
  want_mean << 1, 2, 4, 6, 9, 12;  // running sum of the offsets
  CHECK((mean - want_mean).cwiseAbs().maxCoeff() == 0.0);

  Mat cov = t.val(g.modes[0].cov_raw);
  Mat want_cov(3, 3);
  want_cov << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9;
  CHECK((cov - want_cov).cwiseAbs().maxCoeff() == 0.0);

  Mat logits = t.val(g.logits);
  REQUIRE(logits.rows() == 1);
  REQUIRE(logits.cols() == 1);
  CHECK(logits(0, 0) == 2.5);
}

TEST_CASE("raw conversion validates its inputs") {
  Tape t;
  CHECK_THROWS_AS(raw_modes_to_graph(t, {}, 3), std::invalid_argument);
  Mat wrong(1, 15);
  wrong.setZero();
  CHECK_THROWS_AS(raw_modes_to_graph(t, {t.input(wrong)}, 3), std::invalid_argument);
}

TEST_CASE("mode probabilities are a softmax of the logits") {
  Tape t;
  Mat a(1, 6), b(1, 6);
  a.setZero();
  b.setZero();
  a(0, 5) = 0.0;           // logit 0
  b(0, 5) = std::log(3.0);  // logit log 3
  ModeSetGraph g = raw_modes_to_graph(t, {t.input(a), t.input(b)}, 1);
  ModeSet ms = to_mode_set(t, g);
  REQUIRE(ms.modes.size() == 2);
  CHECK(ms.modes[0].prob == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(ms.modes[1].prob == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(ms.logits[0] == 0.0);
  CHECK(ms.logits[1] == doctest::Approx(std::log(3.0)));
}

TEST_CASE("single head decodes a well-formed mode set") {
  PredictorConfig cfg{8, 8, 4, 10, 1, 0.5, 1};
  ParamStore store;
  Rng rng(1);
  SingleHead head(store, rng, cfg);
  Rng erng(2);

  for (int trial = 0; trial < 5; ++trial) {
    Tape t;
    ParamUse p(t, store);
    ModeSetGraph g = head.decode(t, p, t.input(random_row(erng, cfg.dim)));
    ModeSet ms = to_mode_set(t, g);
    auto bad = mode_set_invariant_violations(ms, cfg.modes, cfg.steps);
    CAPTURE(bad.empty() ? "" : bad.front());
    CHECK(bad.empty());
    double psum = 0.0;
    for (const auto& m : ms.modes) psum += m.prob;
    CHECK(psum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("a zero embedding still decodes to finite output") {
  PredictorConfig cfg{8, 8, 3, 6, 1, 0.5, 1};
  ParamStore store;
  Rng rng(3);
  SingleHead head(store, rng, cfg);
  Tape t;
  ParamUse p(t, store);
  Mat zero(1, cfg.dim);
  zero.setZero();
  ModeSet ms = to_mode_set(t, head.decode(t, p, t.input(zero)));
  CHECK(mode_set_invariant_violations(ms, cfg.modes, cfg.steps).empty());
}

TEST_CASE("decoding twice from the same store is bit-identical") {
  PredictorConfig cfg{8, 8, 3, 6, 1, 0.5, 1};
  ParamStore store;
  Rng rng(4);
  SingleHead head(store, rng, cfg);
  Mat emb = random_row(rng, cfg.dim);
  auto run = [&] {
    Tape t;
    ParamUse p(t, store);
    return to_mode_set(t, head.decode(t, p, t.input(emb)));
  };
  ModeSet a = run();
  ModeSet b = run();
  for (std::size_t m = 0; m < a.modes.size(); ++m) {
    CHECK(a.modes[m].prob == b.modes[m].prob);
    CHECK(a.modes[m].points == b.modes[m].points);
  }
}

TEST_CASE("mode set invariants catch tampering") {
  PredictorConfig cfg{8, 8, 3, 6, 1, 0.5, 1};
  ParamStore store;
  Rng rng(5);
  SingleHead head(store, rng, cfg);
  Tape t;
  ParamUse p(t, store);
  ModeSet ms = to_mode_set(t, head.decode(t, p, t.input(random_row(rng, cfg.dim))));
  REQUIRE(mode_set_invariant_violations(ms, cfg.modes, cfg.steps).empty());

  SUBCASE("wrong mode count") {
    CHECK(!mode_set_invariant_violations(ms, cfg.modes + 1, cfg.steps).empty());
  }
  SUBCASE("probabilities off the simplex") {
    ms.modes[0].prob += 0.5;
    CHECK(!mode_set_invariant_violations(ms, cfg.modes, cfg.steps).empty());
  }
  SUBCASE("non-finite position") {
    ms.modes[1].points[2][0] = std::nan("");
    CHECK(!mode_set_invariant_violations(ms, cfg.modes, cfg.steps).empty());
  }
  SUBCASE("degenerate covariance") {
    ms.modes[2].covs[0].sx = 0.0;
    CHECK(!mode_set_invariant_violations(ms, cfg.modes, cfg.steps).empty());
  }
  SUBCASE("truncated trajectory") {
    ms.modes[0].points.pop_back();
    CHECK(!mode_set_invariant_violations(ms, cfg.modes, cfg.steps).empty());
  }
}

TEST_CASE("multi head emits decoders*modes intermediate rows and modes finals") {
  PredictorConfig cfg{8, 8, 6, 5, 5, 0.5, 1};
  ParamStore store;
  Rng rng(6);
  MultiHead head(store, rng, cfg);
  Tape t;
  ParamUse p(t, store);
  Value emb = t.input(random_row(rng, cfg.dim));

  auto raw = head.intermediate_raw(t, p, emb);
  CHECK(raw.size() == 30);
  for (Value r : raw) {
    CHECK(t.val(r).rows() == 1);
    CHECK(t.val(r).cols() == cfg.steps * 5 + 1);
  }

  ModeSet ms = to_mode_set(t, head.fuse_modes(t, p, raw, emb));
  CHECK(mode_set_invariant_violations(ms, cfg.modes, cfg.steps).empty());
}

TEST_CASE("fusion is invariant to intermediate mode order") {
  PredictorConfig cfg{8, 8, 3, 4, 3, 0.5, 1};
  ParamStore store;
  Rng rng(7);
  MultiHead head(store, rng, cfg);
  Mat emb = random_row(rng, cfg.dim);
  Rng perm_rng(8);

  Tape t0;
  ParamUse p0(t0, store);
  auto raw0 = head.intermediate_raw(t0, p0, t0.input(emb));
  ModeSetGraph g0 = head.fuse_modes(t0, p0, raw0, t0.input(emb));

  for (int trial = 0; trial < 5; ++trial) {
    Tape t1;
    ParamUse p1(t1, store);
    auto raw1 = head.intermediate_raw(t1, p1, t1.input(emb));
    for (std::size_t i = raw1.size(); i > 1; --i)
      std::swap(raw1[i - 1], raw1[perm_rng.uniform_index(i)]);
    ModeSetGraph g1 = head.fuse_modes(t1, p1, raw1, t1.input(emb));
    CHECK((t0.val(g0.logits) - t1.val(g1.logits)).cwiseAbs().maxCoeff() < 1e-9);
    for (std::size_t m = 0; m < g0.modes.size(); ++m) {
      CHECK((t0.val(g0.modes[m].mean) - t1.val(g1.modes[m].mean)).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((t0.val(g0.modes[m].cov_raw) - t1.val(g1.modes[m].cov_raw)).cwiseAbs().maxCoeff() <
            1e-9);
    }
  }
}

TEST_CASE("update masks always flag at least one decoder") {
  Rng rng(9);
  for (int trial = 0; trial < 2000; ++trial) {
    auto mask = sample_update_mask(rng, 5, 0.05);
    REQUIRE(mask.size() == 5);
    CHECK(std::accumulate(mask.begin(), mask.end(), 0) >= 1);
  }
}

TEST_CASE("update masks are deterministic in the generator state") {
  Rng a(10), b(10);
  for (int trial = 0; trial < 100; ++trial)
    CHECK(sample_update_mask(a, 4, 0.3) == sample_update_mask(b, 4, 0.3));
}

TEST_CASE("update mask marginals match the conditioned distribution") {
  // Two decoders at p=0.5 conditioned on "at least one" puts mass 1/3 on
  // each of 01, 10, 11, so each marginal is 2/3.
  Rng rng(11);
  const int n = 30000;
  int count0 = 0;
  for (int trial = 0; trial < n; ++trial) count0 += sample_update_mask(rng, 2, 0.5)[0];
  double freq = static_cast<double>(count0) / n;
  double sigma = std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / n);
  CHECK(std::abs(freq - 2.0 / 3.0) < 4.0 * sigma);
}

TEST_CASE("update mask edge cases") {
  Rng rng(12);
  auto all = sample_update_mask(rng, 3, 1.0);
  CHECK(std::accumulate(all.begin(), all.end(), 0) == 3);
  CHECK_THROWS_AS(sample_update_mask(rng, 0, 0.5), std::invalid_argument);
}

TEST_CASE("decoder prefixes name the update-blocking unit") {
  CHECK(MultiHead::decoder_prefix(0) == "dec0");
  CHECK(MultiHead::decoder_prefix(3) == "dec3");
}

TEST_CASE("single head gradients pass finite differences") {
  PredictorConfig cfg{6, 6, 2, 3, 1, 0.5, 1};
  ParamStore store;
  Rng rng(13);
  SingleHead head(store, rng, cfg);
  Rng wrng(14);
  Mat emb = random_row(wrng, cfg.dim);
  std::vector<Mat> wm, wc;
  for (int m = 0; m < cfg.modes; ++m) {
    Mat a(cfg.steps, 2), b(cfg.steps, 3);
    for (int r = 0; r < cfg.steps; ++r) {
      a(r, 0) = wrng.uniform(-1, 1);
      a(r, 1) = wrng.uniform(-1, 1);
      for (int c = 0; c < 3; ++c) b(r, c) = wrng.uniform(-1, 1);
    }
    wm.push_back(a);
    wc.push_back(b);
  }
  auto build = [&](Tape& t, ParamUse& p) {
    ModeSetGraph g = head.decode(t, p, t.input(emb));
    Value s = t.sum_all(g.logits);
    for (std::size_t m = 0; m < g.modes.size(); ++m) {
      s = t.add(s, t.sum_all(t.hadamard(g.modes[m].mean, t.input(wm[m]))));
      s = t.add(s, t.sum_all(t.hadamard(g.modes[m].cov_raw, t.input(wc[m]))));
    }
    return s;
  };
  oracles::FdReport rep = oracles::fd_check(store, build, wrng, 3);
  CAPTURE(rep.worst);
  CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("multi head gradients pass finite differences") {
  PredictorConfig cfg{6, 6, 2, 2, 2, 0.5, 1};
  ParamStore store;
  Rng rng(15);
  MultiHead head(store, rng, cfg);
  Rng wrng(16);
  Mat emb = random_row(wrng, cfg.dim);
  Mat wl = random_row(wrng, cfg.modes);
  auto build = [&](Tape& t, ParamUse& p) {
    ModeSetGraph g = head.decode(t, p, t.input(emb));
    Value s = t.sum_all(t.hadamard(g.logits, t.input(wl)));
    for (const ModeGraph& m : g.modes) {
      s = t.add(s, t.sum_all(m.mean));
      s = t.add(s, t.sum_all(m.cov_raw));
    }
    return s;
  };
  oracles::FdReport rep = oracles::fd_check(store, build, wrng, 2);
  CAPTURE(rep.worst);
  CHECK(rep.max_rel_err < 1e-4);
}

}  // TEST_SUITE
