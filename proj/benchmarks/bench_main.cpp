// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Microbenchmarks for the hot paths: scene generation, canonicalization,
// encoding, decoding, loss, suppression, metrics and a full training step.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "oracles.hpp"
#include "trajcast/canonical.hpp"
#include "trajcast/config.hpp"
#include "trajcast/encoder.hpp"
#include "trajcast/metrics.hpp"
#include "trajcast/model.hpp"
#include "trajcast/nms.hpp"
#include "trajcast/objective.hpp"
#include "trajcast/rng.hpp"
#include "trajcast/synthetic.hpp"
#include "trajcast/train.hpp"

using namespace trajcast;

namespace {

Scene world_scene(std::uint64_t seed) { return generate_synthetic_scene(seed, GeneratorParams{}); }

Model default_model() {
  Config cfg = Config::defaults();
  cfg.set("model.dim", "64");
  cfg.set("model.hidden", "64");
  return Model(cfg);
}

void bm_generate_scene(benchmark::State& state) {
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(world_scene(seed++));
}
BENCHMARK(bm_generate_scene);

void bm_canonicalize(benchmark::State& state) {
  Scene s = world_scene(7);
  for (auto _ : state) benchmark::DoNotOptimize(to_canonical_frame(s));
}
BENCHMARK(bm_canonicalize);

void bm_encode_scene(benchmark::State& state) {
  EncoderConfig cfg{64, 64, 3, 11};
  nn::ParamStore store;
  Rng init(2);
  SceneEncoder enc(store, init, cfg);
  Scene s = oracles::canonical_scene(7);
  for (auto _ : state) {
    ad::Tape t;
    nn::ParamUse p(t, store);
    benchmark::DoNotOptimize(enc.encode(t, p, s));
  }
}
BENCHMARK(bm_encode_scene);

void bm_decode(benchmark::State& state, bool multi) {
  PredictorConfig pc;
  pc.dim = 64;
  pc.hidden = 64;
  nn::ParamStore store;
  Rng init(3);
  SingleHead single(store, init, pc);
  nn::ParamStore mstore;
  Rng minit(3);
  MultiHead multi_head(mstore, minit, pc);

  Rng erng(4);
  nn::Mat emb(1, pc.dim);
  for (int i = 0; i < pc.dim; ++i) emb(0, i) = erng.uniform(-1.0, 1.0);

  for (auto _ : state) {
    if (multi) {
      ad::Tape t;
      nn::ParamUse p(t, mstore);
      benchmark::DoNotOptimize(multi_head.decode(t, p, t.input(emb)));
    } else {
      ad::Tape t;
      nn::ParamUse p(t, store);
      benchmark::DoNotOptimize(single.decode(t, p, t.input(emb)));
    }
  }
}
BENCHMARK_CAPTURE(bm_decode, single_head, false);
BENCHMARK_CAPTURE(bm_decode, multi_head, true);

void bm_mixture_nll(benchmark::State& state) {
  Rng rng(5);
  ModeSet ms = oracles::random_mode_set(rng, 6, 80);
  std::vector<Point2> gt;
  std::vector<std::uint8_t> valid(80, 1);
  for (int t = 0; t < 80; ++t) gt.push_back({rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)});
  for (auto _ : state) benchmark::DoNotOptimize(mixture_nll(ms.modes, gt, valid));
}
BENCHMARK(bm_mixture_nll);

void bm_nms(benchmark::State& state) {
  Rng rng(6);
  ModeSet ms = oracles::random_mode_set(rng, 6, 80, 2.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(nms(ms, 2.0, 0.01, NmsDistance::kMaxOverTime));
}
BENCHMARK(bm_nms);

void bm_average_precision(benchmark::State& state) {
  Rng rng(8);
  std::vector<EvalRecord> records;
  for (int i = 0; i < 64; ++i) records.push_back(oracles::random_eval_record(rng));
  for (auto _ : state) benchmark::DoNotOptimize(average_precision(records, 80, true));
}
BENCHMARK(bm_average_precision);

void bm_model_nll(benchmark::State& state) {
  Model model = default_model();
  Scene s = oracles::canonical_scene(9);
  for (auto _ : state) benchmark::DoNotOptimize(model.nll(s));
}
BENCHMARK(bm_model_nll);

void bm_train_step(benchmark::State& state) {
  Model model = default_model();
  Scene s = oracles::canonical_scene(10);
  Adam adam(0.9, 0.999, 1e-8);
  for (auto _ : state) {
    nn::GradBuffer grads;
    ad::Tape t;
    nn::ParamUse p(t, model.params());
    ad::Value loss = model.loss(t, p, s);
    t.backward(loss);
    p.collect(grads);
    adam.step(model.params(), grads, 1e-4, [](const std::string&) { return true; });
  }
}
BENCHMARK(bm_train_step);

}  // namespace

BENCHMARK_MAIN();
