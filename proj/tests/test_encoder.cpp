// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "trajcast/encoder.hpp"
#include "trajcast/rng.hpp"

using namespace trajcast;
using nn::Mat;
using nn::ParamStore;
using nn::ParamUse;
using nn::Tape;

namespace {

constexpr EncoderConfig kTinyCfg{8, 8, 2, 11};

Mat embed_scene(const SceneEncoder& enc, const ParamStore& store, const Scene& scene) {
  Tape t;
  ParamUse p(t, store);
  return t.val(enc.encode(t, p, scene));
}

AgentTrack straight_track(AgentType type, int steps) {
  AgentTrack tr;
  tr.agent_id = "a";
  tr.agent_type = type;
  for (int i = 0; i < steps; ++i) {
    AgentState s;
    s.x = 0.5 * i;
    s.y = 0.1 * i;
    s.heading = 0.2;
    s.vx = 5.0;
    s.vy = 1.0;
    s.valid = true;
    tr.history.push_back(s);
  }
  return tr;
}

}  // namespace

TEST_SUITE("encoder") {

TEST_CASE("history features follow the documented layout") {
  AgentTrack tr = straight_track(AgentType::kCyclist, 11);
  tr.history[3] = AgentState{};  // invalid step
  Mat f = history_feature_matrix(tr, 11);
  REQUIRE(f.rows() == 11);
  REQUIRE(f.cols() == kHistoryFeatureDim);

  CHECK(f(2, 0) == doctest::Approx(1.0));          // x
  CHECK(f(2, 1) == doctest::Approx(0.2));          // y
  CHECK(f(2, 2) == doctest::Approx(std::cos(0.2)));
  CHECK(f(2, 3) == doctest::Approx(std::sin(0.2)));
  CHECK(f(2, 4) == doctest::Approx(5.0));          // vx
  CHECK(f(2, 5) == doctest::Approx(1.0));          // vy
  CHECK(f(2, 6) == doctest::Approx(std::hypot(5.0, 1.0)));
  CHECK(f(2, 7) == doctest::Approx(0.2));          // step index / (H-1)
  CHECK(f(2, 8) == 1.0);                           // valid
  CHECK(f(2, 9) == 0.0);                           // vehicle one-hot
  CHECK(f(2, 11) == 1.0);                          // cyclist one-hot

  // The invalid step keeps only its index and type columns.
  for (int c = 0; c < 7; ++c) CHECK(f(3, c) == 0.0);
  CHECK(f(3, 7) == doctest::Approx(0.3));
  CHECK(f(3, 8) == 0.0);
  CHECK(f(3, 11) == 1.0);
}

TEST_CASE("history features reject a wrong step count") {
  CHECK_THROWS_AS(history_feature_matrix(straight_track(AgentType::kVehicle, 10), 11),
                  std::invalid_argument);
}

TEST_CASE("history step mask mirrors validity") {
  AgentTrack tr = straight_track(AgentType::kVehicle, 5);
  tr.history[1] = AgentState{};
  auto mask = history_step_mask(tr);
  CHECK(mask == std::vector<std::uint8_t>({1, 0, 1, 1, 1}));
}

TEST_CASE("roadgraph features follow the documented layout") {
  RoadGraphPolyline p;
  p.lane_type = 2;
  p.nodes.push_back({0.0, 0.0, 1.0, 0.0});
  p.nodes.push_back({3.0, 4.0, 0.0, 1.0});
  Mat f = roadgraph_feature_matrix({p});
  REQUIRE(f.rows() == 1);
  REQUIRE(f.cols() == kRoadFeatureDim);
  CHECK(f(0, 0) == 0.0);                       // first x
  CHECK(f(0, 2) == 1.0);                       // first dir
  CHECK(f(0, 4) == 3.0);                       // last x
  CHECK(f(0, 7) == 1.0);                       // last dir_y
  CHECK(f(0, 8) == doctest::Approx(1.5));      // mean x
  CHECK(f(0, 9) == doctest::Approx(2.0));      // mean y
  CHECK(f(0, 10) == doctest::Approx(5.0));     // arc length
  CHECK(f(0, 11) == doctest::Approx(2.0 / kMaxPolylineNodes));
  CHECK(f(0, 14) == 1.0);                      // lane one-hot
  CHECK(f(0, 12) == 0.0);
}

TEST_CASE("roadgraph features reject empty polylines and bad lane types") {
  RoadGraphPolyline empty;
  empty.lane_type = 0;
  CHECK_THROWS_AS(roadgraph_feature_matrix({empty}), std::invalid_argument);

  RoadGraphPolyline bad;
  bad.nodes.push_back({0, 0, 1, 0});
  bad.lane_type = 4;
  CHECK_THROWS_AS(roadgraph_feature_matrix({bad}), std::invalid_argument);
  bad.lane_type = -1;
  CHECK_THROWS_AS(roadgraph_feature_matrix({bad}), std::invalid_argument);
}

TEST_CASE("node order changes the polyline descriptor") {
  RoadGraphPolyline p;
  p.lane_type = 0;
  p.nodes.push_back({0.0, 0.0, 1.0, 0.0});
  p.nodes.push_back({2.0, 0.0, 1.0, 0.0});
  p.nodes.push_back({4.0, 0.0, 1.0, 0.0});
  RoadGraphPolyline r = p;
  std::reverse(r.nodes.begin(), r.nodes.end());
  Mat fp = roadgraph_feature_matrix({p});
  Mat fr = roadgraph_feature_matrix({r});
  CHECK(fp != fr);  // first/last swap
  CHECK(fp(0, 10) == fr(0, 10));  // arc length is direction-free
}

TEST_CASE("scene embedding has the configured width and is deterministic") {
  ParamStore store;
  Rng rng(1);
  SceneEncoder enc(store, rng, kTinyCfg);
  Scene s = oracles::canonical_scene(5);
  Mat e1 = embed_scene(enc, store, s);
  Mat e2 = embed_scene(enc, store, s);
  CHECK(e1.rows() == 1);
  CHECK(e1.cols() == kTinyCfg.dim);
  CHECK(e1 == e2);
  CHECK(e1.allFinite());
}

TEST_CASE("encoder rejects world-frame scenes") {
  ParamStore store;
  Rng rng(1);
  SceneEncoder enc(store, rng, kTinyCfg);
  Scene w = generate_synthetic_scene(5, {});
  Tape t;
  ParamUse p(t, store);
  CHECK_THROWS_AS(enc.encode(t, p, w), std::invalid_argument);
}

TEST_CASE("neighbor order does not change the embedding") {
  ParamStore store;
  Rng rng(2);
  SceneEncoder enc(store, rng, kTinyCfg);
  Rng perm_rng(3);
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    Scene s = oracles::canonical_scene(seed);
    if (s.neighbors.size() < 2) continue;
    Mat base = embed_scene(enc, store, s);
    for (int trial = 0; trial < 10; ++trial) {
      Scene shuffled = s;
      for (std::size_t i = shuffled.neighbors.size(); i > 1; --i)
        std::swap(shuffled.neighbors[i - 1],
                  shuffled.neighbors[perm_rng.uniform_index(i)]);
      Mat e = embed_scene(enc, store, shuffled);
      CHECK((base - e).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("polyline order does not change the embedding") {
  ParamStore store;
  Rng rng(4);
  SceneEncoder enc(store, rng, kTinyCfg);
  Rng perm_rng(5);
  for (std::uint64_t seed = 40; seed < 50; ++seed) {
    Scene s = oracles::canonical_scene(seed);
    Mat base = embed_scene(enc, store, s);
    for (int trial = 0; trial < 10; ++trial) {
      Scene shuffled = s;
      for (std::size_t i = shuffled.roadgraph.size(); i > 1; --i)
        std::swap(shuffled.roadgraph[i - 1],
                  shuffled.roadgraph[perm_rng.uniform_index(i)]);
      Mat e = embed_scene(enc, store, shuffled);
      CHECK((base - e).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("invalid history payloads cannot leak into the embedding") {
  ParamStore store;
  Rng rng(6);
  SceneEncoder enc(store, rng, kTinyCfg);
  Scene s = oracles::canonical_scene(60);
  REQUIRE(!s.neighbors.empty());

  // Invalidate one neighbor step, then plant garbage in the invalid state.
  Scene a = s;
  a.neighbors[0].history[2] = AgentState{};
  Mat base = embed_scene(enc, store, a);

  Scene b = a;
  b.neighbors[0].history[2].x = 1e9;
  b.neighbors[0].history[2].vy = -777.0;
  b.neighbors[0].history[2].heading = 3.0;
  Mat tampered = embed_scene(enc, store, b);
  CHECK(base == tampered);
}

TEST_CASE("a never-observed neighbor is equivalent to no neighbor") {
  ParamStore store;
  Rng rng(7);
  SceneEncoder enc(store, rng, kTinyCfg);
  Scene s = oracles::canonical_scene(70);

  Scene none = s;
  none.neighbors.clear();

  Scene ghost = s;
  ghost.neighbors.clear();
  AgentTrack g;
  g.agent_id = "ghost";
  g.agent_type = AgentType::kPedestrian;
  g.history.assign(11, AgentState{});
  ghost.neighbors.push_back(g);

  CHECK(embed_scene(enc, store, none) == embed_scene(enc, store, ghost));
}

TEST_CASE("empty neighbor set and empty road graph still embed") {
  ParamStore store;
  Rng rng(8);
  SceneEncoder enc(store, rng, kTinyCfg);
  Scene s = oracles::canonical_scene(80);
  s.neighbors.clear();
  s.roadgraph.clear();
  Mat e = embed_scene(enc, store, s);
  CHECK(e.allFinite());
  CHECK(e.cols() == kTinyCfg.dim);
}

TEST_CASE("encoder gradients pass finite differences") {
  ParamStore store;
  Rng rng(9);
  SceneEncoder enc(store, rng, kTinyCfg);
  Rng sample_rng(10);

  for (std::uint64_t seed = 90; seed < 93; ++seed) {
    Scene s = oracles::canonical_scene(seed);
    Mat w(kTinyCfg.dim, 1);
    for (int i = 0; i < w.rows(); ++i) w(i, 0) = sample_rng.uniform(-1.0, 1.0);
    auto build = [&](Tape& t, ParamUse& p) {
      return t.matmul(enc.encode(t, p, s), t.input(w));
    };
    oracles::FdReport rep = oracles::fd_check(store, build, sample_rng, 2);
    CAPTURE(rep.worst);
    CHECK(rep.max_rel_err < 1e-4);
    CHECK(rep.checked > 0);
  }
}

}  // TEST_SUITE
