// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/synthetic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "trajcast/rng.hpp"

namespace trajcast {

namespace {

enum class Behavior { kConstantVelocity = 0, kConstantTurn = 1, kStop = 2 };

AgentState make_state(double x, double y, double heading, double speed) {
  AgentState s;
  s.x = x;
  s.y = y;
  s.heading = normalize_angle(heading);
  s.vx = speed * std::cos(heading);
  s.vy = speed * std::sin(heading);
  s.valid = true;
  return s;
}

/// Builds one track: straight-line history at the current speed, future per
/// behavior. Future step 1 continues at the current speed, so speed is
/// continuous across the prediction boundary.
AgentTrack make_track(Rng& rng, const GeneratorParams& p, const std::string& id,
                      AgentType type, double x0, double y0, double heading, double speed,
                      Behavior behavior, bool allow_missing_history) {
  AgentTrack track;
  track.agent_id = id;
  track.agent_type = type;

  const int H = p.history_steps;
  const int T = p.future_steps;
  track.history.resize(H);
  track.future.resize(T);

  // History: constant velocity backwards from the current pose.
  const double hvx = speed * std::cos(heading);
  const double hvy = speed * std::sin(heading);
  for (int i = 0; i < H; ++i) {
    const double back = static_cast<double>(H - 1 - i) * p.dt;
    track.history[i] = make_state(x0 - hvx * back, y0 - hvy * back, heading, speed);
  }

  // Future: integrate the behavior forward from the current pose.
  double x = x0, y = y0, h = heading, v = speed;
  double turn_rate = 0.0;
  double decel = 0.0;
  if (behavior == Behavior::kConstantTurn) {
    turn_rate = rng.uniform(-p.turn_rate_max, p.turn_rate_max);
  } else if (behavior == Behavior::kStop) {
    decel = rng.uniform(0.5, p.stop_decel_max);
  }
  for (int t = 0; t < T; ++t) {
    x += v * std::cos(h) * p.dt;
    y += v * std::sin(h) * p.dt;
    if (behavior == Behavior::kConstantTurn) h += turn_rate * p.dt;
    if (behavior == Behavior::kStop) v = std::max(0.0, v - decel * p.dt);
    track.future[t] = make_state(x, y, h, v);
  }

  // Some agents appeared mid-history: zero out an invalid prefix. The current
  // step is never dropped.
  if (allow_missing_history && rng.bernoulli(p.p_missing_history)) {
    const int missing = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(H - 1)));
    for (int i = 0; i < missing && i < H - 1; ++i) track.history[i] = AgentState{};
  }
  return track;
}

RoadGraphPolyline make_polyline(Rng& rng, const GeneratorParams& p) {
  RoadGraphPolyline poly;
  poly.lane_type = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(p.lane_types)));
  const int span = p.polyline_nodes_max - p.polyline_nodes_min;
  const int n = p.polyline_nodes_min +
                static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(span + 1)));
  double x = rng.uniform(-p.world_radius, p.world_radius);
  double y = rng.uniform(-p.world_radius, p.world_radius);
  double h = rng.uniform(-kPi, kPi);
  const double curvature = rng.uniform(-p.polyline_curvature, p.polyline_curvature);
  poly.nodes.resize(n);
  for (int i = 0; i < n; ++i) {
    poly.nodes[i] = {x, y, std::cos(h), std::sin(h)};
    x += p.polyline_spacing * std::cos(h);
    y += p.polyline_spacing * std::sin(h);
    h += curvature * p.polyline_spacing;
  }
  return poly;
}

}  // namespace

Scene generate_synthetic_scene(std::uint64_t seed, const GeneratorParams& p) {
  if (p.history_steps < 2) throw std::invalid_argument("generator: history_steps must be >= 2");
  if (p.future_steps < 1) throw std::invalid_argument("generator: future_steps must be >= 1");
  if (p.dt <= 0.0) throw std::invalid_argument("generator: dt must be positive");
  if (p.neighbors_min < 0 || p.neighbors_max < p.neighbors_min) {
    throw std::invalid_argument("generator: bad neighbor count range");
  }
  if (p.polylines_min < 0 || p.polylines_max < p.polylines_min) {
    throw std::invalid_argument("generator: bad polyline count range");
  }
  if (p.polyline_nodes_min < 2 || p.polyline_nodes_max < p.polyline_nodes_min) {
    throw std::invalid_argument("generator: bad polyline node range");
  }

  Rng rng(mix_seed(seed, 0x72616a63617374ull));
  Scene scene;
  scene.scene_id = "scene-" + std::to_string(seed);
  scene.frame = Frame::kWorld;

  const double type_w[kAgentTypeCount] = {p.type_vehicle, p.type_pedestrian, p.type_cyclist};
  const double behavior_w[3] = {p.behavior_cv, p.behavior_ct, p.behavior_stop};

  auto sample_agent = [&](const std::string& id, double cx, double cy, double radius,
                          bool missing_ok) {
    const AgentType type = static_cast<AgentType>(rng.weighted_index(type_w, kAgentTypeCount));
    const Behavior behavior = static_cast<Behavior>(rng.weighted_index(behavior_w, 3));
    const double ang = rng.uniform(-kPi, kPi);
    const double r = radius * std::sqrt(rng.uniform());
    const double x = cx + r * std::cos(ang);
    const double y = cy + r * std::sin(ang);
    const double heading = rng.uniform(-kPi, kPi);
    const int ti = static_cast<int>(type);
    const double speed = rng.uniform(p.speed_min[ti], p.speed_max[ti]);
    return make_track(rng, p, id, type, x, y, heading, speed, behavior, missing_ok);
  };

  scene.target = sample_agent("target", 0.0, 0.0, p.world_radius, /*missing_ok=*/false);

  const int n_span = p.neighbors_max - p.neighbors_min;
  const int n_neighbors =
      p.neighbors_min + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n_span + 1)));
  const double tx = scene.target.current_state().x;
  const double ty = scene.target.current_state().y;
  for (int i = 0; i < n_neighbors; ++i) {
    scene.neighbors.push_back(
        sample_agent("neighbor-" + std::to_string(i), tx, ty, p.neighbor_radius, true));
  }

  const int p_span = p.polylines_max - p.polylines_min;
  const int n_polylines =
      p.polylines_min + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(p_span + 1)));
  for (int i = 0; i < n_polylines; ++i) scene.roadgraph.push_back(make_polyline(rng, p));

  scene.anchor_pose = {tx, ty, scene.target.current_state().heading};
  return scene;
}

}  // namespace trajcast
