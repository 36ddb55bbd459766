// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Deterministic synthetic scene generator: a desk-scale stand-in for a real
// driving dataset. Agents follow one of three behaviors (constant velocity,
// constant turn rate, stop) with kinematically consistent history and future.

#pragma once

#include <array>
#include <cstdint>

#include "trajcast/types.hpp"

namespace trajcast {

struct GeneratorParams {
  int history_steps = 11;  // 10 past + current
  int future_steps = 80;
  double dt = kStepSeconds;

  int neighbors_min = 2;
  int neighbors_max = 6;
  int polylines_min = 4;
  int polylines_max = 10;

  // behavior mixture weights: constant velocity, constant turn rate, stop
  double behavior_cv = 0.5;
  double behavior_ct = 0.3;
  double behavior_stop = 0.2;

  // agent type mixture weights
  double type_vehicle = 0.6;
  double type_pedestrian = 0.2;
  double type_cyclist = 0.2;

  // per-type speed ranges, m/s
  std::array<double, kAgentTypeCount> speed_min{0.5, 0.3, 0.5};
  std::array<double, kAgentTypeCount> speed_max{15.0, 2.0, 8.0};

  double turn_rate_max = 0.3;    // rad/s, constant-turn behavior
  double stop_decel_max = 3.0;   // m/s^2, stop behavior
  double world_radius = 50.0;    // target position range, m
  double neighbor_radius = 40.0; // neighbor offset from the target, m

  // probability that an agent's early history is unobserved
  double p_missing_history = 0.1;

  int polyline_nodes_min = 5;
  int polyline_nodes_max = kMaxPolylineNodes;
  double polyline_spacing = 2.0;    // m between consecutive nodes
  double polyline_curvature = 0.02; // 1/m, max |curvature|
  int lane_types = 4;
};

/// Generates one world-frame scene with ground-truth future. Deterministic
/// given (seed, params). Throws std::invalid_argument on non-positive counts
/// or horizons.
Scene generate_synthetic_scene(std::uint64_t seed, const GeneratorParams& params);

}  // namespace trajcast
