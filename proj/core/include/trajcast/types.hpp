// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Scene data model: agent tracks with validity flags, road graph polylines
// and the world/canonical frame tag.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace trajcast {

inline constexpr double kPi = 3.14159265358979323846;

/// Timestep length of all tracks, seconds (10 Hz).
inline constexpr double kStepSeconds = 0.1;

/// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

enum class AgentType : std::uint8_t { kVehicle = 0, kPedestrian = 1, kCyclist = 2 };
inline constexpr int kAgentTypeCount = 3;

const char* to_string(AgentType t);

/// Kinematic state of one agent at one timestep. An invalid state carries
/// all-zero numeric fields.
struct AgentState {
  double x = 0.0;        // meters
  double y = 0.0;        // meters
  double heading = 0.0;  // radians in (-pi, pi]
  double vx = 0.0;       // m/s
  double vy = 0.0;       // m/s
  bool valid = false;

  double speed() const;
};

struct AgentTrack {
  std::string agent_id;
  AgentType agent_type = AgentType::kVehicle;
  std::vector<AgentState> history;  // length H; last entry is the current step
  std::vector<AgentState> future;   // length T (ground truth) or empty

  const AgentState& current_state() const { return history.back(); }
  AgentState& current_state() { return history.back(); }
};

struct RoadGraphNode {
  double x = 0.0;
  double y = 0.0;
  double dir_x = 1.0;  // unit tangent
  double dir_y = 0.0;
};

struct RoadGraphPolyline {
  std::vector<RoadGraphNode> nodes;  // ordered; node order is significant
  int lane_type = 0;                 // small semantic code
};

/// Longest polyline the encoders consume directly; longer lanes are split.
inline constexpr int kMaxPolylineNodes = 20;

enum class Frame : std::uint8_t { kWorld = 0, kCanonical = 1 };

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

/// One prediction instance: the target agent, its surroundings and, during
/// training, the ground-truth future.
struct Scene {
  std::string scene_id;
  AgentTrack target;
  std::vector<AgentTrack> neighbors;
  std::vector<RoadGraphPolyline> roadgraph;
  Frame frame = Frame::kWorld;
  Pose2 anchor_pose;  // world pose of the target at the current step
};

/// Returns human-readable invariant violations; empty means the scene is well
/// formed. `require_valid_current` is relaxed for scenes that went through
/// history masking.
std::vector<std::string> scene_invariant_violations(const Scene& scene,
                                                    bool require_valid_current = true);

}  // namespace trajcast
