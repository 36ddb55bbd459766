// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/types.hpp"

#include <cmath>
#include <string>

namespace trajcast {

double normalize_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r = kPi;  // remainder lands in [-pi, pi]; fold -pi to +pi
  return r;
}

const char* to_string(AgentType t) {
  switch (t) {
    case AgentType::kVehicle: return "vehicle";
    case AgentType::kPedestrian: return "pedestrian";
    case AgentType::kCyclist: return "cyclist";
  }
  return "unknown";
}

double AgentState::speed() const { return std::hypot(vx, vy); }

namespace {

void check_states(const std::vector<AgentState>& states, const std::string& what,
                  std::vector<std::string>& out) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    const AgentState& s = states[i];
    if (s.heading <= -kPi || s.heading > kPi) {
      out.push_back(what + "[" + std::to_string(i) + "]: heading not in (-pi, pi]");
    }
    if (!s.valid && (s.x != 0.0 || s.y != 0.0 || s.heading != 0.0 || s.vx != 0.0 || s.vy != 0.0)) {
      out.push_back(what + "[" + std::to_string(i) + "]: invalid state has nonzero fields");
    }
    if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.heading) ||
        !std::isfinite(s.vx) || !std::isfinite(s.vy)) {
      out.push_back(what + "[" + std::to_string(i) + "]: non-finite field");
    }
  }
}

void check_track(const AgentTrack& track, std::size_t history_len, std::size_t future_len,
                 const std::string& what, std::vector<std::string>& out) {
  if (track.history.size() != history_len) {
    out.push_back(what + ": history length " + std::to_string(track.history.size()) +
                  " != " + std::to_string(history_len));
  }
  if (!track.future.empty() && track.future.size() != future_len) {
    out.push_back(what + ": future length " + std::to_string(track.future.size()) +
                  " != " + std::to_string(future_len) + " or 0");
  }
  check_states(track.history, what + ".history", out);
  check_states(track.future, what + ".future", out);
}

}  // namespace

std::vector<std::string> scene_invariant_violations(const Scene& scene,
                                                    bool require_valid_current) {
  std::vector<std::string> out;
  if (scene.target.history.empty()) {
    out.push_back("target has no history");
    return out;
  }
  const std::size_t history_len = scene.target.history.size();
  const std::size_t future_len =
      scene.target.future.empty() ? 80 : scene.target.future.size();

  check_track(scene.target, history_len, future_len, "target", out);
  for (std::size_t i = 0; i < scene.neighbors.size(); ++i) {
    check_track(scene.neighbors[i], history_len, future_len,
                "neighbor[" + std::to_string(i) + "]", out);
  }

  for (std::size_t i = 0; i < scene.roadgraph.size(); ++i) {
    const RoadGraphPolyline& p = scene.roadgraph[i];
    if (p.nodes.size() > static_cast<std::size_t>(kMaxPolylineNodes)) {
      out.push_back("roadgraph[" + std::to_string(i) + "]: " + std::to_string(p.nodes.size()) +
                    " nodes exceed the per-polyline cap");
    }
    for (std::size_t j = 0; j < p.nodes.size(); ++j) {
      const double norm = std::hypot(p.nodes[j].dir_x, p.nodes[j].dir_y);
      if (std::abs(norm - 1.0) > 1e-6) {
        out.push_back("roadgraph[" + std::to_string(i) + "].nodes[" + std::to_string(j) +
                      "]: direction not unit norm");
      }
    }
  }

  if (require_valid_current && !scene.target.current_state().valid) {
    out.push_back("target current state invalid");
  }

  if (scene.frame == Frame::kCanonical) {
    const AgentState& cur = scene.target.current_state();
    if (cur.valid &&
        (std::abs(cur.x) > 1e-9 || std::abs(cur.y) > 1e-9 || std::abs(cur.heading) > 1e-9)) {
      out.push_back("canonical frame: target current state not at origin pose");
    }
  }
  return out;
}

}  // namespace trajcast
