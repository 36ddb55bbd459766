// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/canonical.hpp"

#include <cmath>
#include <stdexcept>

namespace trajcast {

namespace {

struct RigidTransform {
  double cx, cy;  // translation (anchor position)
  double c, s;    // cos/sin of the anchor heading

  // p' = R(-theta) * (p - center)
  Point2 world_to_canonical(double x, double y) const {
    const double dx = x - cx;
    const double dy = y - cy;
    return {c * dx + s * dy, -s * dx + c * dy};
  }

  // rotation only, for velocities and direction vectors
  Point2 rotate_to_canonical(double x, double y) const {
    return {c * x + s * y, -s * x + c * y};
  }
};

void transform_states(std::vector<AgentState>& states, const RigidTransform& rt, double theta) {
  for (AgentState& st : states) {
    if (!st.valid) continue;  // invalid states stay all-zero
    const Point2 p = rt.world_to_canonical(st.x, st.y);
    const Point2 v = rt.rotate_to_canonical(st.vx, st.vy);
    st.x = p[0];
    st.y = p[1];
    st.vx = v[0];
    st.vy = v[1];
    st.heading = normalize_angle(st.heading - theta);
  }
}

}  // namespace

Scene to_canonical_frame(const Scene& scene) {
  if (scene.frame != Frame::kWorld) {
    throw std::invalid_argument("to_canonical_frame: scene is not in the world frame");
  }
  const AgentState& cur = scene.target.current_state();
  if (!cur.valid) {
    throw std::invalid_argument("to_canonical_frame: target current state is invalid");
  }

  const double theta = cur.heading;
  const RigidTransform rt{cur.x, cur.y, std::cos(theta), std::sin(theta)};

  Scene out = scene;
  out.frame = Frame::kCanonical;
  out.anchor_pose = {cur.x, cur.y, theta};

  transform_states(out.target.history, rt, theta);
  transform_states(out.target.future, rt, theta);
  for (AgentTrack& n : out.neighbors) {
    transform_states(n.history, rt, theta);
    transform_states(n.future, rt, theta);
  }
  for (RoadGraphPolyline& poly : out.roadgraph) {
    for (RoadGraphNode& node : poly.nodes) {
      const Point2 p = rt.world_to_canonical(node.x, node.y);
      const Point2 d = rt.rotate_to_canonical(node.dir_x, node.dir_y);
      node.x = p[0];
      node.y = p[1];
      node.dir_x = d[0];
      node.dir_y = d[1];
    }
  }

  // The target's current step maps to the exact origin pose.
  AgentState& oc = out.target.current_state();
  oc.x = 0.0;
  oc.y = 0.0;
  oc.heading = 0.0;
  return out;
}

Point2 from_canonical(const Point2& p, const Pose2& anchor_pose) {
  const double c = std::cos(anchor_pose.heading);
  const double s = std::sin(anchor_pose.heading);
  return {c * p[0] - s * p[1] + anchor_pose.x, s * p[0] + c * p[1] + anchor_pose.y};
}

std::vector<Point2> from_canonical(const std::vector<Point2>& points, const Pose2& anchor_pose) {
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const Point2& p : points) out.push_back(from_canonical(p, anchor_pose));
  return out;
}

Point2 to_canonical_point(const Point2& p, const Pose2& anchor_pose) {
  const double c = std::cos(anchor_pose.heading);
  const double s = std::sin(anchor_pose.heading);
  const double dx = p[0] - anchor_pose.x;
  const double dy = p[1] - anchor_pose.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

}  // namespace trajcast
