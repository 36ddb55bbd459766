// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Rigid transform between the world frame and the agent-centric canonical
// frame (target at the origin with zero heading at the current step).

#pragma once

#include <array>
#include <vector>

#include "trajcast/types.hpp"

namespace trajcast {

using Point2 = std::array<double, 2>;

/// Transforms a world-frame scene into the canonical frame of its target
/// agent. Valid positions, headings and velocity vectors of every agent and
/// all road-graph nodes are rigidly transformed; invalid states stay all-zero.
/// anchor_pose on the result records the inverse transform.
/// Throws std::invalid_argument if the scene is not in the world frame or the
/// target current state is invalid.
Scene to_canonical_frame(const Scene& scene);

/// Maps one canonical-frame point back to the world frame.
Point2 from_canonical(const Point2& p, const Pose2& anchor_pose);

/// Maps a sequence of canonical-frame points back to the world frame.
std::vector<Point2> from_canonical(const std::vector<Point2>& points, const Pose2& anchor_pose);

/// Maps one world-frame point into the canonical frame given the anchor.
Point2 to_canonical_point(const Point2& p, const Pose2& anchor_pose);

}  // namespace trajcast
