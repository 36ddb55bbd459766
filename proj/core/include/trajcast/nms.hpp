// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Non-maximum suppression over predicted modes. A greedy pass in descending
// probability order suppresses any mode within `threshold` of an already kept
// one. Suppressed modes keep their trajectories and receive the constant
// probability p_min; kept modes share the remaining mass proportionally to
// their original probabilities. Trajectories never move or drop; indices are
// preserved.

#pragma once

#include <vector>

#include "trajcast/canonical.hpp"
#include "trajcast/predictor.hpp"

namespace trajcast {

enum class NmsDistance : std::uint8_t {
  kMaxOverTime = 0,  // max over steps of Euclidean displacement
  kEndpoint = 1,     // displacement at the final step only
};

/// Max-over-time Euclidean distance; throws on length mismatch.
double trajectory_distance(const std::vector<Point2>& a, const std::vector<Point2>& b);

/// Distance under the configured measure.
double trajectory_distance(const std::vector<Point2>& a, const std::vector<Point2>& b,
                           NmsDistance measure);

struct NmsResult {
  ModeSet modes;
  std::vector<std::uint8_t> suppressed;  // per input index
};

/// Requires threshold > 0 and 0 < p_min < 1/M. Ties in probability keep the
/// lower original index first. With every original probability at least
/// 2*p_min, all output probabilities stay at or above p_min.
NmsResult nms(const ModeSet& modes, double threshold, double p_min,
              NmsDistance measure = NmsDistance::kMaxOverTime);

/// Per-type suppression radii, config-exposed.
struct NmsThresholds {
  double vehicle = 2.0;
  double pedestrian = 0.5;
  double cyclist = 1.0;

  double for_type(AgentType t) const;
};

struct NmsOptions {
  bool enabled = true;
  double p_min = 0.01;
  NmsDistance distance = NmsDistance::kMaxOverTime;
  NmsThresholds thresholds;
};

/// Suppression under the type's radius; identity when disabled.
ModeSet apply_nms(const ModeSet& modes, AgentType type, const NmsOptions& opts);

}  // namespace trajcast
