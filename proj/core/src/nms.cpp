// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/nms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace trajcast {

double trajectory_distance(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  return trajectory_distance(a, b, NmsDistance::kMaxOverTime);
}

double trajectory_distance(const std::vector<Point2>& a, const std::vector<Point2>& b,
                           NmsDistance measure) {
  if (a.size() != b.size()) throw std::invalid_argument("trajectory_distance: length mismatch");
  if (a.empty()) throw std::invalid_argument("trajectory_distance: empty trajectories");
  if (measure == NmsDistance::kEndpoint)
    return std::hypot(a.back()[0] - b.back()[0], a.back()[1] - b.back()[1]);
  double d = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t)
    d = std::max(d, std::hypot(a[t][0] - b[t][0], a[t][1] - b[t][1]));
  return d;
}

NmsResult nms(const ModeSet& modes, double threshold, double p_min, NmsDistance measure) {
  const std::size_t m = modes.modes.size();
  if (m == 0) throw std::invalid_argument("nms: empty mode set");
  if (!(threshold > 0.0)) throw std::invalid_argument("nms: threshold must be positive");
  if (!(p_min > 0.0 && p_min < 1.0 / static_cast<double>(m)))
    throw std::invalid_argument("nms: p_min must lie in (0, 1/M)");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return modes.modes[a].prob > modes.modes[b].prob;
  });

  std::vector<std::uint8_t> suppressed(m, 0);
  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    bool close = false;
    for (std::size_t k : kept) {
      if (trajectory_distance(modes.modes[idx].points, modes.modes[k].points, measure) <=
          threshold) {
        close = true;
        break;
      }
    }
    if (close)
      suppressed[idx] = 1;
    else
      kept.push_back(idx);
  }

  double kept_mass = 0.0;
  std::size_t n_suppressed = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (suppressed[i])
      ++n_suppressed;
    else
      kept_mass += modes.modes[i].prob;
  }
  double share = 1.0 - static_cast<double>(n_suppressed) * p_min;

  NmsResult out;
  out.modes = modes;
  out.suppressed = suppressed;
  for (std::size_t i = 0; i < m; ++i) {
    double p = suppressed[i] ? p_min : modes.modes[i].prob * share / kept_mass;
    out.modes.modes[i].prob = p;
    if (i < out.modes.logits.size()) out.modes.logits[i] = std::log(p);
  }
  return out;
}

ModeSet apply_nms(const ModeSet& modes, AgentType type, const NmsOptions& opts) {
  if (!opts.enabled) return modes;
  return nms(modes, opts.thresholds.for_type(type), opts.p_min, opts.distance).modes;
}

double NmsThresholds::for_type(AgentType t) const {
  switch (t) {
    case AgentType::kVehicle: return vehicle;
    case AgentType::kPedestrian: return pedestrian;
    case AgentType::kCyclist: return cyclist;
  }
  throw std::invalid_argument("unknown agent type");
}

}  // namespace trajcast
