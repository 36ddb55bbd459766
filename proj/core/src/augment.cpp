// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/augment.hpp"

#include <stdexcept>

#include "trajcast/rng.hpp"

namespace trajcast {
namespace {

void mask_track(AgentTrack& track, double p_mask, Rng& rng) {
  for (AgentState& s : track.history) {
    if (!rng.bernoulli(p_mask)) continue;
    s = AgentState{};  // zeroed fields, valid = false
  }
}

}  // namespace

Scene mask_history(const Scene& scene, double p_mask, std::uint64_t seed) {
  if (!(p_mask >= 0.0 && p_mask <= 1.0))
    throw std::invalid_argument("mask_history: p_mask must be in [0, 1]");
  Scene out = scene;
  Rng rng(seed);
  mask_track(out.target, p_mask, rng);
  for (AgentTrack& nb : out.neighbors) mask_track(nb, p_mask, rng);
  return out;
}

}  // namespace trajcast
