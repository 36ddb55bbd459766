// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Training-time history masking. Each (agent, history step) pair is masked
// independently with probability p_mask: numeric fields zeroed, validity
// cleared. Future ground truth and the road graph are never touched. The
// target's current step may be masked like any other; the stored anchor pose
// was computed before masking, so canonicalization is unaffected.

#pragma once

#include <cstdint>

#include "trajcast/types.hpp"

namespace trajcast {

/// Deterministic in `seed`. Draw order: target history in step order, then
/// each neighbor in vector order. Throws std::invalid_argument unless
/// 0 <= p_mask <= 1.
Scene mask_history(const Scene& scene, double p_mask, std::uint64_t seed);

}  // namespace trajcast
