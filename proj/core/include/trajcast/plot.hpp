// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Static top-down scene figures as standalone SVG text: road graph, target
// history, ground-truth future when present, and optionally the predicted
// modes colored by probability.

#pragma once

#include <string>

#include "trajcast/predictor.hpp"
#include "trajcast/types.hpp"

namespace trajcast {

/// Renders one scene; `modes` may be null. The scene and the modes must share
/// one frame (both world or both canonical).
std::string scene_svg(const Scene& scene, const ModeSet* modes);

}  // namespace trajcast
