// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Prediction record stream written by `predict` and consumed by `eval` and
// `plot`. Envelope magic "TCPR", u32 version, u64 payload size, u64 FNV-1a
// checksum. Payload: u64 record count, then per record: scene id, u8 agent
// type, f64 initial speed, u32 modes, u32 steps, and per mode its f64
// probability followed by per-step f64 x, y, sigma_x, sigma_y, rho (world
// frame, decoded covariance).

#pragma once

#include <string>
#include <vector>

#include "trajcast/predictor.hpp"
#include "trajcast/types.hpp"

namespace trajcast {

inline constexpr std::uint32_t kPredictionsVersion = 1;

struct PredictionRecord {
  std::string scene_id;
  AgentType agent_type = AgentType::kVehicle;
  double initial_speed = 0.0;
  ModeSet modes;  // world frame
};

std::string predictions_serialize(const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> predictions_deserialize(const std::string& bytes);

void predictions_save(const std::string& path, const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> predictions_load(const std::string& path);

}  // namespace trajcast
