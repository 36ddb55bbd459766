// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Scene encoder: target history, neighbor histories and the road graph each
// pass a context-gating stack; the three pooled embeddings fuse into one
// scene embedding. There is no separate ego-vehicle branch; any ego agent is
// an ordinary neighbor. All paths run on an autodiff tape so the same code
// serves prediction and training.

#pragma once

#include <cstdint>
#include <vector>

#include "trajcast/nn.hpp"
#include "trajcast/types.hpp"

namespace trajcast {

/// Per-step history feature layout:
///   x, y, cos(heading), sin(heading), vx, vy, speed, step index / (H-1),
///   valid flag, agent type one-hot (3).
inline constexpr int kHistoryFeatureDim = 12;

/// Per-polyline feature layout:
///   first node x, y, dir; last node x, y, dir; mean x, y; arc length;
///   node count / max nodes; lane type one-hot (4).
inline constexpr int kRoadFeatureDim = 16;

struct EncoderConfig {
  int dim = 128;
  int hidden = 128;
  int cg_blocks = 3;
  int history_steps = 11;
};

/// Feature rows for one track, H x kHistoryFeatureDim. Invalid steps emit
/// zeroed numeric fields so their payloads cannot leak downstream; only the
/// step index and type survive (and those rows never reach any pool).
/// Throws std::invalid_argument when the history length differs from
/// `expected_steps`.
nn::Mat history_feature_matrix(const AgentTrack& track, int expected_steps);

/// Per-step validity flags for a track's history.
std::vector<std::uint8_t> history_step_mask(const AgentTrack& track);

/// Feature rows for the road graph, one row per polyline. Empty polylines are
/// rejected.
nn::Mat roadgraph_feature_matrix(const std::vector<RoadGraphPolyline>& polylines);

class SceneEncoder {
 public:
  SceneEncoder(nn::ParamStore& store, Rng& rng, const EncoderConfig& cfg);

  /// History stack applied to a prebuilt feature matrix; `step_valid` masks
  /// pooled steps. Exposed so gradient checks can differentiate w.r.t. the
  /// raw features.
  nn::Value encode_history_features(nn::Tape& t, nn::ParamUse& p, nn::Value features,
                                    const std::vector<std::uint8_t>& step_valid) const;

  /// Embedding of one agent track (target or neighbor; weights are shared).
  nn::Value encode_history(nn::Tape& t, nn::ParamUse& p, const AgentTrack& track) const;

  /// Pools per-neighbor history embeddings under the given context.
  /// Permutation-invariant; an empty set falls back to the learned defaults.
  nn::Value encode_neighbors(nn::Tape& t, nn::ParamUse& p,
                             const std::vector<AgentTrack>& neighbors, nn::Value context) const;

  /// Same contract for prebuilt neighbor element rows (one per neighbor).
  nn::Value encode_neighbor_elements(nn::Tape& t, nn::ParamUse& p, nn::Value elements,
                                     const std::vector<std::uint8_t>& valid,
                                     nn::Value context) const;

  nn::Value encode_roadgraph(nn::Tape& t, nn::ParamUse& p,
                             const std::vector<RoadGraphPolyline>& polylines,
                             nn::Value context) const;
  nn::Value encode_roadgraph_features(nn::Tape& t, nn::ParamUse& p, nn::Value features,
                                      nn::Value context) const;

  /// Fuses the three pooled embeddings into the scene embedding (1 x dim).
  nn::Value fuse(nn::Tape& t, nn::ParamUse& p, nn::Value target_emb, nn::Value neighbor_emb,
                 nn::Value road_emb) const;

  /// Full pipeline for one canonical-frame scene.
  nn::Value encode(nn::Tape& t, nn::ParamUse& p, const Scene& scene) const;

  const EncoderConfig& config() const { return cfg_; }

 private:
  EncoderConfig cfg_;
  nn::Mlp hist_embed_;
  nn::McgStack hist_stack_;
  nn::McgStack nbr_stack_;
  nn::Mlp road_embed_;
  nn::McgStack road_stack_;
  nn::Mlp fuse_net_;
  std::string hist_ctx0_;
};

}  // namespace trajcast
