// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Trajectory decoders. Every head maps a scene embedding to a fixed-size
// mode set: M trajectories of T positions with per-step unconstrained
// covariance parameters and a probability per mode. Decoders emit per-step
// offsets which a prefix sum turns into positions, so a fresh model starts
// near the canonical origin.
//
// The multi head runs a bank of decoders, projects every intermediate mode's
// raw output into a feature row, lets learned queries attend over those rows,
// refines the fused rows with a context-gating stack under the scene
// embedding, and decodes the final modes from the refined rows.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trajcast/nn.hpp"
#include "trajcast/objective.hpp"
#include "trajcast/rng.hpp"

namespace trajcast {

struct PredictorConfig {
  int dim = 128;
  int hidden = 128;
  int modes = 6;
  int steps = 80;
  int decoders = 5;        // multi head only
  double p_update = 0.5;   // per-decoder update probability
  int fusion_cg_blocks = 2;
};

/// Decoded mode set in plain numbers; the external contract of both heads.
struct ModeSet {
  std::vector<ModeTrajectory> modes;  // prob fields sum to 1
  std::vector<double> logits;
};

/// Differentiable mode set: per-mode mean positions (T x 2), raw covariance
/// (T x 3) and the 1 x M logit row.
struct ModeSetGraph {
  std::vector<ModeGraph> modes;
  nn::Value logits;
};

/// Empty when valid; otherwise one line per violated mode-set invariant.
std::vector<std::string> mode_set_invariant_violations(const ModeSet& ms, int expected_modes,
                                                       int expected_steps);

/// Reads a graph mode set off the tape into plain numbers.
ModeSet to_mode_set(const nn::Tape& t, const ModeSetGraph& g);

/// One decoder: shared trunk, then a linear head per mode emitting
/// T*5 trajectory parameters plus one mode logit.
class TrajectoryDecoder {
 public:
  TrajectoryDecoder(nn::ParamStore& store, Rng& rng, const std::string& prefix,
                    const PredictorConfig& cfg);

  /// Raw per-mode head rows, each 1 x (T*5 + 1).
  std::vector<nn::Value> decode_raw(nn::Tape& t, nn::ParamUse& p, nn::Value embedding) const;

  ModeSetGraph decode(nn::Tape& t, nn::ParamUse& p, nn::Value embedding) const;

 private:
  PredictorConfig cfg_;
  nn::Mlp trunk_;
  std::vector<nn::Linear> mode_heads_;
};

/// Converts raw head rows into a mode set graph (offset prefix sum inside).
ModeSetGraph raw_modes_to_graph(nn::Tape& t, const std::vector<nn::Value>& raw, int steps);

class SingleHead {
 public:
  SingleHead(nn::ParamStore& store, Rng& rng, const PredictorConfig& cfg);
  ModeSetGraph decode(nn::Tape& t, nn::ParamUse& p, nn::Value embedding) const;
  const PredictorConfig& config() const { return cfg_; }

 private:
  PredictorConfig cfg_;
  TrajectoryDecoder decoder_;
};

class MultiHead {
 public:
  MultiHead(nn::ParamStore& store, Rng& rng, const PredictorConfig& cfg);

  ModeSetGraph decode(nn::Tape& t, nn::ParamUse& p, nn::Value embedding) const;

  /// Intermediate modes from every decoder in bank order (K*modes rows).
  std::vector<nn::Value> intermediate_raw(nn::Tape& t, nn::ParamUse& p, nn::Value embedding) const;

  /// Fusion of intermediate raw rows; exposed for permutation tests.
  ModeSetGraph fuse_modes(nn::Tape& t, nn::ParamUse& p, const std::vector<nn::Value>& raw,
                          nn::Value embedding) const;

  const PredictorConfig& config() const { return cfg_; }
  /// Parameter name prefix of decoder k, the unit of update blocking.
  static std::string decoder_prefix(int k);

 private:
  PredictorConfig cfg_;
  std::vector<TrajectoryDecoder> decoders_;
  nn::Mlp fusion_in_;
  nn::McgStack refine_;
  nn::Linear fused_head_;
  std::string query_name_, wk_name_, wv_name_;
};

/// Per-decoder update flags: independent draws at p_update, resampled until
/// at least one decoder is flagged. Deterministic in the generator state.
std::vector<std::uint8_t> sample_update_mask(Rng& rng, int decoders, double p_update);

}  // namespace trajcast
