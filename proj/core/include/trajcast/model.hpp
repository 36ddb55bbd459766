// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Full model: scene encoder plus one decoder head, built from a Config and
// owned as one named parameter store. The same graph construction serves
// prediction (forward only) and training (forward + backward on a tape).

#pragma once

#include <memory>
#include <string>

#include "trajcast/checkpoint.hpp"
#include "trajcast/config.hpp"
#include "trajcast/encoder.hpp"
#include "trajcast/predictor.hpp"
#include "trajcast/types.hpp"

namespace trajcast {

/// Canonical-frame mode set re-expressed in the world frame through the
/// anchor pose; positions move rigidly, covariances rotate.
ModeSet mode_set_to_world(const ModeSet& ms, const Pose2& anchor);

class Model {
 public:
  /// Fresh parameters, initialization driven by model.* config keys.
  explicit Model(const Config& cfg);

  /// Rebuilds the architecture from the stored config text, then loads the
  /// checkpoint parameters. Name or shape mismatches are rejected.
  explicit Model(const Checkpoint& ckpt);

  const Config& config() const { return cfg_; }
  nn::ParamStore& params() { return store_; }
  const nn::ParamStore& params() const { return store_; }
  const SceneEncoder& encoder() const { return *encoder_; }
  bool multi() const { return multi_ != nullptr; }
  const MultiHead& multi_head() const;
  int modes() const { return pred_cfg_.modes; }
  int steps() const { return pred_cfg_.steps; }
  int decoders() const { return multi_ ? pred_cfg_.decoders : 1; }

  /// Scene embedding plus head decode on the given tape.
  ModeSetGraph decode(nn::Tape& t, nn::ParamUse& p, const Scene& canonical_scene) const;

  /// Mixture NLL of the scene's ground-truth future (1 x 1 tape value).
  nn::Value loss(nn::Tape& t, nn::ParamUse& p, const Scene& canonical_scene) const;

  /// Forward-only decode into plain numbers, canonical frame.
  ModeSet predict(const Scene& canonical_scene) const;

  /// Forward-only decode mapped back to the world frame via the anchor pose.
  ModeSet predict_world(const Scene& canonical_scene) const;

  /// Forward-only loss value.
  double nll(const Scene& canonical_scene) const;

  Checkpoint to_checkpoint() const;

 private:
  Config cfg_;
  PredictorConfig pred_cfg_;
  nn::ParamStore store_;
  std::unique_ptr<SceneEncoder> encoder_;
  std::unique_ptr<SingleHead> single_;
  std::unique_ptr<MultiHead> multi_;
};

}  // namespace trajcast
