// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Training loop and evaluation glue: adaptive-moment optimizer with
// name-filtered updates (decoder blocking), plateau learning-rate scheduling,
// hash-stable train/validation split, deterministic batch and masking
// streams, and per-agent-type checkpoint selection.
//
// Determinism contract: with fixed seeds the whole loop is bit-reproducible,
// independent of train.threads, because every random stream is derived from
// named seeds and per-scene gradients reduce in batch order.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trajcast/config.hpp"
#include "trajcast/metrics.hpp"
#include "trajcast/model.hpp"
#include "trajcast/nms.hpp"

namespace trajcast {

/// Adam with bias correction. State is keyed by parameter name and advances
/// only for parameters that pass the update filter, so filtered (blocked)
/// parameters keep bit-identical values, moments and step counts.
class Adam {
 public:
  Adam(double beta1, double beta2, double eps);

  /// Applies one update from `grads` at rate `lr`. Parameters missing from
  /// `grads` and parameters rejected by `update_param` are untouched.
  void step(nn::ParamStore& params, const nn::GradBuffer& grads, double lr,
            const std::function<bool(const std::string&)>& update_param = nullptr);

 private:
  double b1_, b2_, eps_;
  std::map<std::string, nn::Mat> m_, v_;
  std::map<std::string, long> t_;
};

/// Halving-style plateau scheduler: when the observed metric fails to improve
/// on the best by more than min_delta for `patience` consecutive
/// observations, the rate is multiplied by `factor` and the counter resets.
class PlateauScheduler {
 public:
  PlateauScheduler(double lr0, double factor, int patience, double min_delta);

  double lr() const { return lr_; }
  /// Feeds one validation metric; returns true when the rate decayed.
  bool observe(double metric);

 private:
  double lr_, factor_, min_delta_, best_;
  int patience_, bad_ = 0;
};

struct TrainConfig {
  int steps = 2000;
  int batch = 16;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double clip_norm = 10.0;
  double p_mask = 0.15;
  double p_update = 0.5;
  int plateau_patience = 5;
  double plateau_factor = 0.5;
  double plateau_min_delta = 1e-3;
  int eval_every = 100;
  std::uint64_t seed = 1;
  double val_fraction = 0.1;
  int threads = 1;
};

TrainConfig train_config_from(const Config& cfg);
NmsOptions nms_options_from(const Config& cfg);

/// Stable split by scene-id hash: a scene validates iff
/// hash(scene_id) mod 10000 < val_fraction * 10000.
struct SceneSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};
SceneSplit split_scenes(const std::vector<Scene>& scenes, double val_fraction);

/// Masking stream seed for one scene at one step.
std::uint64_t masking_seed(std::uint64_t train_seed, const std::string& scene_id,
                           std::uint64_t step);

struct TrainResult {
  Checkpoint best;
  double best_val_nll = 0.0;
  std::vector<double> train_curve;  // mean batch NLL per step
  std::vector<double> val_curve;    // validation NLL per evaluation
  double final_lr = 0.0;
};

/// Runs the loop on canonical-frame scenes, updating `model` in place and
/// returning the best-validation checkpoint. A non-finite batch loss aborts
/// with the step and scene ids in the diagnostic. `log` may be null.
TrainResult train_loop(Model& model, const std::vector<Scene>& scenes, const TrainConfig& cfg,
                       std::ostream* log = nullptr);

/// Prediction of one canonical scene turned into a world-frame eval record
/// (suppression applied per the options).
EvalRecord eval_record_for(const Model& model, const Scene& canonical_scene,
                           const NmsOptions& nms_opts);

std::vector<EvalRecord> build_eval_records(const Model& model, const std::vector<Scene>& scenes,
                                           const NmsOptions& nms_opts);

/// Validation Soft mAP per model and agent type; absent buckets are NaN.
using TypeScoreTable = std::vector<std::array<double, kAgentTypeCount>>;

struct TypeSelection {
  std::array<int, kAgentTypeCount> model_index = {0, 0, 0};
  std::vector<std::string> warnings;
};

/// Picks, per agent type, the model with the best score; types absent from
/// every table row fall back to the overall-best model with a warning.
TypeSelection select_per_type_from_scores(const TypeScoreTable& scores,
                                          const std::vector<double>& overall);

/// Scores models on validation scenes (Soft mAP averaged over horizons) and
/// selects per type.
TypeSelection select_per_type(const std::vector<const Model*>& models,
                              const std::vector<Scene>& validation, const NmsOptions& nms_opts);

}  // namespace trajcast
