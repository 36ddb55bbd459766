// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/model.hpp"

#include <cmath>
#include <stdexcept>

#include "trajcast/objective.hpp"

namespace trajcast {
namespace {

EncoderConfig encoder_config_from(const Config& cfg) {
  EncoderConfig e;
  e.dim = cfg.get_int("model.dim");
  e.hidden = cfg.get_int("model.hidden");
  e.cg_blocks = cfg.get_int("model.cg_blocks");
  e.history_steps = cfg.get_int("model.history_steps");
  if (e.dim < 1 || e.hidden < 1 || e.cg_blocks < 1 || e.history_steps < 1)
    throw std::invalid_argument("model dimensions must be positive");
  return e;
}

PredictorConfig predictor_config_from(const Config& cfg) {
  PredictorConfig p;
  p.dim = cfg.get_int("model.dim");
  p.hidden = cfg.get_int("model.hidden");
  p.modes = cfg.get_int("model.modes");
  p.steps = cfg.get_int("model.steps");
  p.decoders = cfg.get_int("model.decoders");
  p.p_update = cfg.get_double("train.p_update");
  p.fusion_cg_blocks = cfg.get_int("model.fusion_cg_blocks");
  if (p.modes < 1 || p.steps < 1 || p.decoders < 1)
    throw std::invalid_argument("predictor dimensions must be positive");
  return p;
}

}  // namespace

ModeSet mode_set_to_world(const ModeSet& ms, const Pose2& anchor) {
  double c = std::cos(anchor.heading);
  double s = std::sin(anchor.heading);
  ModeSet out = ms;
  for (ModeTrajectory& m : out.modes) {
    for (Point2& pt : m.points) pt = from_canonical(pt, anchor);
    for (Covariance2D& cv : m.covs) {
      double a = cv.sx * cv.sx;
      double b = cv.rho * cv.sx * cv.sy;
      double d = cv.sy * cv.sy;
      double w00 = c * c * a - 2.0 * c * s * b + s * s * d;
      double w01 = c * s * (a - d) + (c * c - s * s) * b;
      double w11 = s * s * a + 2.0 * c * s * b + c * c * d;
      cv.sx = std::sqrt(w00);
      cv.sy = std::sqrt(w11);
      cv.rho = w01 / (cv.sx * cv.sy);
    }
  }
  return out;
}

Model::Model(const Config& cfg) : cfg_(cfg), pred_cfg_(predictor_config_from(cfg)) {
  Rng rng(cfg.get_u64("model.seed"));
  encoder_ = std::make_unique<SceneEncoder>(store_, rng, encoder_config_from(cfg));
  const std::string head = cfg.get("model.head");
  if (head == "single")
    single_ = std::make_unique<SingleHead>(store_, rng, pred_cfg_);
  else if (head == "multi")
    multi_ = std::make_unique<MultiHead>(store_, rng, pred_cfg_);
  else
    throw std::invalid_argument("model.head must be single or multi, got: " + head);
}

Model::Model(const Checkpoint& ckpt) : Model(Config::parse(ckpt.config_text)) {
  if (ckpt.params.params.size() != store_.params.size())
    throw std::invalid_argument("checkpoint parameter set does not match the architecture");
  for (auto& [name, m] : store_.params) {
    const nn::Mat& src = ckpt.params.at(name);
    if (src.rows() != m.rows() || src.cols() != m.cols())
      throw std::invalid_argument("checkpoint shape mismatch for " + name);
    m = src;
  }
}

const MultiHead& Model::multi_head() const {
  if (!multi_) throw std::logic_error("single-head model has no decoder bank");
  return *multi_;
}

ModeSetGraph Model::decode(nn::Tape& t, nn::ParamUse& p, const Scene& scene) const {
  nn::Value emb = encoder_->encode(t, p, scene);
  return single_ ? single_->decode(t, p, emb) : multi_->decode(t, p, emb);
}

nn::Value Model::loss(nn::Tape& t, nn::ParamUse& p, const Scene& scene) const {
  const std::vector<AgentState>& fut = scene.target.future;
  if (static_cast<int>(fut.size()) != pred_cfg_.steps)
    throw std::invalid_argument("scene future length does not match model steps");
  nn::Mat gt(pred_cfg_.steps, 2);
  std::vector<std::uint8_t> valid(fut.size());
  for (std::size_t i = 0; i < fut.size(); ++i) {
    gt(static_cast<int>(i), 0) = fut[i].x;
    gt(static_cast<int>(i), 1) = fut[i].y;
    valid[i] = fut[i].valid ? 1 : 0;
  }
  ModeSetGraph g = decode(t, p, scene);
  return mixture_nll_graph(t, g.modes, g.logits, gt, valid);
}

ModeSet Model::predict(const Scene& scene) const {
  nn::Tape t;
  nn::ParamUse p(t, store_);
  return to_mode_set(t, decode(t, p, scene));
}

ModeSet Model::predict_world(const Scene& scene) const {
  return mode_set_to_world(predict(scene), scene.anchor_pose);
}

double Model::nll(const Scene& scene) const {
  nn::Tape t;
  nn::ParamUse p(t, store_);
  return t.val(loss(t, p, scene))(0, 0);
}

Checkpoint Model::to_checkpoint() const {
  Checkpoint ckpt;
  ckpt.config_text = cfg_.to_text();
  ckpt.params = store_;
  return ckpt;
}

}  // namespace trajcast
