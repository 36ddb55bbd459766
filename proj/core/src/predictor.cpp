// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/predictor.hpp"

#include <cmath>
#include <stdexcept>

namespace trajcast {
namespace {

int head_width(const PredictorConfig& cfg) { return cfg.steps * 5 + 1; }

}  // namespace

std::vector<std::string> mode_set_invariant_violations(const ModeSet& ms, int expected_modes,
                                                       int expected_steps) {
  std::vector<std::string> out;
  if (static_cast<int>(ms.modes.size()) != expected_modes) {
    out.push_back("mode count " + std::to_string(ms.modes.size()) + ", expected " +
                  std::to_string(expected_modes));
    return out;
  }
  double psum = 0.0;
  for (std::size_t m = 0; m < ms.modes.size(); ++m) {
    const ModeTrajectory& mt = ms.modes[m];
    std::string tag = "mode " + std::to_string(m) + ": ";
    if (static_cast<int>(mt.points.size()) != expected_steps ||
        static_cast<int>(mt.covs.size()) != expected_steps)
      out.push_back(tag + "length mismatch");
    if (!(mt.prob > 0.0 && mt.prob < 1.0) && ms.modes.size() > 1)
      out.push_back(tag + "probability outside (0, 1)");
    psum += mt.prob;
    for (const Point2& pt : mt.points)
      if (!std::isfinite(pt[0]) || !std::isfinite(pt[1])) {
        out.push_back(tag + "non-finite position");
        break;
      }
    for (const Covariance2D& c : mt.covs) {
      // SPD check for [[sx^2, rho sx sy], [rho sx sy, sy^2]].
      if (!(c.sx > 0.0) || !(c.sy > 0.0) || !(std::abs(c.rho) < 1.0)) {
        out.push_back(tag + "covariance not positive definite");
        break;
      }
    }
  }
  if (std::abs(psum - 1.0) > 1e-6) out.push_back("probabilities sum to " + std::to_string(psum));
  return out;
}

ModeSet to_mode_set(const nn::Tape& t, const ModeSetGraph& g) {
  ModeSet ms;
  const nn::Mat& logits = t.val(g.logits);
  double mx = logits.maxCoeff();
  double z = (logits.array() - mx).exp().sum();
  for (std::size_t m = 0; m < g.modes.size(); ++m) {
    const nn::Mat& mean = t.val(g.modes[m].mean);
    const nn::Mat& cov = t.val(g.modes[m].cov_raw);
    ModeTrajectory mt;
    mt.prob = std::exp(logits(0, static_cast<int>(m)) - mx) / z;
    mt.points.reserve(static_cast<std::size_t>(mean.rows()));
    mt.covs.reserve(static_cast<std::size_t>(mean.rows()));
    for (int r = 0; r < mean.rows(); ++r) {
      mt.points.push_back({mean(r, 0), mean(r, 1)});
      mt.covs.push_back(decode_covariance(cov(r, 0), cov(r, 1), cov(r, 2)));
    }
    ms.modes.push_back(std::move(mt));
    ms.logits.push_back(logits(0, static_cast<int>(m)));
  }
  return ms;
}

TrajectoryDecoder::TrajectoryDecoder(nn::ParamStore& store, Rng& rng, const std::string& prefix,
                                     const PredictorConfig& cfg)
    : cfg_(cfg), trunk_(store, rng, prefix + ".trunk", cfg.dim, {cfg.hidden}, cfg.hidden) {
  for (int m = 0; m < cfg.modes; ++m)
    mode_heads_.emplace_back(store, rng, prefix + ".mode" + std::to_string(m), cfg.hidden,
                             head_width(cfg));
}

std::vector<nn::Value> TrajectoryDecoder::decode_raw(nn::Tape& t, nn::ParamUse& p,
                                                     nn::Value embedding) const {
  nn::Value h = t.tanh(trunk_.apply(t, p, embedding));
  std::vector<nn::Value> raw;
  raw.reserve(mode_heads_.size());
  for (const nn::Linear& head : mode_heads_) raw.push_back(head.apply(t, p, h));
  return raw;
}

ModeSetGraph TrajectoryDecoder::decode(nn::Tape& t, nn::ParamUse& p, nn::Value embedding) const {
  return raw_modes_to_graph(t, decode_raw(t, p, embedding), cfg_.steps);
}

ModeSetGraph raw_modes_to_graph(nn::Tape& t, const std::vector<nn::Value>& raw, int steps) {
  if (raw.empty()) throw std::invalid_argument("raw_modes_to_graph: no modes");
  ModeSetGraph g;
  std::vector<nn::Value> logits;
  logits.reserve(raw.size());
  for (nn::Value r : raw) {
    const nn::Mat& v = t.val(r);
    if (v.rows() != 1 || v.cols() != steps * 5 + 1)
      throw std::invalid_argument("raw mode row must be 1 x (steps*5 + 1)");
    nn::Value params = t.reshape_rowmajor(t.slice_cols(r, 0, steps * 5), steps, 5);
    ModeGraph mode;
    mode.mean = t.cumsum_rows(t.slice_cols(params, 0, 2));
    mode.cov_raw = t.slice_cols(params, 2, 3);
    g.modes.push_back(mode);
    logits.push_back(t.slice_cols(r, steps * 5, 1));
  }
  g.logits = t.concat_cols(logits);
  return g;
}

SingleHead::SingleHead(nn::ParamStore& store, Rng& rng, const PredictorConfig& cfg)
    : cfg_(cfg), decoder_(store, rng, "dec0", cfg) {}

ModeSetGraph SingleHead::decode(nn::Tape& t, nn::ParamUse& p, nn::Value embedding) const {
  return decoder_.decode(t, p, embedding);
}

std::string MultiHead::decoder_prefix(int k) { return "dec" + std::to_string(k); }

MultiHead::MultiHead(nn::ParamStore& store, Rng& rng, const PredictorConfig& cfg)
    : cfg_(cfg),
      fusion_in_(store, rng, "fusion.in", head_width(cfg), {cfg.hidden}, cfg.dim),
      refine_(store, rng, "fusion.refine", cfg.dim, cfg.fusion_cg_blocks),
      fused_head_(store, rng, "fusion.head", cfg.dim, head_width(cfg)),
      query_name_("fusion.q"),
      wk_name_("fusion.wk"),
      wv_name_("fusion.wv") {
  if (cfg.decoders < 1) throw std::invalid_argument("multi head needs at least one decoder");
  for (int k = 0; k < cfg.decoders; ++k)
    decoders_.emplace_back(store, rng, decoder_prefix(k), cfg);
  nn::xavier_init(store.create(query_name_, cfg.modes, cfg.dim), rng);
  nn::xavier_init(store.create(wk_name_, cfg.dim, cfg.dim), rng);
  nn::xavier_init(store.create(wv_name_, cfg.dim, cfg.dim), rng);
}

std::vector<nn::Value> MultiHead::intermediate_raw(nn::Tape& t, nn::ParamUse& p,
                                                   nn::Value embedding) const {
  std::vector<nn::Value> all;
  all.reserve(static_cast<std::size_t>(cfg_.decoders) * static_cast<std::size_t>(cfg_.modes));
  for (const TrajectoryDecoder& d : decoders_) {
    std::vector<nn::Value> raw = d.decode_raw(t, p, embedding);
    all.insert(all.end(), raw.begin(), raw.end());
  }
  return all;
}

ModeSetGraph MultiHead::fuse_modes(nn::Tape& t, nn::ParamUse& p, const std::vector<nn::Value>& raw,
                                   nn::Value embedding) const {
  // Mode feature rows, K*M x dim.
  std::vector<nn::Value> rows;
  rows.reserve(raw.size());
  for (nn::Value r : raw) rows.push_back(fusion_in_.apply(t, p, r));
  nn::Value feats = t.tanh(t.concat_rows(rows));

  nn::Value keys = t.matmul(feats, p(wk_name_));
  nn::Value values = t.matmul(feats, p(wv_name_));
  nn::Value scores = t.scale(t.matmul(p(query_name_), t.transpose(keys)),
                             1.0 / std::sqrt(static_cast<double>(cfg_.dim)));
  nn::Value fused = t.matmul(t.row_softmax(scores), values);

  std::vector<std::uint8_t> all_valid(static_cast<std::size_t>(cfg_.modes), 1);
  nn::Value refined = refine_.apply(t, p, fused, embedding, all_valid).elements;

  std::vector<nn::Value> final_raw;
  final_raw.reserve(static_cast<std::size_t>(cfg_.modes));
  for (int m = 0; m < cfg_.modes; ++m)
    final_raw.push_back(fused_head_.apply(t, p, t.slice_rows(refined, m, 1)));
  return raw_modes_to_graph(t, final_raw, cfg_.steps);
}

ModeSetGraph MultiHead::decode(nn::Tape& t, nn::ParamUse& p, nn::Value embedding) const {
  return fuse_modes(t, p, intermediate_raw(t, p, embedding), embedding);
}

std::vector<std::uint8_t> sample_update_mask(Rng& rng, int decoders, double p_update) {
  if (decoders < 1) throw std::invalid_argument("sample_update_mask: need at least one decoder");
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(decoders));
  for (;;) {
    bool any = false;
    for (int k = 0; k < decoders; ++k) {
      mask[static_cast<std::size_t>(k)] = rng.bernoulli(p_update) ? 1 : 0;
      any = any || mask[static_cast<std::size_t>(k)];
    }
    if (any) return mask;
  }
}

}  // namespace trajcast
