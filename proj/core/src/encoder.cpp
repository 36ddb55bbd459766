// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/encoder.hpp"

#include <cmath>
#include <stdexcept>

namespace trajcast {
namespace {

constexpr int kLaneTypes = 4;

}  // namespace

nn::Mat history_feature_matrix(const AgentTrack& track, int expected_steps) {
  if (static_cast<int>(track.history.size()) != expected_steps)
    throw std::invalid_argument("history length " + std::to_string(track.history.size()) +
                                ", expected " + std::to_string(expected_steps));
  const int h = expected_steps;
  nn::Mat f = nn::Mat::Zero(h, kHistoryFeatureDim);
  for (int i = 0; i < h; ++i) {
    const AgentState& s = track.history[static_cast<std::size_t>(i)];
    if (s.valid) {
      f(i, 0) = s.x;
      f(i, 1) = s.y;
      f(i, 2) = std::cos(s.heading);
      f(i, 3) = std::sin(s.heading);
      f(i, 4) = s.vx;
      f(i, 5) = s.vy;
      f(i, 6) = s.speed();
      f(i, 8) = 1.0;
    }
    f(i, 7) = h > 1 ? static_cast<double>(i) / (h - 1) : 0.0;
    f(i, 9 + static_cast<int>(track.agent_type)) = 1.0;
  }
  return f;
}

std::vector<std::uint8_t> history_step_mask(const AgentTrack& track) {
  std::vector<std::uint8_t> mask;
  mask.reserve(track.history.size());
  for (const AgentState& s : track.history) mask.push_back(s.valid ? 1 : 0);
  return mask;
}

nn::Mat roadgraph_feature_matrix(const std::vector<RoadGraphPolyline>& polylines) {
  nn::Mat f = nn::Mat::Zero(static_cast<int>(polylines.size()), kRoadFeatureDim);
  for (std::size_t i = 0; i < polylines.size(); ++i) {
    const RoadGraphPolyline& p = polylines[i];
    if (p.nodes.empty()) throw std::invalid_argument("roadgraph polyline with no nodes");
    if (p.lane_type < 0 || p.lane_type >= kLaneTypes)
      throw std::invalid_argument("lane type out of range: " + std::to_string(p.lane_type));
    const RoadGraphNode& a = p.nodes.front();
    const RoadGraphNode& b = p.nodes.back();
    double mx = 0.0, my = 0.0, arclen = 0.0;
    for (std::size_t k = 0; k < p.nodes.size(); ++k) {
      mx += p.nodes[k].x;
      my += p.nodes[k].y;
      if (k > 0)
        arclen += std::hypot(p.nodes[k].x - p.nodes[k - 1].x, p.nodes[k].y - p.nodes[k - 1].y);
    }
    int r = static_cast<int>(i);
    f(r, 0) = a.x;
    f(r, 1) = a.y;
    f(r, 2) = a.dir_x;
    f(r, 3) = a.dir_y;
    f(r, 4) = b.x;
    f(r, 5) = b.y;
    f(r, 6) = b.dir_x;
    f(r, 7) = b.dir_y;
    f(r, 8) = mx / static_cast<double>(p.nodes.size());
    f(r, 9) = my / static_cast<double>(p.nodes.size());
    f(r, 10) = arclen;
    f(r, 11) = static_cast<double>(p.nodes.size()) / kMaxPolylineNodes;
    f(r, 12 + p.lane_type) = 1.0;
  }
  return f;
}

SceneEncoder::SceneEncoder(nn::ParamStore& store, Rng& rng, const EncoderConfig& cfg)
    : cfg_(cfg),
      hist_embed_(store, rng, "enc.hist.embed", kHistoryFeatureDim, {cfg.hidden}, cfg.dim),
      hist_stack_(store, rng, "enc.hist.mcg", cfg.dim, cfg.cg_blocks),
      nbr_stack_(store, rng, "enc.nbr.mcg", cfg.dim, cfg.cg_blocks),
      road_embed_(store, rng, "enc.road.embed", kRoadFeatureDim, {cfg.hidden}, cfg.dim),
      road_stack_(store, rng, "enc.road.mcg", cfg.dim, cfg.cg_blocks),
      fuse_net_(store, rng, "enc.fuse", 3 * cfg.dim, {cfg.hidden}, cfg.dim),
      hist_ctx0_("enc.hist.ctx0") {
  store.create(hist_ctx0_, 1, cfg.dim);
}

nn::Value SceneEncoder::encode_history_features(nn::Tape& t, nn::ParamUse& p, nn::Value features,
                                                const std::vector<std::uint8_t>& step_valid) const {
  nn::Value elems = t.tanh(hist_embed_.apply(t, p, features));
  return hist_stack_.apply(t, p, elems, p(hist_ctx0_), step_valid).context;
}

nn::Value SceneEncoder::encode_history(nn::Tape& t, nn::ParamUse& p,
                                       const AgentTrack& track) const {
  nn::Value features = t.input(history_feature_matrix(track, cfg_.history_steps));
  return encode_history_features(t, p, features, history_step_mask(track));
}

nn::Value SceneEncoder::encode_neighbor_elements(nn::Tape& t, nn::ParamUse& p, nn::Value elements,
                                                 const std::vector<std::uint8_t>& valid,
                                                 nn::Value context) const {
  return nbr_stack_.apply(t, p, elements, context, valid).context;
}

nn::Value SceneEncoder::encode_neighbors(nn::Tape& t, nn::ParamUse& p,
                                         const std::vector<AgentTrack>& neighbors,
                                         nn::Value context) const {
  if (neighbors.empty()) {
    nn::Value empty = t.input(nn::Mat::Zero(0, cfg_.dim));
    return encode_neighbor_elements(t, p, empty, {}, context);
  }
  std::vector<nn::Value> rows;
  std::vector<std::uint8_t> valid;
  rows.reserve(neighbors.size());
  for (const AgentTrack& nb : neighbors) {
    rows.push_back(encode_history(t, p, nb));
    // A neighbor with no observed step carries no information; keep it out of
    // the pools.
    bool any = false;
    for (const AgentState& s : nb.history) any = any || s.valid;
    valid.push_back(any ? 1 : 0);
  }
  return encode_neighbor_elements(t, p, t.concat_rows(rows), valid, context);
}

nn::Value SceneEncoder::encode_roadgraph_features(nn::Tape& t, nn::ParamUse& p, nn::Value features,
                                                  nn::Value context) const {
  nn::Value elems = t.tanh(road_embed_.apply(t, p, features));
  std::vector<std::uint8_t> valid(static_cast<std::size_t>(t.val(features).rows()), 1);
  return road_stack_.apply(t, p, elems, context, valid).context;
}

nn::Value SceneEncoder::encode_roadgraph(nn::Tape& t, nn::ParamUse& p,
                                         const std::vector<RoadGraphPolyline>& polylines,
                                         nn::Value context) const {
  nn::Value features = t.input(roadgraph_feature_matrix(polylines));
  return encode_roadgraph_features(t, p, features, context);
}

nn::Value SceneEncoder::fuse(nn::Tape& t, nn::ParamUse& p, nn::Value target_emb,
                             nn::Value neighbor_emb, nn::Value road_emb) const {
  nn::Value cat = t.concat_cols({target_emb, neighbor_emb, road_emb});
  return fuse_net_.apply(t, p, cat);
}

nn::Value SceneEncoder::encode(nn::Tape& t, nn::ParamUse& p, const Scene& scene) const {
  if (scene.frame != Frame::kCanonical)
    throw std::invalid_argument("encoder requires canonical-frame scenes");
  nn::Value target_emb = encode_history(t, p, scene.target);
  nn::Value nbr_emb = encode_neighbors(t, p, scene.neighbors, target_emb);
  nn::Value road_emb = encode_roadgraph(t, p, scene.roadgraph, target_emb);
  return fuse(t, p, target_emb, nbr_emb, road_emb);
}

}  // namespace trajcast
