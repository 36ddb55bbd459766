// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/scene_cache.hpp"

#include <stdexcept>

#include "trajcast/binio.hpp"

namespace trajcast {
namespace {

constexpr std::string_view kMagic = "TCSC";

void put_state(ByteWriter& w, const AgentState& s) {
  w.f32(static_cast<float>(s.x));
  w.f32(static_cast<float>(s.y));
  w.f32(static_cast<float>(s.heading));
  w.f32(static_cast<float>(s.vx));
  w.f32(static_cast<float>(s.vy));
  w.u8(s.valid ? 1 : 0);
}

AgentState get_state(ByteReader& r) {
  AgentState s;
  s.x = r.f32();
  s.y = r.f32();
  s.heading = r.f32();
  s.vx = r.f32();
  s.vy = r.f32();
  s.valid = r.u8() != 0;
  return s;
}

void put_track(ByteWriter& w, const AgentTrack& t) {
  w.str(t.agent_id);
  w.u8(static_cast<std::uint8_t>(t.agent_type));
  w.u32(static_cast<std::uint32_t>(t.history.size()));
  for (const AgentState& s : t.history) put_state(w, s);
  w.u32(static_cast<std::uint32_t>(t.future.size()));
  for (const AgentState& s : t.future) put_state(w, s);
}

AgentTrack get_track(ByteReader& r) {
  AgentTrack t;
  t.agent_id = r.str();
  std::uint8_t type = r.u8();
  if (type >= kAgentTypeCount) throw std::runtime_error("scene cache: bad agent type");
  t.agent_type = static_cast<AgentType>(type);
  t.history.resize(r.u32());
  for (AgentState& s : t.history) s = get_state(r);
  t.future.resize(r.u32());
  for (AgentState& s : t.future) s = get_state(r);
  return t;
}

void put_scene(ByteWriter& w, const Scene& scene) {
  ByteWriter rec;
  rec.str(scene.scene_id);
  rec.u8(scene.frame == Frame::kCanonical ? 1 : 0);
  rec.f32(static_cast<float>(scene.anchor_pose.x));
  rec.f32(static_cast<float>(scene.anchor_pose.y));
  rec.f32(static_cast<float>(scene.anchor_pose.heading));
  put_track(rec, scene.target);
  rec.u32(static_cast<std::uint32_t>(scene.neighbors.size()));
  for (const AgentTrack& t : scene.neighbors) put_track(rec, t);
  rec.u32(static_cast<std::uint32_t>(scene.roadgraph.size()));
  for (const RoadGraphPolyline& p : scene.roadgraph) {
    rec.i32(p.lane_type);
    rec.u32(static_cast<std::uint32_t>(p.nodes.size()));
    for (const RoadGraphNode& n : p.nodes) {
      rec.f32(static_cast<float>(n.x));
      rec.f32(static_cast<float>(n.y));
      rec.f32(static_cast<float>(n.dir_x));
      rec.f32(static_cast<float>(n.dir_y));
    }
  }
  w.str(rec.buffer());
}

Scene get_scene(ByteReader& r) {
  std::string rec_bytes = r.str();
  ByteReader rec(rec_bytes);
  Scene scene;
  scene.scene_id = rec.str();
  scene.frame = rec.u8() != 0 ? Frame::kCanonical : Frame::kWorld;
  scene.anchor_pose.x = rec.f32();
  scene.anchor_pose.y = rec.f32();
  scene.anchor_pose.heading = rec.f32();
  scene.target = get_track(rec);
  scene.neighbors.resize(rec.u32());
  for (AgentTrack& t : scene.neighbors) t = get_track(rec);
  scene.roadgraph.resize(rec.u32());
  for (RoadGraphPolyline& p : scene.roadgraph) {
    p.lane_type = rec.i32();
    std::uint32_t n = rec.u32();
    if (n > kMaxPolylineNodes) throw std::runtime_error("scene cache: oversized polyline");
    p.nodes.resize(n);
    for (RoadGraphNode& node : p.nodes) {
      node.x = rec.f32();
      node.y = rec.f32();
      node.dir_x = rec.f32();
      node.dir_y = rec.f32();
    }
  }
  if (!rec.at_end()) throw std::runtime_error("scene cache: trailing bytes in scene record");
  return scene;
}

}  // namespace

std::string cache_serialize(const std::vector<Scene>& scenes) {
  for (const Scene& s : scenes) {
    if (s.frame != Frame::kCanonical)
      throw std::invalid_argument("scene cache stores canonical-frame scenes, got world frame for " +
                                  s.scene_id);
  }
  ByteWriter payload;
  payload.u64(scenes.size());
  for (const Scene& s : scenes) put_scene(payload, s);
  return wrap_envelope(kMagic, kSceneCacheVersion, payload.buffer());
}

std::vector<Scene> cache_deserialize(const std::string& bytes) {
  std::string payload = unwrap_envelope(kMagic, kSceneCacheVersion, bytes, "scene cache");
  ByteReader r(payload);
  std::uint64_t count = r.u64();
  std::vector<Scene> scenes;
  scenes.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) scenes.push_back(get_scene(r));
  if (!r.at_end()) throw std::runtime_error("scene cache: trailing bytes");
  return scenes;
}

void cache_write(const std::vector<Scene>& scenes, const std::string& path) {
  write_file_bytes(path, cache_serialize(scenes));
}

std::vector<Scene> cache_read(const std::string& path) {
  return cache_deserialize(read_file_bytes(path));
}

}  // namespace trajcast
