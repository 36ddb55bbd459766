// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Preprocessed scene cache.
//
// File layout (all little-endian):
//   magic   "TCSC" (4 bytes)
//   u32     format version (currently 1)
//   u64     payload size in bytes
//   u64     FNV-1a 64 checksum of the payload
//   payload u64 scene count, then length-prefixed scene records
//
// Scene record (u32 byte length, then):
//   str scene_id | u8 frame | 3x f32 anchor pose
//   target track | u32 neighbor count | neighbor tracks
//   u32 polyline count | polylines
// Track:    str agent_id | u8 type | u32 H | H states | u32 T | T states
// State:    f32 x,y,heading,vx,vy | u8 valid
// Polyline: i32 lane_type | u32 node count | nodes of f32 x,y,dir_x,dir_y
//
// Continuous fields are stored as 32-bit floats: reading widens them exactly,
// so read(write(s)) is bit-identical once values have passed through the
// format, and rewriting a read cache reproduces the file byte for byte.

#pragma once

#include <string>
#include <vector>

#include "trajcast/types.hpp"

namespace trajcast {

inline constexpr std::uint32_t kSceneCacheVersion = 1;

/// Writes canonicalized scenes to a cache file. Throws std::invalid_argument
/// if any scene is not in the canonical frame, std::runtime_error on I/O
/// failure.
void cache_write(const std::vector<Scene>& scenes, const std::string& path);

/// Reads a cache file. Corrupt or version-mismatched files are rejected with
/// a diagnostic, and nothing is returned partially.
std::vector<Scene> cache_read(const std::string& path);

/// In-memory variants used by the file API and by round-trip tests.
std::string cache_serialize(const std::vector<Scene>& scenes);
std::vector<Scene> cache_deserialize(const std::string& bytes);

}  // namespace trajcast
