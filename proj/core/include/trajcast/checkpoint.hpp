// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Parameter checkpoint.
//
// File layout (little-endian): envelope magic "TCKP", u32 version, u64
// payload size, u64 FNV-1a checksum. Payload: length-prefixed config text
// (the non-default keys that rebuild the model), u32 parameter count, then
// per parameter: name, u32 rows, u32 cols, row-major f64 entries. Parameters
// are ordered by name; weights round-trip bit-exactly.

#pragma once

#include <string>

#include "trajcast/nn.hpp"

namespace trajcast {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::string config_text;  // parseable by Config::parse
  nn::ParamStore params;
};

std::string checkpoint_serialize(const Checkpoint& ckpt);
Checkpoint checkpoint_deserialize(const std::string& bytes);

void checkpoint_save(const std::string& path, const Checkpoint& ckpt);
Checkpoint checkpoint_load(const std::string& path);

}  // namespace trajcast
