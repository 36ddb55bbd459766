// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/checkpoint.hpp"

#include <stdexcept>

#include "trajcast/binio.hpp"

namespace trajcast {
namespace {

constexpr std::string_view kMagic = "TCKP";

}  // namespace

std::string checkpoint_serialize(const Checkpoint& ckpt) {
  ByteWriter payload;
  payload.str(ckpt.config_text);
  payload.u32(static_cast<std::uint32_t>(ckpt.params.params.size()));
  for (const auto& [name, m] : ckpt.params.params) {
    payload.str(name);
    payload.u32(static_cast<std::uint32_t>(m.rows()));
    payload.u32(static_cast<std::uint32_t>(m.cols()));
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) payload.f64(m(r, c));
  }
  return wrap_envelope(kMagic, kCheckpointVersion, payload.buffer());
}

Checkpoint checkpoint_deserialize(const std::string& bytes) {
  std::string payload = unwrap_envelope(kMagic, kCheckpointVersion, bytes, "checkpoint");
  ByteReader r(payload);
  Checkpoint ckpt;
  ckpt.config_text = r.str();
  std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.str();
    std::uint32_t rows = r.u32();
    std::uint32_t cols = r.u32();
    nn::Mat& m = ckpt.params.create(name, static_cast<int>(rows), static_cast<int>(cols));
    for (std::uint32_t rr = 0; rr < rows; ++rr)
      for (std::uint32_t cc = 0; cc < cols; ++cc)
        m(static_cast<int>(rr), static_cast<int>(cc)) = r.f64();
  }
  if (!r.at_end()) throw std::runtime_error("checkpoint: trailing bytes");
  return ckpt;
}

void checkpoint_save(const std::string& path, const Checkpoint& ckpt) {
  write_file_bytes(path, checkpoint_serialize(ckpt));
}

Checkpoint checkpoint_load(const std::string& path) {
  return checkpoint_deserialize(read_file_bytes(path));
}

}  // namespace trajcast
