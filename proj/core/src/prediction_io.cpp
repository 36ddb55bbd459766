// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/prediction_io.hpp"

#include <cmath>
#include <stdexcept>

#include "trajcast/binio.hpp"

namespace trajcast {
namespace {

constexpr std::string_view kMagic = "TCPR";

}  // namespace

std::string predictions_serialize(const std::vector<PredictionRecord>& records) {
  ByteWriter payload;
  payload.u64(records.size());
  for (const PredictionRecord& r : records) {
    payload.str(r.scene_id);
    payload.u8(static_cast<std::uint8_t>(r.agent_type));
    payload.f64(r.initial_speed);
    payload.u32(static_cast<std::uint32_t>(r.modes.modes.size()));
    std::size_t steps = r.modes.modes.empty() ? 0 : r.modes.modes.front().points.size();
    payload.u32(static_cast<std::uint32_t>(steps));
    for (const ModeTrajectory& m : r.modes.modes) {
      if (m.points.size() != steps || m.covs.size() != steps)
        throw std::invalid_argument("predictions: ragged mode lengths for " + r.scene_id);
      payload.f64(m.prob);
      for (std::size_t t = 0; t < steps; ++t) {
        payload.f64(m.points[t][0]);
        payload.f64(m.points[t][1]);
        payload.f64(m.covs[t].sx);
        payload.f64(m.covs[t].sy);
        payload.f64(m.covs[t].rho);
      }
    }
  }
  return wrap_envelope(kMagic, kPredictionsVersion, payload.buffer());
}

std::vector<PredictionRecord> predictions_deserialize(const std::string& bytes) {
  std::string payload = unwrap_envelope(kMagic, kPredictionsVersion, bytes, "predictions");
  ByteReader r(payload);
  std::uint64_t count = r.u64();
  std::vector<PredictionRecord> records;
  records.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    PredictionRecord rec;
    rec.scene_id = r.str();
    std::uint8_t type = r.u8();
    if (type >= kAgentTypeCount) throw std::runtime_error("predictions: bad agent type");
    rec.agent_type = static_cast<AgentType>(type);
    rec.initial_speed = r.f64();
    std::uint32_t modes = r.u32();
    std::uint32_t steps = r.u32();
    for (std::uint32_t m = 0; m < modes; ++m) {
      ModeTrajectory mt;
      mt.prob = r.f64();
      mt.points.reserve(steps);
      mt.covs.reserve(steps);
      for (std::uint32_t t = 0; t < steps; ++t) {
        Point2 pt{r.f64(), r.f64()};
        Covariance2D cv;
        cv.sx = r.f64();
        cv.sy = r.f64();
        cv.rho = r.f64();
        mt.points.push_back(pt);
        mt.covs.push_back(cv);
      }
      rec.modes.logits.push_back(std::log(mt.prob));
      rec.modes.modes.push_back(std::move(mt));
    }
    records.push_back(std::move(rec));
  }
  if (!r.at_end()) throw std::runtime_error("predictions: trailing bytes");
  return records;
}

void predictions_save(const std::string& path, const std::vector<PredictionRecord>& records) {
  write_file_bytes(path, predictions_serialize(records));
}

std::vector<PredictionRecord> predictions_load(const std::string& path) {
  return predictions_deserialize(read_file_bytes(path));
}

}  // namespace trajcast
