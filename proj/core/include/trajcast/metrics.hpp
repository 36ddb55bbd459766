// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Evaluation suite: minADE, minFDE, miss rate and detection-style average
// precision over predicted modes, bucketed by agent type and horizon
// (3 s / 5 s / 8 s at 10 Hz) with the averaged rows of the standard report.
//
// A mode matches when its displacement from ground truth at the horizon step
// is within a threshold that depends on horizon and initial speed. AP pools
// all modes across a bucket's records sorted by descending probability; each
// record contributes at most one true positive (its highest-probability
// matching mode). Other matching modes are false positives in the hard
// variant and ignored in the soft variant, so Soft AP >= AP always.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajcast/canonical.hpp"
#include "trajcast/predictor.hpp"
#include "trajcast/types.hpp"

namespace trajcast {

inline constexpr std::array<int, 3> kHorizonSteps = {30, 50, 80};

/// One evaluated prediction instance, world frame.
struct EvalRecord {
  std::string scene_id;
  AgentType agent_type = AgentType::kVehicle;
  ModeSet prediction;
  std::vector<Point2> gt;
  std::vector<std::uint8_t> gt_valid;
  /// Target speed at the prediction timestamp; drives the match threshold.
  double initial_speed = 0.0;
};

/// Empty when the record satisfies all invariants (mode-set invariants, size
/// agreement, validity at every evaluated horizon step).
std::vector<std::string> eval_record_invariant_violations(const EvalRecord& r);

/// Match radius in meters: base 2.0 / 3.6 / 6.0 at 30 / 50 / 80 steps, scaled
/// by a factor ramping linearly from 0.5 to 1.0 for initial speeds between
/// 1.4 and 11 m/s. Other horizons are rejected.
double match_threshold(int horizon_steps, double initial_speed);

/// Min over modes of the mean displacement across valid steps up to the
/// horizon (exclusive of invalid steps).
double min_ade(const EvalRecord& r, int horizon_steps);

/// Min over modes of the displacement at the horizon step.
double min_fde(const EvalRecord& r, int horizon_steps);

/// Per-mode match flags at the horizon.
std::vector<std::uint8_t> mode_matches(const EvalRecord& r, int horizon_steps);

/// True when no mode matches at the horizon.
bool is_miss(const EvalRecord& r, int horizon_steps);

double miss_rate(const std::vector<EvalRecord>& records, int horizon_steps);

/// Detection-style AP over one bucket; `soft` ignores extra matching modes
/// instead of counting them as false positives. Empty buckets are rejected.
double average_precision(const std::vector<EvalRecord>& records, int horizon_steps, bool soft);

struct BucketMetrics {
  int count = 0;
  double min_ade = 0.0;
  double min_fde = 0.0;
  double miss_rate = 0.0;
  double ap = 0.0;
  double soft_ap = 0.0;
};

/// Full report: one bucket per (agent type, horizon) with records, plus
/// per-type averages, per-horizon averages and the total row (unweighted
/// means over present buckets). Absent buckets stay absent.
struct MetricsReport {
  std::optional<BucketMetrics> bucket[kAgentTypeCount][kHorizonSteps.size()];
  std::optional<BucketMetrics> avg_type[kAgentTypeCount];
  std::optional<BucketMetrics> avg_horizon[kHorizonSteps.size()];
  std::optional<BucketMetrics> total;

  /// Aligned text table; absent cells print "-".
  std::string table() const;
  /// Machine-readable "key value" lines, present buckets only.
  std::string key_values() const;
};

MetricsReport compute_report(const std::vector<EvalRecord>& records);

}  // namespace trajcast
