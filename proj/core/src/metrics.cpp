// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace trajcast {
namespace {

bool known_horizon(int steps) {
  return std::find(kHorizonSteps.begin(), kHorizonSteps.end(), steps) != kHorizonSteps.end();
}

void require_horizon(const EvalRecord& r, int horizon_steps) {
  if (!known_horizon(horizon_steps))
    throw std::invalid_argument("unsupported horizon: " + std::to_string(horizon_steps));
  if (static_cast<int>(r.gt.size()) < horizon_steps)
    throw std::invalid_argument("horizon beyond ground-truth length for " + r.scene_id);
  if (!r.gt_valid[static_cast<std::size_t>(horizon_steps - 1)])
    throw std::invalid_argument("ground truth invalid at horizon step for " + r.scene_id);
}

double displacement(const Point2& a, const Point2& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << std::fixed << v;
  return os.str();
}

std::string horizon_label(std::size_t h) {
  return std::to_string(kHorizonSteps[h] / 10) + "s";
}

BucketMetrics mean_of(const std::vector<BucketMetrics>& parts) {
  BucketMetrics m;
  for (const BucketMetrics& b : parts) {
    m.count += b.count;
    m.min_ade += b.min_ade;
    m.min_fde += b.min_fde;
    m.miss_rate += b.miss_rate;
    m.ap += b.ap;
    m.soft_ap += b.soft_ap;
  }
  double n = static_cast<double>(parts.size());
  m.min_ade /= n;
  m.min_fde /= n;
  m.miss_rate /= n;
  m.ap /= n;
  m.soft_ap /= n;
  return m;
}

}  // namespace

std::vector<std::string> eval_record_invariant_violations(const EvalRecord& r) {
  std::vector<std::string> out;
  int t = static_cast<int>(r.gt.size());
  std::vector<std::string> ms = mode_set_invariant_violations(
      r.prediction, static_cast<int>(r.prediction.modes.size()), t);
  for (const std::string& v : ms) out.push_back(r.scene_id + ": " + v);
  if (r.gt.size() != r.gt_valid.size()) out.push_back(r.scene_id + ": gt/valid size mismatch");
  if (!(r.initial_speed >= 0.0) || !std::isfinite(r.initial_speed))
    out.push_back(r.scene_id + ": bad initial speed");
  for (int h : kHorizonSteps) {
    if (t < h) {
      out.push_back(r.scene_id + ": ground truth shorter than horizon " + std::to_string(h));
    } else if (!r.gt_valid[static_cast<std::size_t>(h - 1)]) {
      out.push_back(r.scene_id + ": invalid ground truth at horizon " + std::to_string(h));
    }
  }
  return out;
}

double match_threshold(int horizon_steps, double initial_speed) {
  double base = 0.0;
  switch (horizon_steps) {
    case 30: base = 2.0; break;
    case 50: base = 3.6; break;
    case 80: base = 6.0; break;
    default:
      throw std::invalid_argument("match_threshold: unsupported horizon " +
                                  std::to_string(horizon_steps));
  }
  double f = 0.5 + 0.5 * (initial_speed - 1.4) / (11.0 - 1.4);
  return base * std::clamp(f, 0.5, 1.0);
}

double min_ade(const EvalRecord& r, int horizon_steps) {
  require_horizon(r, horizon_steps);
  double best = std::numeric_limits<double>::infinity();
  for (const ModeTrajectory& m : r.prediction.modes) {
    double sum = 0.0;
    int n = 0;
    for (int t = 0; t < horizon_steps; ++t) {
      if (!r.gt_valid[static_cast<std::size_t>(t)]) continue;
      sum += displacement(m.points[static_cast<std::size_t>(t)], r.gt[static_cast<std::size_t>(t)]);
      ++n;
    }
    best = std::min(best, sum / n);
  }
  return best;
}

double min_fde(const EvalRecord& r, int horizon_steps) {
  require_horizon(r, horizon_steps);
  double best = std::numeric_limits<double>::infinity();
  std::size_t h = static_cast<std::size_t>(horizon_steps - 1);
  for (const ModeTrajectory& m : r.prediction.modes)
    best = std::min(best, displacement(m.points[h], r.gt[h]));
  return best;
}

std::vector<std::uint8_t> mode_matches(const EvalRecord& r, int horizon_steps) {
  require_horizon(r, horizon_steps);
  double thr = match_threshold(horizon_steps, r.initial_speed);
  std::size_t h = static_cast<std::size_t>(horizon_steps - 1);
  std::vector<std::uint8_t> flags;
  flags.reserve(r.prediction.modes.size());
  for (const ModeTrajectory& m : r.prediction.modes)
    flags.push_back(displacement(m.points[h], r.gt[h]) <= thr ? 1 : 0);
  return flags;
}

bool is_miss(const EvalRecord& r, int horizon_steps) {
  std::vector<std::uint8_t> flags = mode_matches(r, horizon_steps);
  return std::none_of(flags.begin(), flags.end(), [](std::uint8_t f) { return f != 0; });
}

double miss_rate(const std::vector<EvalRecord>& records, int horizon_steps) {
  if (records.empty()) throw std::invalid_argument("miss_rate: empty bucket");
  int misses = 0;
  for (const EvalRecord& r : records) misses += is_miss(r, horizon_steps) ? 1 : 0;
  return static_cast<double>(misses) / static_cast<double>(records.size());
}

double average_precision(const std::vector<EvalRecord>& records, int horizon_steps, bool soft) {
  if (records.empty()) throw std::invalid_argument("average_precision: empty bucket");

  struct Entry {
    double prob;
    std::size_t rec;
    std::size_t mode;
    bool match;
    bool tp;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const EvalRecord& r = records[i];
    std::vector<std::uint8_t> flags = mode_matches(r, horizon_steps);
    // The record's true positive is its highest-probability matching mode;
    // ties keep the lowest index.
    std::size_t tp_mode = flags.size();
    for (std::size_t m = 0; m < flags.size(); ++m) {
      if (!flags[m]) continue;
      if (tp_mode == flags.size() || r.prediction.modes[m].prob > r.prediction.modes[tp_mode].prob)
        tp_mode = m;
    }
    for (std::size_t m = 0; m < flags.size(); ++m)
      entries.push_back(
          {r.prediction.modes[m].prob, i, m, flags[m] != 0, flags[m] != 0 && m == tp_mode});
  }

  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    if (a.rec != b.rec) return a.rec < b.rec;
    return a.mode < b.mode;
  });

  // Sweep in order, recording precision after every counted entry.
  std::vector<double> precision;
  std::vector<bool> counted_tp;
  int tp = 0, fp = 0;
  for (const Entry& e : entries) {
    if (e.tp)
      ++tp;
    else if (e.match && soft)
      continue;  // extra match: ignored, not a false positive
    else
      ++fp;
    precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
    counted_tp.push_back(e.tp);
  }

  // Monotone interpolation from the right, then one recall step per TP.
  for (std::size_t i = precision.size(); i-- > 1;)
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double ap = 0.0;
  for (std::size_t i = 0; i < precision.size(); ++i)
    if (counted_tp[i]) ap += precision[i];
  return ap / static_cast<double>(records.size());
}

MetricsReport compute_report(const std::vector<EvalRecord>& records) {
  for (const EvalRecord& r : records) {
    std::vector<std::string> bad = eval_record_invariant_violations(r);
    if (!bad.empty()) throw std::invalid_argument("bad eval record: " + bad.front());
  }

  MetricsReport rep;
  for (int ty = 0; ty < kAgentTypeCount; ++ty) {
    std::vector<EvalRecord> subset;
    for (const EvalRecord& r : records)
      if (static_cast<int>(r.agent_type) == ty) subset.push_back(r);
    if (subset.empty()) continue;
    for (std::size_t h = 0; h < kHorizonSteps.size(); ++h) {
      BucketMetrics b;
      b.count = static_cast<int>(subset.size());
      for (const EvalRecord& r : subset) {
        b.min_ade += min_ade(r, kHorizonSteps[h]);
        b.min_fde += min_fde(r, kHorizonSteps[h]);
      }
      b.min_ade /= b.count;
      b.min_fde /= b.count;
      b.miss_rate = miss_rate(subset, kHorizonSteps[h]);
      b.ap = average_precision(subset, kHorizonSteps[h], false);
      b.soft_ap = average_precision(subset, kHorizonSteps[h], true);
      rep.bucket[ty][h] = b;
    }
  }

  for (int ty = 0; ty < kAgentTypeCount; ++ty) {
    std::vector<BucketMetrics> parts;
    for (std::size_t h = 0; h < kHorizonSteps.size(); ++h)
      if (rep.bucket[ty][h]) parts.push_back(*rep.bucket[ty][h]);
    if (!parts.empty()) rep.avg_type[ty] = mean_of(parts);
  }
  for (std::size_t h = 0; h < kHorizonSteps.size(); ++h) {
    std::vector<BucketMetrics> parts;
    for (int ty = 0; ty < kAgentTypeCount; ++ty)
      if (rep.bucket[ty][h]) parts.push_back(*rep.bucket[ty][h]);
    if (!parts.empty()) rep.avg_horizon[h] = mean_of(parts);
  }
  std::vector<BucketMetrics> all;
  for (int ty = 0; ty < kAgentTypeCount; ++ty)
    for (std::size_t h = 0; h < kHorizonSteps.size(); ++h)
      if (rep.bucket[ty][h]) all.push_back(*rep.bucket[ty][h]);
  if (!all.empty()) rep.total = mean_of(all);
  return rep;
}

std::string MetricsReport::table() const {
  std::ostringstream os;
  auto row = [&os](const std::string& label, const std::optional<BucketMetrics>& b) {
    os << label;
    for (std::size_t i = label.size(); i < 16; ++i) os << ' ';
    if (!b) {
      for (int c = 0; c < 6; ++c) os << "        -";
    } else {
      auto cell = [&os](const std::string& s) {
        for (std::size_t i = s.size(); i < 9; ++i) os << ' ';
        os << s;
      };
      cell(std::to_string(b->count));
      cell(fmt(b->min_ade));
      cell(fmt(b->min_fde));
      cell(fmt(b->miss_rate));
      cell(fmt(b->ap));
      cell(fmt(b->soft_ap));
    }
    os << '\n';
  };

  os << "bucket          "
     << "    count"
     << "   minADE"
     << "   minFDE"
     << " missRate"
     << "      mAP"
     << "  SoftmAP" << '\n';
  for (int ty = 0; ty < kAgentTypeCount; ++ty)
    for (std::size_t h = 0; h < kHorizonSteps.size(); ++h)
      row(std::string(to_string(static_cast<AgentType>(ty))) + " " + horizon_label(h),
          bucket[ty][h]);
  for (int ty = 0; ty < kAgentTypeCount; ++ty)
    row("Avg " + std::string(to_string(static_cast<AgentType>(ty))), avg_type[ty]);
  for (std::size_t h = 0; h < kHorizonSteps.size(); ++h) row("Avg " + horizon_label(h), avg_horizon[h]);
  row("Total", total);
  return os.str();
}

std::string MetricsReport::key_values() const {
  std::ostringstream os;
  os.precision(12);
  auto emit = [&os](const std::string& key, const std::optional<BucketMetrics>& b) {
    if (!b) return;
    os << key << ".count " << b->count << '\n';
    os << key << ".min_ade " << b->min_ade << '\n';
    os << key << ".min_fde " << b->min_fde << '\n';
    os << key << ".miss_rate " << b->miss_rate << '\n';
    os << key << ".map " << b->ap << '\n';
    os << key << ".soft_map " << b->soft_ap << '\n';
  };
  for (int ty = 0; ty < kAgentTypeCount; ++ty)
    for (std::size_t h = 0; h < kHorizonSteps.size(); ++h)
      emit(std::string("bucket.") + to_string(static_cast<AgentType>(ty)) + "." + horizon_label(h),
           bucket[ty][h]);
  for (int ty = 0; ty < kAgentTypeCount; ++ty)
    emit(std::string("avg.") + to_string(static_cast<AgentType>(ty)), avg_type[ty]);
  for (std::size_t h = 0; h < kHorizonSteps.size(); ++h)
    emit("avg." + horizon_label(h), avg_horizon[h]);
  emit("total", total);
  return os.str();
}

}  // namespace trajcast
