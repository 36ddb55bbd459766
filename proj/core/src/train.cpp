// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "trajcast/augment.hpp"
#include "trajcast/canonical.hpp"
#include "trajcast/rng.hpp"

namespace trajcast {

Adam::Adam(double beta1, double beta2, double eps) : b1_(beta1), b2_(beta2), eps_(eps) {
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(eps > 0.0))
    throw std::invalid_argument("adam: betas must lie in [0,1), eps positive");
}

void Adam::step(nn::ParamStore& params, const nn::GradBuffer& grads, double lr,
                const std::function<bool(const std::string&)>& update_param) {
  for (const auto& [name, g] : grads.grads) {
    if (update_param && !update_param(name)) continue;
    nn::Mat& p = params.at(name);
    if (g.rows() != p.rows() || g.cols() != p.cols())
      throw std::invalid_argument("adam: gradient shape mismatch for " + name);
    auto mi = m_.find(name);
    if (mi == m_.end()) {
      mi = m_.emplace(name, nn::Mat::Zero(p.rows(), p.cols())).first;
      v_.emplace(name, nn::Mat::Zero(p.rows(), p.cols()));
      t_.emplace(name, 0);
    }
    nn::Mat& m = mi->second;
    nn::Mat& v = v_.at(name);
    long& t = t_.at(name);
    ++t;
    m = b1_ * m + (1.0 - b1_) * g;
    v = b2_ * v + (1.0 - b2_) * g.cwiseProduct(g);
    double mc = 1.0 - std::pow(b1_, static_cast<double>(t));
    double vc = 1.0 - std::pow(b2_, static_cast<double>(t));
    p.array() -= lr * (m.array() / mc) / ((v.array() / vc).sqrt() + eps_);
  }
}

PlateauScheduler::PlateauScheduler(double lr0, double factor, int patience, double min_delta)
    : lr_(lr0),
      factor_(factor),
      min_delta_(min_delta),
      best_(std::numeric_limits<double>::infinity()),
      patience_(patience) {
  if (!(lr0 > 0.0) || !(factor > 0.0 && factor < 1.0) || patience < 1 || !(min_delta >= 0.0))
    throw std::invalid_argument("plateau scheduler: bad configuration");
}

bool PlateauScheduler::observe(double metric) {
  if (metric < best_ - min_delta_) {
    best_ = metric;
    bad_ = 0;
    return false;
  }
  if (++bad_ < patience_) return false;
  lr_ *= factor_;
  bad_ = 0;
  return true;
}

TrainConfig train_config_from(const Config& cfg) {
  TrainConfig t;
  t.steps = cfg.get_int("train.steps");
  t.batch = cfg.get_int("train.batch");
  t.lr = cfg.get_double("train.lr");
  t.beta1 = cfg.get_double("train.beta1");
  t.beta2 = cfg.get_double("train.beta2");
  t.adam_eps = cfg.get_double("train.adam_eps");
  t.clip_norm = cfg.get_double("train.clip_norm");
  t.p_mask = cfg.get_double("train.p_mask");
  t.p_update = cfg.get_double("train.p_update");
  t.plateau_patience = cfg.get_int("train.plateau_patience");
  t.plateau_factor = cfg.get_double("train.plateau_factor");
  t.plateau_min_delta = cfg.get_double("train.plateau_min_delta");
  t.eval_every = cfg.get_int("train.eval_every");
  t.seed = cfg.get_u64("train.seed");
  t.val_fraction = cfg.get_double("train.val_fraction");
  t.threads = cfg.get_int("train.threads");
  if (t.steps < 1 || t.batch < 1 || t.eval_every < 1 || t.threads < 1)
    throw std::invalid_argument("train config: counts must be positive");
  return t;
}

NmsOptions nms_options_from(const Config& cfg) {
  NmsOptions o;
  o.enabled = cfg.get_bool("nms.enabled");
  o.p_min = cfg.get_double("nms.p_min");
  const std::string& d = cfg.get("nms.distance");
  if (d == "max")
    o.distance = NmsDistance::kMaxOverTime;
  else if (d == "endpoint")
    o.distance = NmsDistance::kEndpoint;
  else
    throw std::invalid_argument("nms.distance must be max or endpoint, got: " + d);
  o.thresholds.vehicle = cfg.get_double("nms.threshold.vehicle");
  o.thresholds.pedestrian = cfg.get_double("nms.threshold.pedestrian");
  o.thresholds.cyclist = cfg.get_double("nms.threshold.cyclist");
  return o;
}

SceneSplit split_scenes(const std::vector<Scene>& scenes, double val_fraction) {
  if (!(val_fraction >= 0.0 && val_fraction < 1.0))
    throw std::invalid_argument("val_fraction must lie in [0, 1)");
  SceneSplit split;
  auto cut = static_cast<std::uint64_t>(val_fraction * 10000.0);
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    if (fnv1a64(scenes[i].scene_id) % 10000 < cut)
      split.val.push_back(i);
    else
      split.train.push_back(i);
  }
  return split;
}

std::uint64_t masking_seed(std::uint64_t train_seed, const std::string& scene_id,
                           std::uint64_t step) {
  return mix_seed(train_seed, fnv1a64(scene_id), step);
}

namespace {

struct SceneResult {
  double nll = 0.0;
  nn::GradBuffer grads;
};

SceneResult scene_loss_and_grads(const Model& model, const Scene& scene) {
  nn::Tape t;
  nn::ParamUse p(t, model.params());
  nn::Value loss = model.loss(t, p, scene);
  SceneResult r;
  r.nll = t.val(loss)(0, 0);
  t.backward(loss);
  p.collect(r.grads);
  return r;
}

double mean_nll(const Model& model, const std::vector<Scene>& scenes,
                const std::vector<std::size_t>& idx) {
  double sum = 0.0;
  for (std::size_t i : idx) sum += model.nll(scenes[i]);
  return sum / static_cast<double>(idx.size());
}

}  // namespace

TrainResult train_loop(Model& model, const std::vector<Scene>& scenes, const TrainConfig& cfg,
                       std::ostream* log) {
  if (scenes.empty()) throw std::invalid_argument("train_loop: no scenes");
  for (const Scene& s : scenes)
    if (s.frame != Frame::kCanonical)
      throw std::invalid_argument("train_loop: scene not canonical: " + s.scene_id);

  SceneSplit split = split_scenes(scenes, cfg.val_fraction);
  if (split.train.empty()) throw std::invalid_argument("train_loop: empty training split");
  if (split.val.empty()) {
    if (log) *log << "validation split is empty; validating on the training set\n";
    split.val = split.train;
  }

  Rng batch_rng(mix_seed(cfg.seed, fnv1a64("batch")));
  Rng update_rng(mix_seed(cfg.seed, fnv1a64("update_mask")));
  Adam adam(cfg.beta1, cfg.beta2, cfg.adam_eps);
  PlateauScheduler sched(cfg.lr, cfg.plateau_factor, cfg.plateau_patience, cfg.plateau_min_delta);

  TrainResult result;
  result.best_val_nll = std::numeric_limits<double>::infinity();

  const int k_decoders = model.decoders();
  for (int step = 0; step < cfg.steps; ++step) {
    std::vector<std::size_t> batch(static_cast<std::size_t>(cfg.batch));
    for (std::size_t b = 0; b < batch.size(); ++b)
      batch[b] = split.train[batch_rng.uniform_index(split.train.size())];

    std::vector<Scene> masked;
    masked.reserve(batch.size());
    for (std::size_t i : batch) {
      const Scene& s = scenes[i];
      masked.push_back(
          mask_history(s, cfg.p_mask,
                       masking_seed(cfg.seed, s.scene_id, static_cast<std::uint64_t>(step))));
    }

    // Per-scene results land in fixed slots; the reduction below runs in
    // batch order, so thread count cannot change any bit of the result.
    std::vector<SceneResult> results(batch.size());
    if (cfg.threads <= 1) {
      for (std::size_t b = 0; b < batch.size(); ++b)
        results[b] = scene_loss_and_grads(model, masked[b]);
    } else {
      std::vector<std::thread> workers;
      std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads),
                                                    batch.size());
      for (std::size_t w = 0; w < n_workers; ++w) {
        workers.emplace_back([&, w]() {
          for (std::size_t b = w; b < batch.size(); b += n_workers)
            results[b] = scene_loss_and_grads(model, masked[b]);
        });
      }
      for (std::thread& th : workers) th.join();
    }

    double batch_nll = 0.0;
    nn::GradBuffer grads;
    for (std::size_t b = 0; b < batch.size(); ++b) {
      batch_nll += results[b].nll;
      grads.add(results[b].grads);
    }
    batch_nll /= static_cast<double>(batch.size());
    result.train_curve.push_back(batch_nll);

    if (!std::isfinite(batch_nll)) {
      std::ostringstream msg;
      msg << "non-finite loss at step " << step << "; batch scenes:";
      for (std::size_t i : batch) msg << ' ' << scenes[i].scene_id;
      if (log) *log << msg.str() << '\n';
      throw std::runtime_error(msg.str());
    }

    grads.scale(1.0 / static_cast<double>(batch.size()));
    double gnorm = grads.global_norm();
    if (gnorm > cfg.clip_norm) grads.scale(cfg.clip_norm / gnorm);

    std::function<bool(const std::string&)> filter;
    if (model.multi()) {
      std::vector<std::uint8_t> update = sample_update_mask(update_rng, k_decoders, cfg.p_update);
      filter = [update](const std::string& name) {
        for (std::size_t k = 0; k < update.size(); ++k) {
          if (update[k]) continue;
          const std::string prefix = MultiHead::decoder_prefix(static_cast<int>(k)) + ".";
          if (name.rfind(prefix, 0) == 0) return false;
        }
        return true;
      };
    }
    adam.step(model.params(), grads, sched.lr(), filter);

    bool last = step + 1 == cfg.steps;
    if ((step + 1) % cfg.eval_every == 0 || last) {
      double val_nll = mean_nll(model, scenes, split.val);
      result.val_curve.push_back(val_nll);
      bool improved = val_nll < result.best_val_nll;
      if (improved) {
        result.best_val_nll = val_nll;
        result.best = model.to_checkpoint();
      }
      bool decayed = sched.observe(val_nll);
      if (log) {
        *log << "step " << step + 1 << "/" << cfg.steps << " train_nll " << batch_nll
             << " val_nll " << val_nll << (improved ? " *" : "") << " lr " << sched.lr()
             << (decayed ? " (decayed)" : "") << '\n';
      }
    } else if (log && (step + 1) % 25 == 0) {
      *log << "step " << step + 1 << "/" << cfg.steps << " train_nll " << batch_nll << '\n';
    }
  }
  result.final_lr = sched.lr();
  return result;
}

EvalRecord eval_record_for(const Model& model, const Scene& scene, const NmsOptions& nms_opts) {
  if (scene.frame != Frame::kCanonical)
    throw std::invalid_argument("eval_record_for: scene not canonical: " + scene.scene_id);
  EvalRecord rec;
  rec.scene_id = scene.scene_id;
  rec.agent_type = scene.target.agent_type;
  rec.prediction = apply_nms(model.predict_world(scene), rec.agent_type, nms_opts);
  rec.initial_speed = scene.target.current_state().speed();
  rec.gt.reserve(scene.target.future.size());
  rec.gt_valid.reserve(scene.target.future.size());
  for (const AgentState& s : scene.target.future) {
    rec.gt.push_back(from_canonical(Point2{s.x, s.y}, scene.anchor_pose));
    rec.gt_valid.push_back(s.valid ? 1 : 0);
  }
  return rec;
}

std::vector<EvalRecord> build_eval_records(const Model& model, const std::vector<Scene>& scenes,
                                           const NmsOptions& nms_opts) {
  std::vector<EvalRecord> records;
  records.reserve(scenes.size());
  for (const Scene& s : scenes) records.push_back(eval_record_for(model, s, nms_opts));
  return records;
}

TypeSelection select_per_type_from_scores(const TypeScoreTable& scores,
                                          const std::vector<double>& overall) {
  if (scores.empty() || scores.size() != overall.size())
    throw std::invalid_argument("select_per_type: empty or mismatched score table");

  std::size_t best_overall = 0;
  for (std::size_t i = 1; i < overall.size(); ++i)
    if (overall[i] > overall[best_overall]) best_overall = i;

  TypeSelection sel;
  for (int ty = 0; ty < kAgentTypeCount; ++ty) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      double s = scores[i][static_cast<std::size_t>(ty)];
      if (std::isnan(s)) continue;
      if (!best || s > scores[*best][static_cast<std::size_t>(ty)]) best = i;
    }
    if (best) {
      sel.model_index[static_cast<std::size_t>(ty)] = static_cast<int>(*best);
    } else {
      sel.model_index[static_cast<std::size_t>(ty)] = static_cast<int>(best_overall);
      sel.warnings.push_back(std::string("no validation records for ") +
                             to_string(static_cast<AgentType>(ty)) +
                             "; falling back to the overall-best checkpoint");
    }
  }
  return sel;
}

TypeSelection select_per_type(const std::vector<const Model*>& models,
                              const std::vector<Scene>& validation, const NmsOptions& nms_opts) {
  if (models.empty()) throw std::invalid_argument("select_per_type: no models");
  TypeScoreTable scores;
  std::vector<double> overall;
  for (const Model* m : models) {
    std::vector<EvalRecord> records = build_eval_records(*m, validation, nms_opts);
    MetricsReport rep = compute_report(records);
    std::array<double, kAgentTypeCount> row{};
    for (int ty = 0; ty < kAgentTypeCount; ++ty)
      row[static_cast<std::size_t>(ty)] =
          rep.avg_type[ty] ? rep.avg_type[ty]->soft_ap : std::numeric_limits<double>::quiet_NaN();
    scores.push_back(row);
    overall.push_back(rep.total ? rep.total->soft_ap : 0.0);
  }
  return select_per_type_from_scores(scores, overall);
}

}  // namespace trajcast
