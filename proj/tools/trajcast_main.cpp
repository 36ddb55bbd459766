// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Command line entry point. Subcommands: generate, train, eval, predict,
// plot, config-reference. Every command is deterministic given its seeds and
// exits non-zero with a diagnostic on stderr when anything is off.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trajcast/binio.hpp"
#include "trajcast/canonical.hpp"
#include "trajcast/checkpoint.hpp"
#include "trajcast/config.hpp"
#include "trajcast/metrics.hpp"
#include "trajcast/model.hpp"
#include "trajcast/plot.hpp"
#include "trajcast/prediction_io.hpp"
#include "trajcast/scene_cache.hpp"
#include "trajcast/synthetic.hpp"
#include "trajcast/train.hpp"

namespace {

using namespace trajcast;

Config load_config(const std::string& path) {
  if (path.empty()) {
    Config cfg = Config::defaults();
    cfg.apply_env();
    return cfg;
  }
  return Config::load(path);
}

/// Inverse of the anchor pose; maps world-frame data into the canonical frame.
Pose2 inverse_pose(const Pose2& a) {
  double c = std::cos(a.heading), s = std::sin(a.heading);
  return Pose2{-(c * a.x + s * a.y), s * a.x - c * a.y, -a.heading};
}

int run_generate(const std::string& config_path, int count, std::uint64_t seed,
                 std::string out_path) {
  Config cfg = load_config(config_path);
  if (out_path.empty()) out_path = cfg.get("data.cache");

  GeneratorParams params;
  params.history_steps = cfg.get_int("model.history_steps");
  params.future_steps = cfg.get_int("model.steps");

  std::vector<Scene> scenes;
  scenes.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    scenes.push_back(to_canonical_frame(generate_synthetic_scene(seed + static_cast<std::uint64_t>(i), params)));

  cache_write(scenes, out_path);
  std::cout << "wrote " << scenes.size() << " scenes to " << out_path << "\n";
  return 0;
}

int run_train(const std::string& config_path, std::string data_path, std::string out_path) {
  Config cfg = load_config(config_path);
  if (data_path.empty()) data_path = cfg.get("data.cache");
  if (out_path.empty()) out_path = cfg.get("train.checkpoint_out");

  std::vector<Scene> scenes = cache_read(data_path);
  Model model(cfg);
  TrainResult result = train_loop(model, scenes, train_config_from(cfg), &std::cout);

  checkpoint_save(out_path, result.best);
  std::cout << "best validation nll " << result.best_val_nll << ", final lr " << result.final_lr
            << "\n";
  std::cout << "wrote checkpoint to " << out_path << "\n";
  return 0;
}

std::vector<std::unique_ptr<Model>> load_models(const std::vector<std::string>& checkpoint_paths) {
  std::vector<std::unique_ptr<Model>> models;
  models.reserve(checkpoint_paths.size());
  for (const std::string& p : checkpoint_paths)
    models.push_back(std::make_unique<Model>(checkpoint_load(p)));
  return models;
}

/// Records routed per agent type when several checkpoints are given.
std::vector<EvalRecord> routed_records(const std::vector<std::unique_ptr<Model>>& models,
                                       const std::vector<Scene>& scenes,
                                       const NmsOptions& nms_opts, std::ostream& log) {
  if (models.size() == 1) return build_eval_records(*models[0], scenes, nms_opts);

  std::vector<const Model*> views;
  for (const auto& m : models) views.push_back(m.get());
  TypeSelection sel = select_per_type(views, scenes, nms_opts);
  for (const std::string& w : sel.warnings) std::cerr << "warning: " << w << "\n";
  for (int t = 0; t < kAgentTypeCount; ++t)
    log << "selected checkpoint " << sel.model_index[t] << " for "
        << to_string(static_cast<AgentType>(t)) << "\n";

  std::vector<EvalRecord> records;
  records.reserve(scenes.size());
  for (const Scene& s : scenes) {
    int idx = sel.model_index[static_cast<int>(s.target.agent_type)];
    records.push_back(eval_record_for(*models[static_cast<std::size_t>(idx)], s, nms_opts));
  }
  return records;
}

/// Records rebuilt from a prediction file, ground truth joined in by scene id.
std::vector<EvalRecord> records_from_predictions(const std::string& predictions_path,
                                                 const std::vector<Scene>& scenes) {
  std::map<std::string, const Scene*> by_id;
  for (const Scene& s : scenes) by_id[s.scene_id] = &s;

  std::vector<EvalRecord> records;
  for (const PredictionRecord& pr : predictions_load(predictions_path)) {
    auto it = by_id.find(pr.scene_id);
    if (it == by_id.end())
      throw std::invalid_argument("prediction for unknown scene: " + pr.scene_id);
    const Scene& s = *it->second;
    EvalRecord rec;
    rec.scene_id = pr.scene_id;
    rec.agent_type = pr.agent_type;
    rec.prediction = pr.modes;
    rec.initial_speed = pr.initial_speed;
    for (const AgentState& f : s.target.future) {
      rec.gt.push_back(from_canonical(Point2{f.x, f.y}, s.anchor_pose));
      rec.gt_valid.push_back(f.valid ? 1 : 0);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

int run_eval(const std::string& config_path, std::string data_path,
             const std::vector<std::string>& checkpoint_paths, const std::string& predictions_path,
             bool no_nms, const std::string& report_path) {
  Config cfg = load_config(config_path);
  if (data_path.empty()) data_path = cfg.get("data.cache");
  if (checkpoint_paths.empty() == predictions_path.empty()) {
    std::cerr << "eval: pass --checkpoint (repeatable) or --predictions, not both\n";
    return 2;
  }

  NmsOptions nms_opts = nms_options_from(cfg);
  if (no_nms) nms_opts.enabled = false;

  std::vector<Scene> scenes = cache_read(data_path);
  std::vector<EvalRecord> records;
  if (!predictions_path.empty()) {
    records = records_from_predictions(predictions_path, scenes);
  } else {
    std::vector<std::unique_ptr<Model>> models = load_models(checkpoint_paths);
    records = routed_records(models, scenes, nms_opts, std::cout);
  }

  MetricsReport report = compute_report(records);
  std::cout << report.table();
  if (!report_path.empty()) {
    write_file_bytes(report_path, report.key_values());
    std::cout << "wrote key-value report to " << report_path << "\n";
  }
  return 0;
}

int run_predict(const std::string& config_path, std::string data_path,
                const std::vector<std::string>& checkpoint_paths, const std::string& out_path,
                bool no_nms) {
  Config cfg = load_config(config_path);
  if (data_path.empty()) data_path = cfg.get("data.cache");

  NmsOptions nms_opts = nms_options_from(cfg);
  if (no_nms) nms_opts.enabled = false;

  std::vector<Scene> scenes = cache_read(data_path);
  std::vector<std::unique_ptr<Model>> models = load_models(checkpoint_paths);

  std::array<int, kAgentTypeCount> route = {0, 0, 0};
  if (models.size() > 1) {
    std::vector<Scene> with_gt;
    for (const Scene& s : scenes)
      if (!s.target.future.empty()) with_gt.push_back(s);
    if (with_gt.empty()) {
      std::cerr << "predict: several checkpoints need ground-truth futures to select from\n";
      return 2;
    }
    std::vector<const Model*> views;
    for (const auto& m : models) views.push_back(m.get());
    TypeSelection sel = select_per_type(views, with_gt, nms_opts);
    for (const std::string& w : sel.warnings) std::cerr << "warning: " << w << "\n";
    route = sel.model_index;
  }

  std::vector<PredictionRecord> records;
  records.reserve(scenes.size());
  for (const Scene& s : scenes) {
    const Model& m = *models[static_cast<std::size_t>(route[static_cast<int>(s.target.agent_type)])];
    PredictionRecord rec;
    rec.scene_id = s.scene_id;
    rec.agent_type = s.target.agent_type;
    rec.initial_speed = s.target.current_state().speed();
    rec.modes = apply_nms(m.predict_world(s), rec.agent_type, nms_opts);
    records.push_back(std::move(rec));
  }

  predictions_save(out_path, records);
  std::cout << "wrote " << records.size() << " predictions to " << out_path << "\n";
  return 0;
}

int run_plot(const std::string& config_path, std::string data_path,
             const std::string& predictions_path, const std::string& out_dir,
             const std::vector<std::string>& scene_ids) {
  Config cfg = load_config(config_path);
  if (data_path.empty()) data_path = cfg.get("data.cache");

  std::vector<Scene> scenes = cache_read(data_path);
  std::map<std::string, ModeSet> modes_by_id;
  if (!predictions_path.empty())
    for (const PredictionRecord& pr : predictions_load(predictions_path))
      modes_by_id[pr.scene_id] = pr.modes;

  std::filesystem::create_directories(out_dir);
  int written = 0;
  for (const Scene& s : scenes) {
    if (!scene_ids.empty() &&
        std::find(scene_ids.begin(), scene_ids.end(), s.scene_id) == scene_ids.end())
      continue;
    const ModeSet* modes = nullptr;
    ModeSet canonical_modes;
    auto it = modes_by_id.find(s.scene_id);
    if (it != modes_by_id.end()) {
      // Stored predictions are world frame; the cached scene is canonical.
      canonical_modes = mode_set_to_world(it->second, inverse_pose(s.anchor_pose));
      modes = &canonical_modes;
    }
    std::string path = (std::filesystem::path(out_dir) / (s.scene_id + ".svg")).string();
    write_file_bytes(path, scene_svg(s, modes));
    ++written;
  }
  if (written == 0) {
    std::cerr << "plot: no scenes matched\n";
    return 2;
  }
  std::cout << "wrote " << written << " figures to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trajectory prediction pipeline"};
  app.require_subcommand(1);

  std::string config_path, data_path, out_path, predictions_path, report_path;
  std::vector<std::string> checkpoint_paths, scene_ids;
  int count = 8;
  std::uint64_t seed = 1;
  bool no_nms = false;

  CLI::App* gen = app.add_subcommand("generate", "generate synthetic scenes into a cache");
  gen->add_option("--config", config_path, "config file");
  gen->add_option("--count", count, "number of scenes")->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out_path, "cache path (default: data.cache)");

  CLI::App* train = app.add_subcommand("train", "train a model on a scene cache");
  train->add_option("--config", config_path, "config file");
  train->add_option("--data", data_path, "scene cache (default: data.cache)");
  train->add_option("--out", out_path, "checkpoint path (default: train.checkpoint_out)");

  CLI::App* eval = app.add_subcommand("eval", "evaluate checkpoints or a prediction file");
  eval->add_option("--config", config_path, "config file");
  eval->add_option("--data", data_path, "scene cache (default: data.cache)");
  eval->add_option("--checkpoint", checkpoint_paths, "checkpoint path, repeatable");
  eval->add_option("--predictions", predictions_path, "prediction file instead of checkpoints");
  eval->add_option("--report", report_path, "also write machine-readable key-value report");
  eval->add_flag("--no-nms", no_nms, "disable non-maximum suppression");

  CLI::App* predict = app.add_subcommand("predict", "write predictions for a scene cache");
  predict->add_option("--config", config_path, "config file");
  predict->add_option("--data", data_path, "scene cache (default: data.cache)");
  predict->add_option("--checkpoint", checkpoint_paths, "checkpoint path, repeatable")
      ->required();
  predict->add_option("--out", out_path, "prediction file path")->required();
  predict->add_flag("--no-nms", no_nms, "disable non-maximum suppression");

  CLI::App* plot = app.add_subcommand("plot", "emit per-scene SVG figures");
  plot->add_option("--config", config_path, "config file");
  plot->add_option("--data", data_path, "scene cache (default: data.cache)");
  plot->add_option("--predictions", predictions_path, "overlay predicted modes");
  plot->add_option("--out", out_path, "output directory")->required();
  plot->add_option("--scene", scene_ids, "only these scene ids, repeatable");

  CLI::App* ref = app.add_subcommand("config-reference", "print the configuration reference");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_generate(config_path, count, seed, out_path);
    if (train->parsed()) return run_train(config_path, data_path, out_path);
    if (eval->parsed())
      return run_eval(config_path, data_path, checkpoint_paths, predictions_path, no_nms,
                      report_path);
    if (predict->parsed())
      return run_predict(config_path, data_path, checkpoint_paths, out_path, no_nms);
    if (plot->parsed())
      return run_plot(config_path, data_path, predictions_path, out_path, scene_ids);
    if (ref->parsed()) {
      std::cout << Config::reference_page();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
