// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/config.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "trajcast/binio.hpp"

namespace trajcast {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

const std::vector<ConfigEntry>& Config::registry() {
  static const std::vector<ConfigEntry> entries = {
      {"model.head", "single", "decoder head: single | multi"},
      {"model.dim", "128", "embedding width D"},
      {"model.hidden", "128", "hidden layer width of all perceptrons"},
      {"model.cg_blocks", "3", "context-gating blocks per encoder stack"},
      {"model.fusion_cg_blocks", "2", "context-gating blocks in the multi-head fusion stack"},
      {"model.modes", "6", "predicted modes per agent"},
      {"model.steps", "80", "future steps per mode (10 Hz)"},
      {"model.history_steps", "11", "history steps per track, current step included"},
      {"model.decoders", "5", "decoder bank size of the multi head"},
      {"model.seed", "1", "parameter initialization seed"},
      {"data.cache", "scenes.tcsc", "scene cache path consumed by train/eval/predict"},
      {"train.steps", "2000", "optimizer steps"},
      {"train.batch", "16", "scenes per step"},
      {"train.lr", "1e-4", "initial learning rate"},
      {"train.beta1", "0.9", "first-moment decay"},
      {"train.beta2", "0.999", "second-moment decay"},
      {"train.adam_eps", "1e-8", "optimizer epsilon"},
      {"train.clip_norm", "10", "global gradient-norm clip"},
      {"train.p_mask", "0.15", "per (agent, history step) masking probability"},
      {"train.p_update", "0.5", "per-decoder update probability (multi head)"},
      {"train.plateau_patience", "5", "validation evals without improvement before LR decay"},
      {"train.plateau_factor", "0.5", "LR multiplier on plateau"},
      {"train.plateau_min_delta", "1e-3", "improvement below this does not reset the plateau"},
      {"train.eval_every", "100", "steps between validation evaluations"},
      {"train.seed", "1", "training stream seed (batches, masking, update blocking)"},
      {"train.val_fraction", "0.1", "validation share selected by scene-id hash"},
      {"train.threads", "1", "batch evaluation threads; gradients reduce in scene order"},
      {"train.checkpoint_out", "model.tckp", "best-validation checkpoint path"},
      {"nms.enabled", "true", "apply non-maximum suppression in eval/predict"},
      {"nms.p_min", "0.01", "constant probability assigned to suppressed modes"},
      {"nms.distance", "max", "trajectory distance: max (over time) | endpoint"},
      {"nms.threshold.vehicle", "2.0", "suppression radius for vehicles, meters"},
      {"nms.threshold.pedestrian", "0.5", "suppression radius for pedestrians, meters"},
      {"nms.threshold.cyclist", "1.0", "suppression radius for cyclists, meters"},
  };
  return entries;
}

Config Config::defaults() {
  Config c;
  for (const ConfigEntry& e : registry()) c.values_[e.key] = e.default_value;
  return c;
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("unknown config key: " + key);
  it->second = value;
}

Config Config::parse(const std::string& text) {
  Config c = defaults();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected `key = value`, got: " + s);
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key or value");
    c.set(key, value);
  }
  return c;
}

Config Config::load(const std::string& path) {
  Config c = parse(read_file_bytes(path));
  c.apply_env();
  return c;
}

std::string Config::env_name(const std::string& key) {
  std::string name = "TRAJCAST_";
  for (char ch : key)
    name.push_back(ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  return name;
}

void Config::apply_env(const std::function<const char*(const char*)>& getenv_fn) {
  auto lookup = getenv_fn ? getenv_fn : [](const char* n) { return std::getenv(n); };
  for (const ConfigEntry& e : registry()) {
    if (const char* v = lookup(env_name(e.key).c_str())) set(e.key, v);
  }
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("unknown config key: " + key);
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string& s = get(key);
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config " + key + ": not a number: " + s);
  }
  if (pos != s.size()) throw std::invalid_argument("config " + key + ": not a number: " + s);
  return v;
}

int Config::get_int(const std::string& key) const {
  const std::string& s = get(key);
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config " + key + ": not an integer: " + s);
  }
  if (pos != s.size() || v < -2147483648LL || v > 2147483647LL)
    throw std::invalid_argument("config " + key + ": not a 32-bit integer: " + s);
  return static_cast<int>(v);
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const std::string& s = get(key);
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config " + key + ": not an unsigned integer: " + s);
  }
  if (pos != s.size())
    throw std::invalid_argument("config " + key + ": not an unsigned integer: " + s);
  return v;
}

bool Config::get_bool(const std::string& key) const {
  const std::string& s = get(key);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("config " + key + ": not a boolean: " + s);
}

std::string Config::to_text() const {
  std::ostringstream os;
  Config def = defaults();
  for (const auto& [key, value] : values_)
    if (value != def.values_[key]) os << key << " = " << value << '\n';
  return os.str();
}

std::string Config::reference_page() {
  std::ostringstream os;
  os << "Configuration reference\n"
     << "=======================\n\n"
     << "Files hold one `key = value` per line; '#' starts a comment.\n"
     << "Unknown keys are rejected. Every key can be overridden by an\n"
     << "environment variable named TRAJCAST_<KEY> with dots replaced by\n"
     << "underscores (train.lr -> " << env_name("train.lr") << ").\n\n";
  std::size_t w = 0;
  for (const ConfigEntry& e : registry()) w = std::max(w, e.key.size());
  for (const ConfigEntry& e : registry()) {
    os << e.key;
    for (std::size_t i = e.key.size(); i < w + 2; ++i) os << ' ';
    os << "default: " << e.default_value;
    for (std::size_t i = e.default_value.size(); i < 12; ++i) os << ' ';
    os << e.doc << '\n';
  }
  return os.str();
}

}  // namespace trajcast
