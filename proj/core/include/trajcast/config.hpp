// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Plain-text configuration with a closed key registry. Files hold
// `key = value` lines ('#' starts a comment). Unknown keys fail loudly, in
// files and in environment overrides alike, so a typo can never fall back to
// a silent default. Environment variables override file values using the
// prefix TRAJCAST_ with dots mapped to underscores and the key uppercased
// (train.lr -> TRAJCAST_TRAIN_LR).

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace trajcast {

struct ConfigEntry {
  std::string key;
  std::string default_value;
  std::string doc;
};

class Config {
 public:
  /// Every known key with default and one-line description.
  static const std::vector<ConfigEntry>& registry();

  /// All defaults, no overrides.
  static Config defaults();

  /// Defaults, then file contents, then environment overrides.
  static Config load(const std::string& path);

  /// Defaults plus parsed text (no environment), mainly for tests.
  static Config parse(const std::string& text);

  /// Applies TRAJCAST_* environment overrides through a lookup function
  /// (injectable for tests; pass nullptr to use ::getenv).
  void apply_env(const std::function<const char*(const char*)>& getenv_fn = nullptr);

  /// Unknown keys throw std::invalid_argument naming the key.
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  /// Non-default entries as `key = value` lines; parseable by parse().
  std::string to_text() const;

  /// Human-readable reference: every key, default, description, plus the
  /// file format and environment override rules.
  static std::string reference_page();

  /// Environment variable name for a key (TRAJCAST_TRAIN_LR style).
  static std::string env_name(const std::string& key);

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace trajcast
