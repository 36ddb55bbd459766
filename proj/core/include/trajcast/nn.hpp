// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Named-parameter building blocks on top of the autodiff tape. A ParamStore
// owns every weight by name; layers create their weights at construction and
// replay them onto per-scene tapes through a ParamUse binding. Name order is
// the deterministic iteration order everywhere (init, update, serialization).

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "trajcast/autodiff.hpp"
#include "trajcast/rng.hpp"

namespace trajcast::nn {

using ad::Mat;
using ad::Tape;
using ad::Value;

struct ParamStore {
  std::map<std::string, Mat> params;

  /// Creates a zero matrix under `name`; duplicate names throw.
  Mat& create(const std::string& name, int rows, int cols);
  Mat& at(const std::string& name);
  const Mat& at(const std::string& name) const;
  bool has(const std::string& name) const { return params.count(name) != 0; }
  /// Total scalar count across all parameters.
  std::size_t scalar_count() const;
};

/// Fills in-place with uniform(-a, a), a = sqrt(6 / (fan_in + fan_out)).
/// Entries are drawn row-major so the layout pins the random stream.
void xavier_init(Mat& m, Rng& rng);

/// Sum of per-parameter gradients, keyed like the store.
struct GradBuffer {
  std::map<std::string, Mat> grads;

  void accumulate(const std::string& name, const Mat& g);
  void add(const GradBuffer& other);
  double global_norm() const;
  void scale(double s);
};

/// Binds store parameters to leaves of one tape. Each parameter becomes at
/// most one leaf no matter how many layers share it.
class ParamUse {
 public:
  ParamUse(Tape& tape, const ParamStore& store) : tape_(&tape), store_(&store) {}

  Value operator()(const std::string& name);

  /// After Tape::backward, folds every used parameter's gradient into `out`.
  void collect(GradBuffer& out) const;

 private:
  Tape* tape_;
  const ParamStore* store_;
  std::map<std::string, Value> used_;
};

/// Dense layer y = x W + b.
class Linear {
 public:
  Linear(ParamStore& store, Rng& rng, const std::string& prefix, int in, int out);
  Value apply(Tape& t, ParamUse& p, Value x) const;

 private:
  std::string w_, b_;
};

/// Feed-forward stack with tanh after every hidden layer and a linear output.
class Mlp {
 public:
  Mlp(ParamStore& store, Rng& rng, const std::string& prefix, int in,
      const std::vector<int>& hidden, int out);
  Value apply(Tape& t, ParamUse& p, Value x) const;

 private:
  std::vector<Linear> layers_;
};

/// Context-gating block over a set at uniform width D.
///
/// Valid elements and the context each pass a one-hidden-layer perceptron;
/// the gated update is elementwise product with the projected context. The
/// next context is the column max over valid gated rows, or a learned default
/// row when no element is valid. Invalid rows pass through unchanged and
/// never reach the pool.
class CgBlock {
 public:
  CgBlock(ParamStore& store, Rng& rng, const std::string& prefix, int dim);

  struct Out {
    Value elements;
    Value context;
  };
  Out apply(Tape& t, ParamUse& p, Value elements, Value context,
            const std::vector<std::uint8_t>& valid) const;
  int dim() const { return dim_; }

 private:
  int dim_ = 0;
  Mlp elem_net_;
  Mlp ctx_net_;
  std::string default_ctx_;
};

/// Stack of context-gating blocks with running-average skip connections on
/// both streams: after block k (1-based), s_k = (k * s_{k-1} + block_k) / (k+1).
class McgStack {
 public:
  McgStack(ParamStore& store, Rng& rng, const std::string& prefix, int dim, int blocks);

  CgBlock::Out apply(Tape& t, ParamUse& p, Value elements, Value context,
                     const std::vector<std::uint8_t>& valid) const;
  int dim() const { return dim_; }

 private:
  int dim_ = 0;
  std::vector<CgBlock> blocks_;
};

/// Constant 0/1 column mask replicated to n_cols, as a tape input.
Value valid_mask_matrix(Tape& t, const std::vector<std::uint8_t>& valid, int n_cols);

}  // namespace trajcast::nn
