// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Reverse-mode automatic differentiation on dense matrices.
//
// A Tape owns an append-only list of nodes. Ops evaluate eagerly and record a
// backward closure; backward(scalar) replays closures in reverse, accumulating
// gradients. Tapes are single-use: build a graph, run backward once, read
// gradients, discard. One tape per thread; tapes share nothing.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace trajcast::ad {

using Mat = Eigen::MatrixXd;

/// Handle to a tape node. Valid only for the tape that produced it.
struct Value {
  std::int32_t id = -1;
  bool ok() const { return id >= 0; }
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf that does not require gradients (constants, targets, masks).
  Value input(Mat m);
  /// Leaf that accumulates gradients (model parameters).
  Value param(Mat m);

  Value add(Value a, Value b);
  Value sub(Value a, Value b);
  Value hadamard(Value a, Value b);
  /// Elementwise a / b.
  Value divide(Value a, Value b);
  Value matmul(Value a, Value b);
  Value transpose(Value a);

  /// Broadcast a 1 x C row vector over every row of a.
  Value add_rowvec(Value a, Value v);
  Value mul_rowvec(Value a, Value v);

  Value scale(Value a, double s);
  Value add_scalar(Value a, double s);

  Value tanh(Value a);
  /// log(1 + exp(x)), evaluated in the overflow-safe branch form.
  Value softplus(Value a);
  Value exp(Value a);
  /// Natural log; caller guarantees positive entries.
  Value log(Value a);

  /// Softmax independently per row.
  Value row_softmax(Value a);
  /// Log-softmax independently per row.
  Value log_softmax_row(Value a);
  /// Row-wise log(sum(exp(row))), returns N x 1.
  Value logsumexp_row(Value a);

  /// Sum of all entries, returns 1 x 1.
  Value sum_all(Value a);
  /// Row r of the output is the sum of input rows 0..r.
  Value cumsum_rows(Value a);

  Value concat_rows(const std::vector<Value>& parts);
  Value concat_cols(const std::vector<Value>& parts);
  Value slice_rows(Value a, int row0, int nrows);
  Value slice_cols(Value a, int col0, int ncols);
  /// Gather rows by index; an index may repeat.
  Value select_rows(Value a, std::vector<int> rows);
  /// Reinterpret entries in row-major order as a rows x cols matrix.
  Value reshape_rowmajor(Value a, int rows, int cols);

  /// Column-wise max over rows i with valid[i] != 0, returns 1 x C. The mask
  /// is a constant; at least one row must be valid. Gradient flows to the
  /// first maximizing row per column.
  Value masked_max_pool(Value a, const std::vector<std::uint8_t>& valid);

  /// Seeds d(out)/d(out) = 1 and propagates; out must be 1 x 1. Call once.
  void backward(Value out);

  const Mat& val(Value v) const { return nodes_[check(v)].value; }
  /// Gradient of the node; zero matrix when backward never reached it.
  Mat grad(Value v) const;

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Mat value;
    Mat grad;  // sized lazily during backward
    std::function<void(Tape&)> back;
  };

  std::int32_t check(Value v) const;
  Value push(Mat value, std::function<void(Tape&)> back);
  Mat& grad_ref(std::int32_t id);
  void require_same_shape(Value a, Value b, const char* op) const;

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace trajcast::ad
