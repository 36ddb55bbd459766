// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace trajcast::ad {
namespace {

[[noreturn]] void shape_error(const char* op, const Mat& a, const Mat& b) {
  throw std::invalid_argument(std::string("autodiff ") + op + ": shape mismatch " +
                              std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                              std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

}  // namespace

std::int32_t Tape::check(Value v) const {
  if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size())
    throw std::invalid_argument("autodiff: value handle does not belong to this tape");
  return v.id;
}

Value Tape::push(Mat value, std::function<void(Tape&)> back) {
  nodes_.push_back(Node{std::move(value), Mat(), std::move(back)});
  return Value{static_cast<std::int32_t>(nodes_.size() - 1)};
}

Mat& Tape::grad_ref(std::int32_t id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::require_same_shape(Value a, Value b, const char* op) const {
  const Mat& ma = nodes_[check(a)].value;
  const Mat& mb = nodes_[check(b)].value;
  if (ma.rows() != mb.rows() || ma.cols() != mb.cols()) shape_error(op, ma, mb);
}

Value Tape::input(Mat m) { return push(std::move(m), nullptr); }

Value Tape::param(Mat m) { return push(std::move(m), nullptr); }

Value Tape::add(Value a, Value b) {
  require_same_shape(a, b, "add");
  Mat out = val(a) + val(b);
  return push(std::move(out), [a, b, id = size()](Tape& t) {
    const Mat& g = t.nodes_[id].grad;
    t.grad_ref(a.id) += g;
    t.grad_ref(b.id) += g;
  });
}

Value Tape::sub(Value a, Value b) {
  require_same_shape(a, b, "sub");
  Mat out = val(a) - val(b);
  return push(std::move(out), [a, b, id = size()](Tape& t) {
    const Mat& g = t.nodes_[id].grad;
    t.grad_ref(a.id) += g;
    t.grad_ref(b.id) -= g;
  });
}

Value Tape::hadamard(Value a, Value b) {
  require_same_shape(a, b, "hadamard");
  Mat out = val(a).cwiseProduct(val(b));
  return push(std::move(out), [a, b, id = size()](Tape& t) {
    const Mat& g = t.nodes_[id].grad;
    t.grad_ref(a.id).array() += g.array() * t.val(b).array();
    t.grad_ref(b.id).array() += g.array() * t.val(a).array();
  });
}

Value Tape::divide(Value a, Value b) {
  require_same_shape(a, b, "divide");
  Mat out = val(a).cwiseQuotient(val(b));
  return push(std::move(out), [a, b, id = size()](Tape& t) {
    const Mat& g = t.nodes_[id].grad;
    const Mat& bv = t.val(b);
    const Mat& ov = t.nodes_[id].value;
    t.grad_ref(a.id).array() += g.array() / bv.array();
    t.grad_ref(b.id).array() -= g.array() * ov.array() / bv.array();
  });
}

Value Tape::matmul(Value a, Value b) {
  const Mat& ma = val(a);
  const Mat& mb = val(b);
  if (ma.cols() != mb.rows()) shape_error("matmul", ma, mb);
  Mat out = ma * mb;
  return push(std::move(out), [a, b, id = size()](Tape& t) {
    const Mat& g = t.nodes_[id].grad;
    t.grad_ref(a.id).noalias() += g * t.val(b).transpose();
    t.grad_ref(b.id).noalias() += t.val(a).transpose() * g;
  });
}

Value Tape::transpose(Value a) {
  Mat out = val(a).transpose();
  return push(std::move(out), [a, id = size()](Tape& t) {
    t.grad_ref(a.id) += t.nodes_[id].grad.transpose();
  });
}

Value Tape::add_rowvec(Value a, Value v) {
  const Mat& ma = val(a);
  const Mat& mv = val(v);
  if (mv.rows() != 1 || mv.cols() != ma.cols()) shape_error("add_rowvec", ma, mv);
  Mat out = ma.rowwise() + mv.row(0);
  return push(std::move(out), [a, v, id = size()](Tape& t) {
    const Mat& g = t.nodes_[id].grad;
    t.grad_ref(a.id) += g;
    t.grad_ref(v.id) += g.colwise().sum();
  });
}

Value Tape::mul_rowvec(Value a, Value v) {
  const Mat& ma = val(a);
  const Mat& mv = val(v);
  if (mv.rows() != 1 || mv.cols() != ma.cols()) shape_error("mul_rowvec", ma, mv);
  Mat out = ma.array().rowwise() * mv.row(0).array();
  return push(std::move(out), [a, v, id = size()](Tape& t) {
    const Mat& g = t.nodes_[id].grad;
    t.grad_ref(a.id).array() += g.array().rowwise() * t.val(v).row(0).array();
    t.grad_ref(v.id) += g.cwiseProduct(t.val(a)).colwise().sum();
  });
}

Value Tape::scale(Value a, double s) {
  Mat out = val(a) * s;
  return push(std::move(out), [a, s, id = size()](Tape& t) {
    t.grad_ref(a.id) += t.nodes_[id].grad * s;
  });
}

Value Tape::add_scalar(Value a, double s) {
  Mat out = val(a).array() + s;
  return push(std::move(out), [a, id = size()](Tape& t) {
    t.grad_ref(a.id) += t.nodes_[id].grad;
  });
}

Value Tape::tanh(Value a) {
  Mat out = val(a).array().tanh();
  return push(std::move(out), [a, id = size()](Tape& t) {
    const Mat& y = t.nodes_[id].value;
    t.grad_ref(a.id).array() += t.nodes_[id].grad.array() * (1.0 - y.array().square());
  });
}

Value Tape::softplus(Value a) {
  Mat out = val(a).unaryExpr([](double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  });
  return push(std::move(out), [a, id = size()](Tape& t) {
    Mat sig = t.val(a).unaryExpr([](double x) {
      return x > 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    });
    t.grad_ref(a.id).array() += t.nodes_[id].grad.array() * sig.array();
  });
}

Value Tape::exp(Value a) {
  Mat out = val(a).array().exp();
  return push(std::move(out), [a, id = size()](Tape& t) {
    t.grad_ref(a.id).array() += t.nodes_[id].grad.array() * t.nodes_[id].value.array();
  });
}

Value Tape::log(Value a) {
  Mat out = val(a).array().log();
  return push(std::move(out), [a, id = size()](Tape& t) {
    t.grad_ref(a.id).array() += t.nodes_[id].grad.array() / t.val(a).array();
  });
}

Value Tape::row_softmax(Value a) {
  const Mat& x = val(a);
  Mat out(x.rows(), x.cols());
  for (int r = 0; r < x.rows(); ++r) {
    Eigen::ArrayXd e = (x.row(r).array() - x.row(r).maxCoeff()).exp();
    out.row(r) = e / e.sum();
  }
  return push(std::move(out), [a, id = size()](Tape& t) {
    const Mat& y = t.nodes_[id].value;
    const Mat& g = t.nodes_[id].grad;
    Mat& da = t.grad_ref(a.id);
    for (int r = 0; r < y.rows(); ++r) {
      double dot = g.row(r).dot(y.row(r));
      da.row(r).array() += y.row(r).array() * (g.row(r).array() - dot);
    }
  });
}

Value Tape::log_softmax_row(Value a) {
  const Mat& x = val(a);
  Mat out(x.rows(), x.cols());
  for (int r = 0; r < x.rows(); ++r) {
    double m = x.row(r).maxCoeff();
    double lse = m + std::log((x.row(r).array() - m).exp().sum());
    out.row(r) = x.row(r).array() - lse;
  }
  return push(std::move(out), [a, id = size()](Tape& t) {
    const Mat& y = t.nodes_[id].value;
    const Mat& g = t.nodes_[id].grad;
    Mat& da = t.grad_ref(a.id);
    for (int r = 0; r < y.rows(); ++r) {
      double gsum = g.row(r).sum();
      da.row(r).array() += g.row(r).array() - y.row(r).array().exp() * gsum;
    }
  });
}

Value Tape::logsumexp_row(Value a) {
  const Mat& x = val(a);
  Mat out(x.rows(), 1);
  for (int r = 0; r < x.rows(); ++r) {
    double m = x.row(r).maxCoeff();
    out(r, 0) = m + std::log((x.row(r).array() - m).exp().sum());
  }
  return push(std::move(out), [a, id = size()](Tape& t) {
    const Mat& x2 = t.val(a);
    const Mat& y = t.nodes_[id].value;
    const Mat& g = t.nodes_[id].grad;
    Mat& da = t.grad_ref(a.id);
    for (int r = 0; r < x2.rows(); ++r)
      da.row(r).array() += g(r, 0) * (x2.row(r).array() - y(r, 0)).exp();
  });
}

Value Tape::sum_all(Value a) {
  Mat out(1, 1);
  out(0, 0) = val(a).sum();
  return push(std::move(out), [a, id = size()](Tape& t) {
    t.grad_ref(a.id).array() += t.nodes_[id].grad(0, 0);
  });
}

Value Tape::cumsum_rows(Value a) {
  const Mat& x = val(a);
  Mat out(x.rows(), x.cols());
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(x.cols());
  for (int r = 0; r < x.rows(); ++r) {
    acc += x.row(r);
    out.row(r) = acc;
  }
  return push(std::move(out), [a, id = size()](Tape& t) {
    const Mat& g = t.nodes_[id].grad;
    Mat& da = t.grad_ref(a.id);
    Eigen::RowVectorXd acc2 = Eigen::RowVectorXd::Zero(g.cols());
    for (int r = static_cast<int>(g.rows()) - 1; r >= 0; --r) {
      acc2 += g.row(r);
      da.row(r) += acc2;
    }
  });
}

Value Tape::concat_rows(const std::vector<Value>& parts) {
  if (parts.empty()) throw std::invalid_argument("autodiff concat_rows: no parts");
  int cols = static_cast<int>(val(parts[0]).cols());
  int rows = 0;
  for (Value p : parts) {
    if (val(p).cols() != cols) shape_error("concat_rows", val(parts[0]), val(p));
    rows += static_cast<int>(val(p).rows());
  }
  Mat out(rows, cols);
  std::vector<int> offsets;
  int r0 = 0;
  for (Value p : parts) {
    offsets.push_back(r0);
    out.middleRows(r0, val(p).rows()) = val(p);
    r0 += static_cast<int>(val(p).rows());
  }
  return push(std::move(out), [parts, offsets, id = size()](Tape& t) {
    const Mat& g = t.nodes_[id].grad;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      int n = static_cast<int>(t.val(parts[i]).rows());
      t.grad_ref(parts[i].id) += g.middleRows(offsets[i], n);
    }
  });
}

Value Tape::concat_cols(const std::vector<Value>& parts) {
  if (parts.empty()) throw std::invalid_argument("autodiff concat_cols: no parts");
  int rows = static_cast<int>(val(parts[0]).rows());
  int cols = 0;
  for (Value p : parts) {
    if (val(p).rows() != rows) shape_error("concat_cols", val(parts[0]), val(p));
    cols += static_cast<int>(val(p).cols());
  }
  Mat out(rows, cols);
  std::vector<int> offsets;
  int c0 = 0;
  for (Value p : parts) {
    offsets.push_back(c0);
    out.middleCols(c0, val(p).cols()) = val(p);
    c0 += static_cast<int>(val(p).cols());
  }
  return push(std::move(out), [parts, offsets, id = size()](Tape& t) {
    const Mat& g = t.nodes_[id].grad;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      int n = static_cast<int>(t.val(parts[i]).cols());
      t.grad_ref(parts[i].id) += g.middleCols(offsets[i], n);
    }
  });
}

Value Tape::slice_rows(Value a, int row0, int nrows) {
  const Mat& x = val(a);
  if (row0 < 0 || nrows < 0 || row0 + nrows > x.rows())
    throw std::invalid_argument("autodiff slice_rows: range out of bounds");
  Mat out = x.middleRows(row0, nrows);
  return push(std::move(out), [a, row0, nrows, id = size()](Tape& t) {
    t.grad_ref(a.id).middleRows(row0, nrows) += t.nodes_[id].grad;
  });
}

Value Tape::slice_cols(Value a, int col0, int ncols) {
  const Mat& x = val(a);
  if (col0 < 0 || ncols < 0 || col0 + ncols > x.cols())
    throw std::invalid_argument("autodiff slice_cols: range out of bounds");
  Mat out = x.middleCols(col0, ncols);
  return push(std::move(out), [a, col0, ncols, id = size()](Tape& t) {
    t.grad_ref(a.id).middleCols(col0, ncols) += t.nodes_[id].grad;
  });
}

Value Tape::select_rows(Value a, std::vector<int> rows) {
  const Mat& x = val(a);
  Mat out(static_cast<int>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= x.rows())
      throw std::invalid_argument("autodiff select_rows: index out of bounds");
    out.row(static_cast<int>(i)) = x.row(rows[i]);
  }
  return push(std::move(out), [a, rows = std::move(rows), id = size()](Tape& t) {
    const Mat& g = t.nodes_[id].grad;
    Mat& da = t.grad_ref(a.id);
    for (std::size_t i = 0; i < rows.size(); ++i) da.row(rows[i]) += g.row(static_cast<int>(i));
  });
}

Value Tape::reshape_rowmajor(Value a, int rows, int cols) {
  const Mat& x = val(a);
  if (static_cast<long>(rows) * cols != x.size())
    throw std::invalid_argument("autodiff reshape_rowmajor: element count mismatch");
  Mat out(rows, cols);
  int k = 0;
  for (int r = 0; r < x.rows(); ++r)
    for (int c = 0; c < x.cols(); ++c) {
      out(k / cols, k % cols) = x(r, c);
      ++k;
    }
  return push(std::move(out), [a, cols, id = size()](Tape& t) {
    const Mat& g = t.nodes_[id].grad;
    Mat& da = t.grad_ref(a.id);
    int k2 = 0;
    for (int r = 0; r < da.rows(); ++r)
      for (int c = 0; c < da.cols(); ++c) {
        da(r, c) += g(k2 / cols, k2 % cols);
        ++k2;
      }
  });
}

Value Tape::masked_max_pool(Value a, const std::vector<std::uint8_t>& valid) {
  const Mat& x = val(a);
  if (static_cast<long>(valid.size()) != x.rows())
    throw std::invalid_argument("autodiff masked_max_pool: mask length mismatch");
  std::vector<int> argmax(static_cast<std::size_t>(x.cols()), -1);
  Mat out(1, x.cols());
  for (int c = 0; c < x.cols(); ++c) {
    int best = -1;
    for (int r = 0; r < x.rows(); ++r) {
      if (!valid[static_cast<std::size_t>(r)]) continue;
      if (best < 0 || x(r, c) > x(best, c)) best = r;
    }
    if (best < 0) throw std::invalid_argument("autodiff masked_max_pool: no valid rows");
    argmax[static_cast<std::size_t>(c)] = best;
    out(0, c) = x(best, c);
  }
  return push(std::move(out), [a, argmax = std::move(argmax), id = size()](Tape& t) {
    const Mat& g = t.nodes_[id].grad;
    Mat& da = t.grad_ref(a.id);
    for (int c = 0; c < g.cols(); ++c) da(argmax[static_cast<std::size_t>(c)], c) += g(0, c);
  });
}

void Tape::backward(Value out) {
  if (backward_done_) throw std::logic_error("autodiff: backward already ran on this tape");
  backward_done_ = true;
  std::int32_t id = check(out);
  const Mat& y = nodes_[static_cast<std::size_t>(id)].value;
  if (y.rows() != 1 || y.cols() != 1)
    throw std::invalid_argument("autodiff backward: output must be 1x1");
  grad_ref(id)(0, 0) = 1.0;
  for (std::int32_t i = id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.back && n.grad.size() != 0) n.back(*this);
  }
}

Mat Tape::grad(Value v) const {
  const Node& n = nodes_[static_cast<std::size_t>(check(v))];
  if (n.grad.size() == 0) return Mat::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

}  // namespace trajcast::ad
