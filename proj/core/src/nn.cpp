// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace trajcast::nn {

Mat& ParamStore::create(const std::string& name, int rows, int cols) {
  auto [it, inserted] = params.emplace(name, Mat::Zero(rows, cols));
  if (!inserted) throw std::invalid_argument("parameter already exists: " + name);
  return it->second;
}

Mat& ParamStore::at(const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) throw std::out_of_range("unknown parameter: " + name);
  return it->second;
}

const Mat& ParamStore::at(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) throw std::out_of_range("unknown parameter: " + name);
  return it->second;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, m] : params) n += static_cast<std::size_t>(m.size());
  return n;
}

void xavier_init(Mat& m, Rng& rng) {
  double a = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-a, a);
}

void GradBuffer::accumulate(const std::string& name, const Mat& g) {
  auto it = grads.find(name);
  if (it == grads.end())
    grads.emplace(name, g);
  else
    it->second += g;
}

void GradBuffer::add(const GradBuffer& other) {
  for (const auto& [name, g] : other.grads) accumulate(name, g);
}

double GradBuffer::global_norm() const {
  double sq = 0.0;
  for (const auto& [name, g] : grads) sq += g.squaredNorm();
  return std::sqrt(sq);
}

void GradBuffer::scale(double s) {
  for (auto& [name, g] : grads) g *= s;
}

Value ParamUse::operator()(const std::string& name) {
  auto it = used_.find(name);
  if (it != used_.end()) return it->second;
  Value v = tape_->param(store_->at(name));
  used_.emplace(name, v);
  return v;
}

void ParamUse::collect(GradBuffer& out) const {
  for (const auto& [name, v] : used_) out.accumulate(name, tape_->grad(v));
}

Linear::Linear(ParamStore& store, Rng& rng, const std::string& prefix, int in, int out)
    : w_(prefix + ".w"), b_(prefix + ".b") {
  xavier_init(store.create(w_, in, out), rng);
  store.create(b_, 1, out);
}

Value Linear::apply(Tape& t, ParamUse& p, Value x) const {
  return t.add_rowvec(t.matmul(x, p(w_)), p(b_));
}

Mlp::Mlp(ParamStore& store, Rng& rng, const std::string& prefix, int in,
         const std::vector<int>& hidden, int out) {
  int prev = in;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    layers_.emplace_back(store, rng, prefix + ".h" + std::to_string(i), prev, hidden[i]);
    prev = hidden[i];
  }
  layers_.emplace_back(store, rng, prefix + ".out", prev, out);
}

Value Mlp::apply(Tape& t, ParamUse& p, Value x) const {
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) x = t.tanh(layers_[i].apply(t, p, x));
  return layers_.back().apply(t, p, x);
}

Value valid_mask_matrix(Tape& t, const std::vector<std::uint8_t>& valid, int n_cols) {
  Mat m(static_cast<int>(valid.size()), n_cols);
  for (std::size_t r = 0; r < valid.size(); ++r)
    m.row(static_cast<int>(r)).setConstant(valid[r] ? 1.0 : 0.0);
  return t.input(std::move(m));
}

CgBlock::CgBlock(ParamStore& store, Rng& rng, const std::string& prefix, int dim)
    : dim_(dim),
      elem_net_(store, rng, prefix + ".elem", dim, {dim}, dim),
      ctx_net_(store, rng, prefix + ".ctx", dim, {dim}, dim),
      default_ctx_(prefix + ".default_ctx") {
  store.create(default_ctx_, 1, dim);
}

CgBlock::Out CgBlock::apply(Tape& t, ParamUse& p, Value elements, Value context,
                            const std::vector<std::uint8_t>& valid) const {
  const Mat& e = t.val(elements);
  if (e.cols() != dim_) throw std::invalid_argument("cg block: element width mismatch");
  if (static_cast<long>(valid.size()) != e.rows())
    throw std::invalid_argument("cg block: mask length mismatch");

  Value gated = t.mul_rowvec(elem_net_.apply(t, p, elements), ctx_net_.apply(t, p, context));

  bool any_valid = false;
  bool all_valid = true;
  for (std::uint8_t v : valid) {
    any_valid = any_valid || v;
    all_valid = all_valid && v;
  }

  Value out_elems = gated;
  if (!all_valid) {
    // Invalid rows keep their inputs; validity is static per scene so the
    // blend is a constant 0/1 mask.
    Value m = valid_mask_matrix(t, valid, dim_);
    Value keep = t.add_scalar(t.scale(m, -1.0), 1.0);
    out_elems = t.add(t.hadamard(gated, m), t.hadamard(elements, keep));
  }

  Value out_ctx = any_valid ? t.masked_max_pool(gated, valid) : p(default_ctx_);
  return Out{out_elems, out_ctx};
}

McgStack::McgStack(ParamStore& store, Rng& rng, const std::string& prefix, int dim, int blocks)
    : dim_(dim) {
  if (blocks < 1) throw std::invalid_argument("mcg stack: need at least one block");
  for (int i = 0; i < blocks; ++i)
    blocks_.emplace_back(store, rng, prefix + ".cg" + std::to_string(i), dim);
}

CgBlock::Out McgStack::apply(Tape& t, ParamUse& p, Value elements, Value context,
                             const std::vector<std::uint8_t>& valid) const {
  Value s = elements;
  Value c = context;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    CgBlock::Out o = blocks_[k].apply(t, p, s, c, valid);
    double kk = static_cast<double>(k);
    // Running mean over block outputs: s_k = (k * s_{k-1} + o_k) / (k + 1).
    s = t.scale(t.add(t.scale(s, kk), o.elements), 1.0 / (kk + 1.0));
    c = t.scale(t.add(t.scale(c, kk), o.context), 1.0 / (kk + 1.0));
  }
  return CgBlock::Out{s, c};
}

}  // namespace trajcast::nn
