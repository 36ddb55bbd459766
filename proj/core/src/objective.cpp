// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trajcast/types.hpp"

namespace trajcast {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double inv_softplus(double y) {
  if (y <= 0.0) throw std::invalid_argument("inv_softplus: domain is (0, inf)");
  // log(exp(y) - 1), stable for large y.
  return y > 30.0 ? y : std::log(std::expm1(y));
}

Covariance2D decode_covariance(double sx_raw, double sy_raw, double rho_raw) {
  Covariance2D c;
  c.sx = softplus(sx_raw) + kSigmaFloor;
  c.sy = softplus(sy_raw) + kSigmaFloor;
  c.rho = std::tanh(rho_raw) * kRhoLimit;
  return c;
}

double log_gaussian_2d(double dx, double dy, const Covariance2D& c) {
  double omr = 1.0 - c.rho * c.rho;
  double zx = dx / c.sx;
  double zy = dy / c.sy;
  double quad = (zx * zx + zy * zy - 2.0 * c.rho * zx * zy) / (2.0 * omr);
  return -std::log(2.0 * kPi) - std::log(c.sx) - std::log(c.sy) - 0.5 * std::log(omr) - quad;
}

double mixture_nll(const std::vector<ModeTrajectory>& modes, const std::vector<Point2>& gt,
                   const std::vector<std::uint8_t>& valid) {
  if (modes.empty()) throw std::invalid_argument("mixture_nll: no modes");
  if (gt.size() != valid.size()) throw std::invalid_argument("mixture_nll: gt/valid size mismatch");
  if (std::none_of(valid.begin(), valid.end(), [](std::uint8_t v) { return v != 0; }))
    throw std::invalid_argument("mixture_nll: all ground-truth steps invalid");
  std::vector<double> terms;
  terms.reserve(modes.size());
  for (const ModeTrajectory& m : modes) {
    if (m.points.size() != gt.size() || m.covs.size() != gt.size())
      throw std::invalid_argument("mixture_nll: mode length mismatch");
    double ll = std::log(m.prob);
    for (std::size_t t = 0; t < gt.size(); ++t) {
      if (!valid[t]) continue;
      ll += log_gaussian_2d(gt[t][0] - m.points[t][0], gt[t][1] - m.points[t][1], m.covs[t]);
    }
    terms.push_back(ll);
  }
  double mx = *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double v : terms) s += std::exp(v - mx);
  return -(mx + std::log(s));
}

CovGraph decode_covariance_graph(ad::Tape& t, ad::Value cov_raw) {
  CovGraph g;
  g.sx = t.add_scalar(t.softplus(t.slice_cols(cov_raw, 0, 1)), kSigmaFloor);
  g.sy = t.add_scalar(t.softplus(t.slice_cols(cov_raw, 1, 1)), kSigmaFloor);
  g.rho = t.scale(t.tanh(t.slice_cols(cov_raw, 2, 1)), kRhoLimit);
  return g;
}

ad::Value mixture_nll_graph(ad::Tape& t, const std::vector<ModeGraph>& modes, ad::Value logits,
                            const ad::Mat& gt, const std::vector<std::uint8_t>& valid) {
  if (modes.empty()) throw std::invalid_argument("mixture_nll_graph: no modes");
  if (gt.rows() != static_cast<long>(valid.size()) || gt.cols() != 2)
    throw std::invalid_argument("mixture_nll_graph: gt must be T x 2 matching valid");
  if (std::none_of(valid.begin(), valid.end(), [](std::uint8_t v) { return v != 0; }))
    throw std::invalid_argument("mixture_nll_graph: all ground-truth steps invalid");
  const int T = static_cast<int>(gt.rows());

  ad::Mat mask(T, 1);
  for (int i = 0; i < T; ++i) mask(i, 0) = valid[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  ad::Value gt_v = t.input(gt);
  ad::Value mask_v = t.input(mask);

  std::vector<ad::Value> per_mode;
  per_mode.reserve(modes.size());
  for (const ModeGraph& m : modes) {
    ad::Value d = t.sub(gt_v, m.mean);
    ad::Value dx = t.slice_cols(d, 0, 1);
    ad::Value dy = t.slice_cols(d, 1, 1);
    CovGraph c = decode_covariance_graph(t, m.cov_raw);
    ad::Value omr = t.add_scalar(t.scale(t.hadamard(c.rho, c.rho), -1.0), 1.0);
    ad::Value zx = t.divide(dx, c.sx);
    ad::Value zy = t.divide(dy, c.sy);
    ad::Value cross = t.scale(t.hadamard(c.rho, t.hadamard(zx, zy)), 2.0);
    ad::Value z = t.sub(t.add(t.hadamard(zx, zx), t.hadamard(zy, zy)), cross);
    ad::Value quad = t.divide(z, t.scale(omr, 2.0));
    ad::Value logdet = t.add(t.add(t.log(c.sx), t.log(c.sy)), t.scale(t.log(omr), 0.5));
    ad::Value lp = t.add_scalar(t.scale(t.add(logdet, quad), -1.0), -std::log(2.0 * kPi));
    per_mode.push_back(t.sum_all(t.hadamard(lp, mask_v)));
  }

  ad::Value joint = t.add(t.log_softmax_row(logits), t.concat_cols(per_mode));
  return t.scale(t.logsumexp_row(joint), -1.0);
}

}  // namespace trajcast
