// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Gaussian-mixture trajectory likelihood. The per-scene loss is the negative
// log of a mixture over modes, where each mode scores the displacement from
// its mean at every valid future step under a full 2x2 covariance:
//
//   nll = -log sum_m exp(log c_m + sum_t log N(gt_t - mu_m_t, Sigma_m_t))
//
// evaluated with log-sum-exp. Covariances are parameterized unconstrained:
// sigma = softplus(raw) + floor keeps scales positive, rho = tanh(raw) * 0.99
// keeps correlations strictly inside (-1, 1).

#pragma once

#include <cstdint>
#include <vector>

#include "trajcast/autodiff.hpp"
#include "trajcast/canonical.hpp"

namespace trajcast {

inline constexpr double kSigmaFloor = 1e-3;
inline constexpr double kRhoLimit = 0.99;

double softplus(double x);
/// Inverse of softplus on (0, inf); handy for seeding raw scales.
double inv_softplus(double y);

struct Covariance2D {
  double sx = 1.0;
  double sy = 1.0;
  double rho = 0.0;
};

Covariance2D decode_covariance(double sx_raw, double sy_raw, double rho_raw);

/// Log density of the displacement (dx, dy) under N(0, Sigma(c)).
double log_gaussian_2d(double dx, double dy, const Covariance2D& c);

/// One decoded mode in plain numbers.
struct ModeTrajectory {
  std::vector<Point2> points;
  std::vector<Covariance2D> covs;
  double prob = 0.0;  // normalized mixture weight
};

/// Negative log mixture likelihood over already-decoded modes. `valid` flags
/// the scored future steps; sizes must agree.
double mixture_nll(const std::vector<ModeTrajectory>& modes, const std::vector<Point2>& gt,
                   const std::vector<std::uint8_t>& valid);

/// One mode on a tape: mean positions (T x 2) and raw covariance (T x 3,
/// columns sx_raw, sy_raw, rho_raw).
struct ModeGraph {
  ad::Value mean;
  ad::Value cov_raw;
};

/// Differentiable mixture NLL. `logits` is 1 x M (softmax-normalized inside),
/// `gt` is T x 2 ground truth, `valid` flags scored steps. Returns 1 x 1.
ad::Value mixture_nll_graph(ad::Tape& t, const std::vector<ModeGraph>& modes, ad::Value logits,
                            const ad::Mat& gt, const std::vector<std::uint8_t>& valid);

/// Sigma/rho decoding on a tape: cov_raw T x 3 to {sx, sy, rho} columns.
struct CovGraph {
  ad::Value sx;
  ad::Value sy;
  ad::Value rho;
};
CovGraph decode_covariance_graph(ad::Tape& t, ad::Value cov_raw);

}  // namespace trajcast
