// include/ainn/losses.hpp

// Copyright 2026  The ainn-evc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef AINN_LOSSES_HPP_
#define AINN_LOSSES_HPP_

// Training objectives and their analytic gradients. Everything here is a
// pure function templated on the scalar type: training instantiates float,
// the gradient checks instantiate double.
//
// Conventions: expectations are minibatch means (taken by the caller), matrix
// norms are means over entries, and eps = 1e-8 guards every log and cosine
// denominator.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "ainn/common.hpp"

namespace ainn::losses {

inline constexpr double kEps = 1e-8;

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

struct StageIWeights {
  double lambda_dis = 0.2;
  double lambda_str = 1.0;
};

struct StageIIWeights {
  double lambda_c = 0.0002;
};

struct StrengthMargins {
  double delta1 = 0.5;
  double delta2 = 0.5;
};

// kPrinted: max{|sx - s+|, d1} + max{1 - (sx - s-), d2}, a loss with floor
// d1 + d2 and zero gradient below the margins.
// kHinge:   max{|sx - s+| - d1, 0} + max{1 - (sx - s-) - d2, 0}.
enum class StrengthLossForm { kPrinted, kHinge };

namespace detail {
inline void CheckSameSize(Eigen::Index a, Eigen::Index b, const char* what) {
  Require(a == b, ErrorKind::kInvalidArgument, std::string(what) + ": length mismatch");
}
template <class S>
S Sign(S v) {
  return v > S(0) ? S(1) : (v < S(0) ? S(-1) : S(0));
}
}  // namespace detail

// Cross-entropy -sum_k p_k log q_k with q clamped at eps.
template <class S>
S LossCls(const Vec<S>& q, const Vec<S>& p, Vec<S>* dq = nullptr) {
  detail::CheckSameSize(q.size(), p.size(), "loss_cls");
  const S eps = static_cast<S>(kEps);
  S loss = 0;
  if (dq) dq->setZero(q.size());
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    const S qc = std::max(q(k), eps);
    loss -= p(k) * std::log(qc);
    if (dq && q(k) >= eps) (*dq)(k) = -p(k) / qc;
  }
  return loss;
}

struct StrengthGrad {
  double d_x = 0, d_pos = 0, d_neg = 0;
};

template <class S>
S LossStr(S s_x, S s_pos, S s_neg, const StrengthMargins& m,
          StrengthLossForm form = StrengthLossForm::kPrinted,
          StrengthGrad* grad = nullptr) {
  const S d1 = static_cast<S>(m.delta1), d2 = static_cast<S>(m.delta2);
  const S gap_pos = std::abs(s_x - s_pos);
  const S gap_neg = S(1) - (s_x - s_neg);
  S loss;
  bool pos_active, neg_active;
  if (form == StrengthLossForm::kPrinted) {
    loss = std::max(gap_pos, d1) + std::max(gap_neg, d2);
    pos_active = gap_pos > d1;
    neg_active = gap_neg > d2;
  } else {
    loss = std::max(gap_pos - d1, S(0)) + std::max(gap_neg - d2, S(0));
    pos_active = gap_pos - d1 > S(0);
    neg_active = gap_neg - d2 > S(0);
  }
  if (grad) {
    *grad = {};
    if (pos_active) {
      const double sg = static_cast<double>(detail::Sign(s_x - s_pos));
      grad->d_x += sg;
      grad->d_pos -= sg;
    }
    if (neg_active) {
      grad->d_x -= 1.0;
      grad->d_neg += 1.0;
    }
  }
  return loss;
}

// S_t = |e_t . c_t| / (||e_t|| ||c_t|| + eps), one value per frame.
template <class S>
Vec<S> FrameSimilarity(const Mat<S>& e, const Mat<S>& c) {
  Require(e.rows() == c.rows(), ErrorKind::kInvalidArgument,
          "frame_similarity: frame-count mismatch");
  Require(e.cols() == c.cols(), ErrorKind::kInvalidArgument,
          "frame_similarity: feature widths differ");
  const S eps = static_cast<S>(kEps);
  Vec<S> s(e.rows());
  for (Eigen::Index t = 0; t < e.rows(); ++t) {
    const S dot = e.row(t).dot(c.row(t));
    s(t) = std::abs(dot) / (e.row(t).norm() * c.row(t).norm() + eps);
  }
  return s;
}

// Chain rule through FrameSimilarity given upstream dS (length T).
template <class S>
void FrameSimilarityBackward(const Mat<S>& e, const Mat<S>& c, const Vec<S>& d_s,
                             Mat<S>* d_e, Mat<S>* d_c) {
  const S eps = static_cast<S>(kEps);
  if (d_e) d_e->setZero(e.rows(), e.cols());
  if (d_c) d_c->setZero(c.rows(), c.cols());
  for (Eigen::Index t = 0; t < e.rows(); ++t) {
    const S dot = e.row(t).dot(c.row(t));
    const S ne = e.row(t).norm(), nc = c.row(t).norm();
    const S den = ne * nc + eps;
    const S sg = detail::Sign(dot);
    const S a = std::abs(dot);
    if (d_e && ne > S(0)) {
      d_e->row(t) = d_s(t) * (sg * c.row(t) / den - a * nc * e.row(t) / (ne * den * den));
    }
    if (d_c && nc > S(0)) {
      d_c->row(t) = d_s(t) * (sg * e.row(t) / den - a * ne * c.row(t) / (nc * den * den));
    }
  }
}

// (1/T) sum_t M_t S_t.
template <class S>
S LossDis(const Vec<S>& cue, const Vec<S>& sim, Vec<S>* d_cue = nullptr,
          Vec<S>* d_sim = nullptr) {
  detail::CheckSameSize(cue.size(), sim.size(), "loss_dis");
  Require(cue.size() > 0, ErrorKind::kInvalidArgument, "loss_dis: empty input");
  const S inv_t = S(1) / static_cast<S>(cue.size());
  if (d_cue) *d_cue = sim * inv_t;
  if (d_sim) *d_sim = cue * inv_t;
  return cue.dot(sim) * inv_t;
}

// Mean absolute error over all entries; d_out is d/d(out), and d/d(target)
// is its negation.
template <class S>
S MeanAbsError(const Mat<S>& out, const Mat<S>& target, Mat<S>* d_out = nullptr,
               const char* what = "l1") {
  Require(out.rows() == target.rows() && out.cols() == target.cols(),
          ErrorKind::kInvalidArgument, std::string(what) + ": shape mismatch");
  Require(out.size() > 0, ErrorKind::kInvalidArgument, std::string(what) + ": empty input");
  const S inv_n = S(1) / static_cast<S>(out.size());
  if (d_out) *d_out = (out - target).unaryExpr([inv_n](S v) { return detail::Sign(v) * inv_n; });
  return (out - target).cwiseAbs().sum() * inv_n;
}

template <class S>
S LossRec(const Mat<S>& out, const Mat<S>& target, Mat<S>* d_out = nullptr) {
  return MeanAbsError(out, target, d_out, "loss_rec");
}

template <class S>
S LossCc(const Mat<S>& c_converted, const Mat<S>& c_source, Mat<S>* d_converted = nullptr) {
  return MeanAbsError(c_converted, c_source, d_converted, "loss_cc");
}

// KL(q_y || q_z) = sum_k q_y log(q_y / q_z), both clamped at eps in the log.
template <class S>
S LossEcc(const Vec<S>& q_y, const Vec<S>& q_z, Vec<S>* d_qy = nullptr,
          Vec<S>* d_qz = nullptr) {
  detail::CheckSameSize(q_y.size(), q_z.size(), "loss_ecc");
  const S eps = static_cast<S>(kEps);
  S loss = 0;
  if (d_qy) d_qy->setZero(q_y.size());
  if (d_qz) d_qz->setZero(q_z.size());
  for (Eigen::Index k = 0; k < q_y.size(); ++k) {
    const S y = std::max(q_y(k), eps), z = std::max(q_z(k), eps);
    const S lr = std::log(y / z);
    loss += q_y(k) * lr;
    if (d_qy) (*d_qy)(k) = lr + (q_y(k) >= eps ? S(1) : S(0));
    if (d_qz && q_z(k) >= eps) (*d_qz)(k) = -q_y(k) / z;
  }
  return loss;
}

// (s_z - s_y)^2.
template <class S>
S LossEsc(S s_z, S s_y, S* d_sz = nullptr, S* d_sy = nullptr) {
  const S d = s_z - s_y;
  if (d_sz) *d_sz = S(2) * d;
  if (d_sy) *d_sy = S(-2) * d;
  return d * d;
}

struct StageIParts {
  double rec = 0, cls = 0, dis = 0, str = 0;
};

struct StageIIParts {
  double rec = 0, cc = 0, ecc = 0, esc = 0;
};

namespace detail {
inline void CheckFinite(double v, const char* name) {
  Require(std::isfinite(v), ErrorKind::kNumeric,
          std::string("non-finite loss term: ") + name);
}
}  // namespace detail

// L_rec + L_cls + lambda_dis L_dis + lambda_str L_str. The gradient with
// respect to each part is the corresponding coefficient.
inline double StageITotal(const StageIParts& p, const StageIWeights& w,
                          StageIParts* grad = nullptr) {
  detail::CheckFinite(p.rec, "rec");
  detail::CheckFinite(p.cls, "cls");
  detail::CheckFinite(p.dis, "dis");
  detail::CheckFinite(p.str, "str");
  if (grad) *grad = {1.0, 1.0, w.lambda_dis, w.lambda_str};
  return p.rec + p.cls + w.lambda_dis * p.dis + w.lambda_str * p.str;
}

// L_rec + lambda_c (L_cc + L_ecc + L_esc).
inline double StageIITotal(const StageIIParts& p, const StageIIWeights& w,
                           StageIIParts* grad = nullptr) {
  detail::CheckFinite(p.rec, "rec");
  detail::CheckFinite(p.cc, "cc");
  detail::CheckFinite(p.ecc, "ecc");
  detail::CheckFinite(p.esc, "esc");
  if (grad) *grad = {1.0, w.lambda_c, w.lambda_c, w.lambda_c};
  return p.rec + w.lambda_c * p.cc + w.lambda_c * p.ecc + w.lambda_c * p.esc;
}

}  // namespace ainn::losses

#endif  // AINN_LOSSES_HPP_
