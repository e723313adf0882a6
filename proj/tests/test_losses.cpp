// tests/test_losses.cpp

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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "ainn/losses.hpp"

using namespace ainn;
using namespace ainn::losses;
using Catch::Approx;

namespace {

using VD = Vec<double>;
using MD = Mat<double>;

VD V(std::initializer_list<double> v) {
  VD out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Plain-loop reference implementations.
double RefCls(const std::vector<double>& q, const std::vector<double>& p) {
  double s = 0;
  for (size_t k = 0; k < q.size(); ++k) s -= p[k] * std::log(std::max(q[k], 1e-8));
  return s;
}

double RefKl(const std::vector<double>& y, const std::vector<double>& z) {
  double s = 0;
  for (size_t k = 0; k < y.size(); ++k)
    s += y[k] * std::log(std::max(y[k], 1e-8) / std::max(z[k], 1e-8));
  return s;
}

VD RandomSimplex(std::mt19937_64& rng, int k) {
  std::gamma_distribution<double> g(1.0, 1.0);
  VD v(k);
  for (int i = 0; i < k; ++i) v(i) = g(rng) + 1e-3;
  return v / v.sum();
}

}  // namespace

TEST_CASE("cross entropy closed forms", "[losses]") {
  VD p = V({1, 0, 0, 0, 0});
  CHECK(LossCls<double>(p, p) <= 1e-7);
  CHECK(LossCls<double>(VD::Constant(5, 0.2), p) == Approx(std::log(5.0)).margin(1e-12));
  CHECK(LossCls<double>(V({0.5, 0.5, 0, 0, 0}), p) == Approx(std::log(2.0)).margin(1e-12));
  CHECK_THROWS_AS(LossCls<double>(VD::Constant(4, 0.25), p), Error);
}

TEST_CASE("printed strength loss examples", "[losses]") {
  StrengthMargins m;
  CHECK(LossStr(0.8, 0.7, 0.1, m) == Approx(1.0).margin(1e-12));
  CHECK(LossStr(1.0, 1.0, 0.0, m) == Approx(1.0).margin(1e-12));
  CHECK(LossStr(0.0, 1.0, 1.0, m) == Approx(3.0).margin(1e-12));
  // Hinge form subtracts the margins and floors at zero.
  CHECK(LossStr(0.8, 0.7, 0.1, m, StrengthLossForm::kHinge) == Approx(0.0).margin(1e-12));
  CHECK(LossStr(0.0, 1.0, 1.0, m, StrengthLossForm::kHinge) == Approx(2.0).margin(1e-12));
}

TEST_CASE("strength loss floor and symmetry", "[losses][property]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  StrengthMargins m;
  for (int i = 0; i < 2000; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const double l = LossStr(a, b, c, m);
    CHECK(l >= m.delta1 + m.delta2 - 1e-12);
    // Swapping s_x and s_pos leaves the first term unchanged.
    const double first = std::max(std::abs(a - b), m.delta1);
    CHECK(std::max(std::abs(b - a), m.delta1) == first);
    const bool at_floor = std::abs(a - b) <= m.delta1 && a - c >= 1 - m.delta2;
    CHECK((std::abs(l - (m.delta1 + m.delta2)) < 1e-12) == at_floor);
  }
}

TEST_CASE("frame similarity hand cases", "[losses]") {
  MD e(2, 2), c(2, 2);
  e << 1, 1, 1, 0;
  c << 1, -1, -1, 0;
  VD s = FrameSimilarity<double>(e, c);
  CHECK(s(0) == Approx(0.0).margin(1e-12));
  CHECK(s(1) == Approx(1.0).margin(1e-7));
  CHECK(FrameSimilarity<double>(e, e)(0) == Approx(1.0).margin(1e-7));
  CHECK_THROWS_AS(FrameSimilarity<double>(e, MD::Ones(3, 2)), Error);
  // Zero frames give zero similarity, not NaN.
  CHECK(FrameSimilarity<double>(MD::Zero(1, 2), MD::Ones(1, 2))(0) == 0.0);
}

TEST_CASE("disentanglement loss", "[losses]") {
  CHECK(LossDis<double>(V({1, 0.5}), V({0.4, 0.8})) == Approx(0.4).margin(1e-12));
  CHECK(LossDis<double>(V({1, 1}), V({0, 0})) == 0.0);
  CHECK(LossDis<double>(V({0, 0}), V({0.3, 0.9})) == 0.0);
  CHECK_THROWS_AS(LossDis<double>(V({1}), V({1, 2})), Error);
}

TEST_CASE("disentanglement loss is monotone in S", "[losses][property]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    VD m = VD::NullaryExpr(6, [&] { return u(rng); });
    VD s = VD::NullaryExpr(6, [&] { return u(rng); });
    VD s2 = s;
    s2(i % 6) += u(rng);
    CHECK(LossDis<double>(m, s2) >= LossDis<double>(m, s));
  }
}

TEST_CASE("L1 reconstruction and content consistency", "[losses]") {
  MD out(2, 2), target = MD::Ones(2, 2);
  out << 0, 1, 2, 3;
  CHECK(LossRec<double>(out, target) == Approx(1.0).margin(1e-12));
  CHECK(LossCc<double>(out, target) == Approx(1.0).margin(1e-12));
  CHECK(LossRec<double>(target, target) == 0.0);
  CHECK(LossRec<double>((target.array() + 1).matrix(), target) == Approx(1.0));
  CHECK_THROWS_AS(LossRec<double>(out, MD::Ones(3, 2)), Error);
}

TEST_CASE("emotion consistency KL", "[losses]") {
  VD y = V({1, 0, 0, 0, 0});
  CHECK(LossEcc<double>(y, y) == Approx(0.0).margin(1e-12));
  CHECK(LossEcc<double>(y, VD::Constant(5, 0.2)) == Approx(std::log(5.0)).margin(1e-9));
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    VD a = RandomSimplex(rng, 5), b = RandomSimplex(rng, 5);
    CHECK(LossEcc<double>(a, b) >= -1e-12);
    CHECK(LossEcc<double>(a, a) == Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("strength consistency", "[losses]") {
  CHECK(LossEsc(0.5, 0.5) == 0.0);
  CHECK(LossEsc(1.0, 0.0) == 1.0);
  CHECK(LossEsc(0.7, 0.4) == Approx(0.09).margin(1e-12));
}

TEST_CASE("weighted totals", "[losses]") {
  CHECK(StageITotal({1, 1, 1, 1}, {}) == Approx(3.2).margin(1e-12));
  CHECK(StageITotal({0, 0, 0, 0}, {}) == 0.0);
  try {
    StageITotal({0, 0, std::nan(""), 0}, {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNumeric);
    CHECK(std::string(e.what()).find("dis") != std::string::npos);
  }
  CHECK(StageIITotal({1, 1, 1, 1}, {}) == Approx(1.0006).margin(1e-12));
  CHECK(StageIITotal({0.7, 5, 5, 5}, {0.0}) == 0.7);
  CHECK_THROWS_AS(StageIITotal({1, INFINITY, 0, 0}, {}), Error);
}

TEST_CASE("losses are nonnegative on random inputs", "[losses][property]") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    VD q = RandomSimplex(rng, 5), p = VD::Zero(5);
    p(i % 5) = 1;
    std::vector<double> qv(q.data(), q.data() + 5), pv(p.data(), p.data() + 5);
    CHECK(LossCls<double>(q, p) == Approx(RefCls(qv, pv)).margin(1e-12));
    CHECK(LossCls<double>(q, p) >= 0);
    VD q2 = RandomSimplex(rng, 5);
    std::vector<double> q2v(q2.data(), q2.data() + 5);
    CHECK(LossEcc<double>(q, q2) == Approx(RefKl(qv, q2v)).margin(1e-12));
    MD e = MD::NullaryExpr(4, 3, [&] { return n(rng); });
    MD c = MD::NullaryExpr(4, 3, [&] { return n(rng); });
    VD s = FrameSimilarity<double>(e, c);
    CHECK(s.minCoeff() >= 0);
    CHECK(s.maxCoeff() <= 1);
    CHECK(LossDis<double>(VD::NullaryExpr(4, [&] { return u(rng); }), s) >= 0);
    CHECK(LossStr(u(rng), u(rng), u(rng), StrengthMargins{}, StrengthLossForm::kHinge) >= 0);
  }
}
