// Copyright 2026 The DRF Planner Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "drf/errors.hpp"
#include "drf/risk_field.hpp"
#include "oracles/finite_difference.hpp"

namespace drf {
namespace {

ObstacleVehicle obstacle(double x, double y, double theta, double v) {
  ObstacleVehicle o;
  o.x = x;
  o.y = y;
  o.theta = theta;
  o.v = v;
  return o;
}

TEST(ObstacleFrame, Rotations) {
  const ObstacleVehicle a = obstacle(3.0, -1.0, 0.0, 0.0);
  const Vec2 d0 = to_obstacle_frame(a.position() + Vec2(2.0, 1.0), a);
  EXPECT_NEAR(d0.x(), 2.0, 1e-15);
  EXPECT_NEAR(d0.y(), 1.0, 1e-15);
  const ObstacleVehicle b = obstacle(3.0, -1.0, std::numbers::pi / 2.0, 0.0);
  const Vec2 d1 = to_obstacle_frame(b.position() + Vec2(1.0, 0.0), b);
  EXPECT_NEAR(d1.x(), 0.0, 1e-15);
  EXPECT_NEAR(d1.y(), -1.0, 1e-15);
  // tools/oracles/derive_values.py, "frame".
  const ObstacleVehicle c = obstacle(3.0, -1.0, 0.3, 0.0);
  const Vec2 d2 = to_obstacle_frame(c.position() + Vec2(2.0, 1.0), c);
  EXPECT_NEAR(d2.x(), 2.2061931849125516, 1e-14);
  EXPECT_NEAR(d2.y(), 0.36429607580292687, 1e-14);
}

TEST(StaticRisk, PeakAndOneSigma) {
  RiskFieldParams p;
  const ObstacleVehicle o = obstacle(4.0, 2.0, 0.0, 5.0);
  EXPECT_EQ(static_risk(o.position(), o, p), p.A_s);
  p.beta = 1.0;
  EXPECT_NEAR(static_risk(o.position() + Vec2(p.sigma_x, 0.0), o, p), 0.36787944117144232 * p.A_s,
              1e-12);
  EXPECT_LT(static_risk(o.position() + Vec2(50.0 * p.sigma_x, 0.0), o, p), 1e-12 * p.A_s);
}

TEST(StaticRisk, PropertyRigidMotionEquivariance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-30.0, 30.0), ang(-3.1, 3.1), off(-8.0, 8.0);
  const RiskFieldParams p;
  for (int i = 0; i < 500; ++i) {
    const ObstacleVehicle o = obstacle(pos(rng), pos(rng), ang(rng), 5.0);
    const Vec2 q = o.position() + Vec2(off(rng), off(rng));
    const double r = ang(rng);
    const Vec2 shift(pos(rng), pos(rng));
    const Eigen::Matrix2d rot = Eigen::Rotation2Dd(r).toRotationMatrix();
    ObstacleVehicle moved = o;
    const Vec2 c = rot * o.position() + shift;
    moved.x = c.x();
    moved.y = c.y();
    moved.theta = o.theta + r;
    EXPECT_NEAR(static_risk(rot * q + shift, moved, p), static_risk(q, o, p), 1e-12);
  }
}

TEST(StaticRisk, PropertyBetaThinsTails) {
  RiskFieldParams p;
  const ObstacleVehicle o = obstacle(0.0, 0.0, 0.2, 0.0);
  for (double off : {1.2, 1.5, 2.0, 3.0}) {
    const Vec2 q = o.position() + Vec2(std::cos(0.2), std::sin(0.2)) * off * p.sigma_x;
    double prev = 2.0;
    for (double beta : {0.5, 1.0, 1.5, 2.0, 3.0}) {
      p.beta = beta;
      const double r = static_risk(q, o, p);
      EXPECT_LT(r, prev);
      prev = r;
    }
  }
}

TEST(DynamicRisk, ZeroAmplitude) {
  RiskFieldParams p;
  p.A_d = 0.0;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  const ObstacleVehicle o = obstacle(1.0, 1.0, 0.3, 12.0);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(dynamic_risk(Vec2(d(rng), d(rng)), o, 8.0, p), 0.0);
}

TEST(DynamicRisk, CenterValueAndAsymmetry) {
  const RiskFieldParams p;
  const ObstacleVehicle o = obstacle(2.0, -3.0, 0.0, 12.0);
  // tools/oracles/derive_values.py, "dynamic at center, v_rel > 0".
  EXPECT_NEAR(dynamic_risk(o.position(), o, 10.0, p), 0.014388967969673246, 1e-15);
  const double front = dynamic_risk(o.position() + Vec2(2.0, 0.4), o, 10.0, p);
  const double back = dynamic_risk(o.position() + Vec2(-2.0, 0.4), o, 10.0, p);
  EXPECT_GT(front, back);
}

TEST(DynamicRisk, ZeroRelativeSpeedIsFinite) {
  const RiskFieldParams p;
  const ObstacleVehicle o = obstacle(0.0, 0.0, 0.0, 10.0);
  const double r = dynamic_risk(o.position(), o, 10.0, p);
  EXPECT_NEAR(r, 0.5 * p.A_d, 1e-15);
}

TEST(DynamicRisk, PropertyMirrorUnderVelocityFlip) {
  const RiskFieldParams p;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-12.0, 12.0), vr(-8.0, 8.0), ang(-3.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    const double theta = ang(rng);
    const double vrel = vr(rng);
    const double dx = d(rng), dy = 0.3 * d(rng);
    const Vec2 ex(std::cos(theta), std::sin(theta)), ey(-std::sin(theta), std::cos(theta));
    const ObstacleVehicle o = obstacle(1.0, 2.0, theta, 10.0 + vrel);
    const ObstacleVehicle m = obstacle(1.0, 2.0, theta, 10.0 - vrel);
    const double a = dynamic_risk(o.position() + dx * ex + dy * ey, o, 10.0, p);
    const double b = dynamic_risk(m.position() - dx * ex + dy * ey, m, 10.0, p);
    EXPECT_NEAR(a, b, 1e-12);
  }
}

TEST(DecayFactor, Values) {
  const Vec2 h(3.0, 4.0);
  EXPECT_EQ(decay_factor(h, h, 20.0), 1.0);
  EXPECT_NEAR(decay_factor(h + Vec2(12.0, 16.0), h, 20.0), 0.36787944117144232, 1e-15);
  EXPECT_LT(decay_factor(h + Vec2(40.0, 0.0), h, 20.0), decay_factor(h + Vec2(20.0, 0.0), h, 20.0));
}

TEST(TotalRisk, EmptyAndCoincident) {
  const RiskFieldParams p;
  const VehicleState host{1.0, 1.0, 10.0, 0.0, 0.0, 0.0};
  EXPECT_EQ(total_risk(host.position(), {}, host, p), 0.0);
  const std::vector<ObstacleVehicle> one{obstacle(1.0, 1.0, 0.4, 12.0)};
  EXPECT_NEAR(total_risk(host.position(), one, host, p),
              p.A_s + dynamic_risk(host.position(), one[0], host.v, p), 1e-15);
}

TEST(TotalRisk, IndependentEvaluation) {
  const RiskFieldParams p;
  const VehicleState host{0.0, 0.0, 10.0, 0.0, 0.0, 0.0};
  const std::vector<ObstacleVehicle> both{obstacle(3.0, 1.0, 0.4, 12.0),
                                          obstacle(9.0, -1.0, -0.2, 7.0)};
  const Vec2 q(5.0, 2.0);
  // tools/oracles/derive_values.py, "total_risk ...".
  EXPECT_NEAR(total_risk(q, std::span(both).first(1), host, p), 0.55241960437901702, 1e-14);
  EXPECT_NEAR(total_risk(q, std::span(both).last(1), host, p), 0.0087337570932982604, 1e-15);
  EXPECT_NEAR(total_risk(q, both, host, p), 0.56115336147231528, 1e-14);
}

TEST(TotalRisk, PropertyBounded) {
  const RiskFieldParams p;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> d(-20.0, 20.0), v(0.0, 20.0), ang(-3.0, 3.0);
  for (int i = 0; i < 300; ++i) {
    std::vector<ObstacleVehicle> obs;
    const int n = 1 + i % 4;
    for (int k = 0; k < n; ++k) obs.push_back(obstacle(d(rng), d(rng), ang(rng), v(rng)));
    const VehicleState host{d(rng), d(rng), v(rng), 0.0, 0.0, 0.0};
    const double r = total_risk(Vec2(d(rng), d(rng)), obs, host, p);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, n * (p.A_s + p.A_d));
  }
}

TEST(RiskGradient, TrivialCases) {
  RiskFieldParams p;
  const VehicleState host{0.0, 0.0, 10.0, 0.0, 0.0, 0.0};
  EXPECT_EQ(risk_gradient(Vec2(1.0, 2.0), {}, host, p), Vec2::Zero());
  // Static lobe only, decay frozen at 1 by a huge decay length.
  p.A_d = 1e-300;
  p.d_e = 1e300;
  const std::vector<ObstacleVehicle> one{obstacle(5.0, 1.0, 0.7, 3.0)};
  const Vec2 g = risk_gradient(one[0].position(), one, host, p);
  EXPECT_NEAR(g.norm(), 0.0, 1e-15);
}

TEST(RiskGradient, PropertyMatchesFiniteDifferences) {
  std::mt19937_64 rng(20260202);
  std::uniform_real_distribution<double> d(-15.0, 15.0), v(0.0, 20.0), ang(-3.0, 3.0),
      off(-6.0, 6.0), beta(0.5, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    RiskFieldParams p;
    p.beta = beta(rng);
    std::vector<ObstacleVehicle> obs;
    const int n = 1 + i % 3;
    for (int k = 0; k < n; ++k) obs.push_back(obstacle(d(rng), d(rng), ang(rng), v(rng)));
    const RiskAnchor anchor{Vec2(d(rng), d(rng)), v(rng)};
    const Vec2 q = obs[0].position() + Vec2(off(rng), off(rng));
    const Vec2 g = risk_gradient(q, obs, anchor, p);
    const Vec2 fd = oracles::central_gradient<2>(
        [&](const Vec2& x) { return total_risk(x, obs, anchor, p); }, q, 1e-5);
    // Relative to the gradient scale; components far below it carry only
    // finite-difference noise.
    const double scale = std::max(fd.norm(), 1e-8);
    worst = std::max(worst, (g - fd).norm() / scale);
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(RiskGrid, Shapes) {
  const RiskFieldParams p;
  const RiskAnchor anchor{Vec2(0.0, 0.0), 10.0};
  const std::vector<ObstacleVehicle> obs{obstacle(3.0, 0.5, 0.1, 12.0)};
  const RiskGrid single = risk_grid({1.0, 1.0 + 1e-12, 2.0, 2.0 + 1e-12}, 1.0, obs, anchor, p);
  ASSERT_EQ(single.nx, 1);
  ASSERT_EQ(single.ny, 1);
  EXPECT_EQ(single.at(0, 0), total_risk(Vec2(1.0, 2.0), obs, anchor, p));
  const RiskGrid empty = risk_grid({-5.0, 5.0, -5.0, 5.0}, 0.5, {}, anchor, p);
  for (double v : empty.values) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(risk_grid({0.0, 0.0, 0.0, 1.0}, 0.5, obs, anchor, p), ParameterError);
  EXPECT_THROW(risk_grid({0.0, 1.0, 0.0, 1.0}, 0.0, obs, anchor, p), ParameterError);
}

TEST(RiskGrid, PeakMatchesDenseScan) {
  const RiskFieldParams p;
  const RiskAnchor anchor{Vec2(0.0, 0.0), 10.0};
  const std::vector<ObstacleVehicle> obs{obstacle(6.0, 1.0, 0.2, 14.0)};
  const GridBounds b{-5.0, 20.0, -8.0, 10.0};
  const RiskGrid coarse = risk_grid(b, 0.1, obs, anchor, p);
  int best = 0;
  for (int i = 1; i < static_cast<int>(coarse.values.size()); ++i) {
    if (coarse.values[i] > coarse.values[best]) best = i;
  }
  const Vec2 peak(b.x_min + (best % coarse.nx) * 0.1, b.y_min + (best / coarse.nx) * 0.1);
  // Brute-force scan at twice the resolution, written independently.
  double dense_max = -1.0;
  Vec2 dense_peak;
  for (double x = b.x_min; x <= b.x_max + 1e-9; x += 0.05) {
    for (double y = b.y_min; y <= b.y_max + 1e-9; y += 0.05) {
      const double r = total_risk(Vec2(x, y), obs, anchor, p);
      if (r > dense_max) {
        dense_max = r;
        dense_peak = Vec2(x, y);
      }
    }
  }
  EXPECT_LT((peak - dense_peak).norm(), 0.15);
  EXPECT_NEAR(coarse.values[best], dense_max, 1e-3 * dense_max);
}

TEST(RiskParams, Validation) {
  RiskFieldParams p;
  EXPECT_NO_THROW(validate(p));
  p.sigma_x = -1.0;
  EXPECT_THROW(validate(p), ParameterError);
  p = RiskFieldParams{};
  p.beta = 0.4;
  EXPECT_THROW(validate(p), ParameterError);
}

}  // namespace
}  // namespace drf
