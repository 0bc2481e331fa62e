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


#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "drf/convex_space.hpp"
#include "drf/errors.hpp"
#include "drf/obstacle.hpp"

namespace drf {
namespace {

constexpr double kPi = std::numbers::pi;

// Independent geometry helpers for the audits below.
std::array<Vec2, 4> box_corners(const Vec2& c, double heading, double length, double width) {
  const Vec2 ex(std::cos(heading), std::sin(heading));
  const Vec2 ey(-std::sin(heading), std::cos(heading));
  const double hl = 0.5 * length, hw = 0.5 * width;
  return {c + hl * ex + hw * ey, c - hl * ex + hw * ey, c - hl * ex - hw * ey,
          c + hl * ex - hw * ey};
}

double point_box_distance(const Vec2& p, const ObstacleVehicle& o) {
  const Vec2 d = p - o.position();
  const double lx = std::cos(o.theta) * d.x() + std::sin(o.theta) * d.y();
  const double ly = -std::sin(o.theta) * d.x() + std::cos(o.theta) * d.y();
  const double ox = std::max(0.0, std::abs(lx) - 0.5 * o.body_length);
  const double oy = std::max(0.0, std::abs(ly) - 0.5 * o.body_width);
  return std::hypot(ox, oy);
}

// Largest margin along the region axes and the obstacle axes.
double axis_gap(double xl, double xu, double yl, double yu, const ObstacleVehicle& o) {
  const std::array<Vec2, 4> rc = {Vec2(xl, yl), Vec2(xu, yl), Vec2(xu, yu), Vec2(xl, yu)};
  const auto oc = box_corners(o.position(), o.theta, o.body_length, o.body_width);
  const Vec2 ex(std::cos(o.theta), std::sin(o.theta)), ey(-std::sin(o.theta), std::cos(o.theta));
  double best = -1e300;
  for (const Vec2& n : {Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1), ex, Vec2(-ex), ey,
                        Vec2(-ey)}) {
    double a = -1e300, b = 1e300;
    for (const Vec2& p : rc) a = std::max(a, n.dot(p));
    for (const Vec2& q : oc) b = std::min(b, n.dot(q));
    best = std::max(best, b - a);
  }
  return best;
}

bool certificate_holds(const Certificate& c, const ConvexRegion& r, const ObstacleVehicle& o,
                       double delta) {
  const std::array<Vec2, 4> rc = {Vec2(r.x_lower, r.y_lower), Vec2(r.x_upper, r.y_lower),
                                  Vec2(r.x_upper, r.y_upper), Vec2(r.x_lower, r.y_upper)};
  for (const Vec2& p : rc) {
    if (c.normal.dot(p) > c.offset + 1e-12) return false;
  }
  for (const Vec2& q : box_corners(o.position(), o.theta, o.body_length, o.body_width)) {
    if (c.normal.dot(q) < c.offset + delta - 1e-12) return false;
  }
  return true;
}

ObstacleVehicle obstacle(int id, double x, double y, double theta, double v, double length,
                         double width) {
  ObstacleVehicle o;
  o.id = id;
  o.x = x;
  o.y = y;
  o.theta = theta;
  o.v = v;
  o.body_length = length;
  o.body_width = width;
  return o;
}

ConvexRegion rect(double xl, double xu, double yl, double yu) {
  ConvexRegion r;
  r.x_lower = xl;
  r.x_upper = xu;
  r.y_lower = yl;
  r.y_upper = yu;
  return r;
}

TEST(GrowthTensor, Values) {
  const GrowthParams p;
  const Eigen::Matrix2d g0 = growth_tensor({0, 0, 0.0, 0.0, 0, 0}, 0.0, p);
  EXPECT_TRUE(g0.isApprox(p.gamma_0 * Eigen::Matrix2d::Identity(), 1e-15));
  const Eigen::Matrix2d g1 = growth_tensor({0, 0, 0.0, kPi / 2.0, 0, 0}, 0.0, p);
  Eigen::Matrix2d expect;
  expect << 0.0, -1.0, 1.0, 0.0;
  EXPECT_LT((g1 - p.gamma_0 * expect).cwiseAbs().maxCoeff(), 1e-14);
  const Eigen::Matrix2d g2 = growth_tensor({0, 0, 1e9, 0.0, 0, 0}, 0.0, p);
  EXPECT_NEAR(g2(0, 0), p.alpha_max * p.gamma_0, 1e-12);
  const Eigen::Matrix2d g3 = growth_tensor({0, 0, 0.0, 0.0, 0, 0}, 2.0, p);
  EXPECT_NEAR(g3(0, 0), p.gamma_0 * std::exp(-p.lambda * 2.0), 1e-14);
  EXPECT_THROW(growth_tensor({}, -1.0, p), ParameterError);
}

TEST(InitRegion, BoundingBox) {
  const VehicleGeometry g;
  const ConvexRegion r = init_region({}, g, 0.0);
  EXPECT_NEAR(r.x_lower, -2.25, 1e-15);
  EXPECT_NEAR(r.x_upper, 2.25, 1e-15);
  EXPECT_NEAR(r.y_lower, -0.9, 1e-15);
  EXPECT_NEAR(r.y_upper, 0.9, 1e-15);
  const ConvexRegion m = init_region({}, g, 0.5);
  EXPECT_NEAR(m.x_lower, -2.75, 1e-15);
  EXPECT_NEAR(m.y_upper, 1.4, 1e-15);
  const VehicleState s{12.0, -3.0, 5.0, 0.7, 0.0, 0.0};
  EXPECT_TRUE(contains(init_region(s, g, 0.3), s.position()));
}

TEST(Contains, ClosedSet) {
  const ConvexRegion r = rect(0.0, 2.0, -1.0, 1.0);
  EXPECT_TRUE(contains(r, Vec2(1.0, 0.0)));
  EXPECT_TRUE(contains(r, Vec2(2.0, 1.0)));
  EXPECT_FALSE(contains(r, Vec2(2.0 + 1e-9, 0.0)));
}

TEST(SeparatingCertificate, AxisAlignedGap) {
  const ConvexRegion r = rect(0.0, 1.0, 0.0, 1.0);
  const ObstacleVehicle o = obstacle(1, 3.5, 0.5, 0.0, 0.0, 1.0, 1.0);
  const auto c = separating_certificate(r, o.footprint(), 0.5);
  ASSERT_TRUE(c.has_value());
  EXPECT_NEAR(c->normal.x(), 1.0, 1e-15);
  EXPECT_NEAR(c->normal.y(), 0.0, 1e-15);
  EXPECT_GE(c->offset, 1.0 - 1e-12);
  EXPECT_LE(c->offset, 2.5 + 1e-12);
  EXPECT_TRUE(certificate_holds(*c, r, o, 0.5));
}

TEST(SeparatingCertificate, OverlapAndExactMargin) {
  const ConvexRegion r = rect(0.0, 1.0, 0.0, 1.0);
  EXPECT_FALSE(separating_certificate(r, obstacle(1, 1.2, 0.5, 0.3, 0, 1.0, 1.0).footprint(), 0.5));
  const ObstacleVehicle o = obstacle(1, 2.0, 0.5, 0.0, 0.0, 1.0, 1.0);  // gap exactly 0.5
  const auto c = separating_certificate(r, o.footprint(), 0.5);
  ASSERT_TRUE(c.has_value());
  EXPECT_NEAR(c->offset, 1.0, 1e-12);
  EXPECT_TRUE(certificate_holds(*c, r, o, 0.5));
}

TEST(SeparatingCertificate, PropertyInequalitiesHold) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(-10.0, 10.0), ang(-kPi, kPi), len(0.5, 5.0);
  int found = 0;
  for (int i = 0; i < 2000; ++i) {
    const double x = pos(rng), y = pos(rng);
    const ConvexRegion r = rect(x, x + len(rng), y, y + len(rng));
    const ObstacleVehicle o = obstacle(1, pos(rng), pos(rng), ang(rng), 0.0, len(rng), len(rng));
    const auto c = separating_certificate(r, o.footprint(), 0.5);
    const double gap = axis_gap(r.x_lower, r.x_upper, r.y_lower, r.y_upper, o);
    EXPECT_EQ(c.has_value(), gap >= 0.5 - 1e-12);
    if (c) {
      ++found;
      EXPECT_TRUE(certificate_holds(*c, r, o, 0.5));
    }
  }
  EXPECT_GT(found, 100);
}

TEST(Grow, ZeroDtUnchanged) {
  const ConvexRegion r = rect(-1.0, 1.0, -1.0, 1.0);
  const ConvexRegion g = grow(r, {0, 0, 5.0, 0.0, 0, 0}, 0.0, 0.0, {}, CorridorSetup{});
  EXPECT_EQ(g.x_lower, r.x_lower);
  EXPECT_EQ(g.x_upper, r.x_upper);
  EXPECT_EQ(g.y_lower, r.y_lower);
  EXPECT_EQ(g.y_upper, r.y_upper);
}

TEST(Grow, ObstacleFreeStrictlyContains) {
  const ConvexRegion r = rect(-1.0, 1.0, -1.0, 1.0);
  const ConvexRegion g = grow(r, {0, 0, 5.0, 0.0, 0, 0}, 0.0, 0.1, {}, CorridorSetup{});
  EXPECT_LT(g.x_lower, r.x_lower);
  EXPECT_GT(g.x_upper, r.x_upper);
  EXPECT_LT(g.y_lower, r.y_lower);
  EXPECT_GT(g.y_upper, r.y_upper);
  EXPECT_NEAR(g.t, 0.1, 1e-15);
}

TEST(Grow, StateOutsideThrows) {
  EXPECT_THROW(grow(rect(0, 1, 0, 1), {5, 5, 0, 0, 0, 0}, 0.0, 0.1, {}, CorridorSetup{}),
               InfeasibleSeedError);
}

TEST(Grow, ObstacleClampMatchesBruteForce) {
  // Near edge 1.0 m to the right of x_upper; large dt so growth passes it.
  const ConvexRegion r = rect(0.0, 1.0, 0.0, 1.0);
  const ObstacleVehicle o = obstacle(1, 2.5, 0.5, 0.0, 0.0, 1.0, 2.0);
  const std::vector<ObstacleVehicle> obs{o};
  CorridorSetup setup;
  const ConvexRegion g = grow(r, {0.5, 0.5, 0.0, 0.0, 0, 0}, 0.0, 1.0, obs, setup);
  EXPECT_NEAR(g.x_upper, 2.0 - 0.5, 1e-6);
  // Brute force: largest x_upper (1 mm steps) whose rectangle still admits a
  // separating axis with margin delta_safe, other faces as grown.
  double best = -1e300;
  for (int i = 0; i <= 20000; ++i) {
    const double xu = 1.0 + 1e-3 * i;
    if (axis_gap(g.x_lower, xu, g.y_lower, g.y_upper, o) >= 0.5) best = xu;
  }
  EXPECT_NEAR(g.x_upper, best, 1e-3);
  for (const auto& c : g.certificates) EXPECT_TRUE(certificate_holds(c, g, o, 0.5));
}

TEST(Grow, RoadClip) {
  CorridorSetup setup;
  setup.road.y_min = -1.75;
  setup.road.y_max = 5.25;
  setup.host_extent = Vec2(2.25, 0.9);
  ConvexRegion r = rect(-3.0, 3.0, -0.8, 0.8);
  for (int k = 0; k < 50; ++k) r = grow(r, {0, 0, 10.0, 0.0, 0, 0}, 0.1 * k, 0.1, {}, setup);
  EXPECT_NEAR(r.y_lower, -1.75 + 0.9, 1e-12);
  EXPECT_NEAR(r.y_upper, 5.25 - 0.9, 1e-12);
}

TEST(KinematicFeasible, Cases) {
  const VehicleGeometry g;
  const KinematicLimits lim;
  std::vector<PathSample> straight;
  for (int i = 0; i < 20; ++i) straight.push_back({0.1 * i, 1.0 * i, 0.0});
  EXPECT_TRUE(kinematic_feasible(straight, lim, g).feasible);

  // Arc tighter than the minimum turning radius, at low speed.
  const double radius = 0.8 * g.wheelbase / std::tan(lim.phi_max);
  std::vector<PathSample> arc;
  for (int i = 0; i < 20; ++i) {
    const double a = 0.02 * i;
    arc.push_back({0.1 * i, radius * std::sin(a), radius * (1.0 - std::cos(a))});
  }
  KinematicLimits loose = lim;
  loose.omega_max = 1e9;
  const auto c = kinematic_feasible(arc, loose, g);
  EXPECT_FALSE(c.feasible);
  EXPECT_EQ(c.violation, KinematicViolation::kCurvature);
  EXPECT_NEAR(c.value, 1.0 / radius, 1e-6);

  std::vector<PathSample> fast = straight;
  for (int i = 8; i < 20; ++i) fast[i].x += 5.0;  // segment 7 jumps
  const auto f = kinematic_feasible(fast, lim, g);
  EXPECT_FALSE(f.feasible);
  EXPECT_EQ(f.violation, KinematicViolation::kSpeed);
  EXPECT_EQ(f.index, 7);

  EXPECT_THROW(kinematic_feasible(std::span(straight).first(2), lim, g), ParameterError);
}

std::vector<std::vector<ObstacleVehicle>> empty_predictions(int n) {
  return std::vector<std::vector<ObstacleVehicle>>(n + 1);
}

TEST(GenerateCorridor, ZeroHorizon) {
  const VehicleGeometry g;
  const VehicleState x0{0, 0, 10.0, 0.0, 0, 0};
  CorridorSetup setup;
  const auto c = generate_corridor(x0, 0, 0.1, empty_predictions(0), setup, g);
  ASSERT_EQ(c.size(), 1u);
  const ConvexRegion r = init_region(x0, g, setup.growth.init_margin);
  EXPECT_EQ(c[0].x_lower, r.x_lower);
  EXPECT_EQ(c[0].y_upper, r.y_upper);
}

TEST(GenerateCorridor, ObstacleFreeClosedForm) {
  const VehicleGeometry g;
  const VehicleState x0{0, 0, 10.0, 0.0, 0, 0};
  const CorridorSetup setup;
  const int N = 10;
  const auto c = generate_corridor(x0, N, 0.1, empty_predictions(N), setup, g);
  ASSERT_EQ(c.size(), static_cast<std::size_t>(N + 1));
  // tools/oracles/derive_values.py, "corridor growth after 10 steps".
  EXPECT_NEAR(c[N].x_upper - c[0].x_upper, 8.2600655382416761, 1e-12);
  double prev_step = 1e300;
  for (int k = 1; k <= N; ++k) {
    EXPECT_GE(c[k].area(), c[k - 1].area());
    const double inc = c[k].x_upper - c[k - 1].x_upper;
    if (k > 1) EXPECT_NEAR(inc / prev_step, std::exp(-setup.growth.lambda * 0.1), 1e-12);
    prev_step = inc;
  }
}

TEST(GenerateCorridor, PropertyNestedAndBounded) {
  const VehicleGeometry g;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ang(-kPi, kPi), v(0.0, 30.0);
  const CorridorSetup setup;
  for (int trial = 0; trial < 20; ++trial) {
    const VehicleState x0{0, 0, v(rng), ang(rng), 0, 0};
    const int N = 300;
    const auto c = generate_corridor(x0, N, 0.1, empty_predictions(N), setup, g);
    for (int k = 1; k <= N; ++k) {
      ASSERT_LE(c[k].x_lower, c[k - 1].x_lower);
      ASSERT_GE(c[k].x_upper, c[k - 1].x_upper);
      ASSERT_LE(c[k].y_lower, c[k - 1].y_lower);
      ASSERT_GE(c[k].y_upper, c[k - 1].y_upper);
    }
    // Lambda(theta) is a rotation, so |Lambda n| = 1 for every face normal.
    const double bound = setup.growth.alpha_max * setup.growth.gamma_0 / setup.growth.lambda;
    EXPECT_LE(c[N].x_upper - c[0].x_upper, bound);
    EXPECT_LE(c[0].x_lower - c[N].x_lower, bound);
    EXPECT_LE(c[N].y_upper - c[0].y_upper, bound);
    EXPECT_LE(c[0].y_lower - c[N].y_lower, bound);
  }
}

void audit(const std::vector<ConvexRegion>& corridor,
           const std::vector<std::vector<ObstacleVehicle>>& predictions, double delta) {
  for (std::size_t k = 0; k < corridor.size(); ++k) {
    const ConvexRegion& r = corridor[k];
    ASSERT_TRUE(r.valid());
    for (const auto& o : predictions[k]) {
      double worst = 1e300;
      for (double x = r.x_lower; x <= r.x_upper + 1e-9; x += 0.05) {
        for (double y = r.y_lower; y <= r.y_upper + 1e-9; y += 0.05) {
          worst = std::min(worst, point_box_distance(Vec2(std::min(x, r.x_upper),
                                                          std::min(y, r.y_upper)), o));
        }
      }
      EXPECT_GE(worst, delta) << "step " << k << " obstacle " << o.id;
      for (const auto& c : r.certificates) {
        if (c.obstacle_id == o.id) EXPECT_TRUE(certificate_holds(c, r, o, delta));
      }
    }
  }
}

TEST(GenerateCorridor, ObstacleAheadClampsFrontFace) {
  const VehicleGeometry g;
  const VehicleState x0{0, 0, 10.0, 0.0, 0, 0};
  CorridorSetup setup;
  setup.road.y_min = -1.75;
  setup.road.y_max = 5.25;
  setup.host_extent = Vec2(2.25, 0.9);
  setup.host_length = g.body_length;
  setup.host_width = g.body_width;
  ObstacleVehicle lead = obstacle(7, 15.0, 0.0, 0.0, 6.0, 4.5, 1.8);
  const int N = 30;
  const auto pred = predict_obstacles({lead}, N, 0.1);
  const auto c = generate_corridor(x0, N, 0.1, pred, setup, g);
  audit(c, pred, setup.growth.delta_safe);
  // The lead stays in front and it is cheaper to cut x than both y faces.
  for (int k = 10; k <= N; ++k) {
    const double rear = pred[k][0].x - 0.5 * lead.body_length;
    EXPECT_LT(c[k].x_upper, rear);
  }
  EXPECT_GT(c[N].y_upper, c[10].y_upper - 1e-12);
  EXPECT_LT(c[N].y_lower, c[0].y_lower + 1e-12);
}

TEST(GenerateCorridor, PropertySafetyAuditRandom) {
  const VehicleGeometry g;
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> ang(-0.3, 0.3), dx(8.0, 40.0), lat(-4.0, 8.0),
      v(0.0, 15.0);
  int built = 0;
  for (int trial = 0; trial < 15; ++trial) {
    const VehicleState x0{0, 0, 10.0, 0.0, 0, 0};
    CorridorSetup setup;
    setup.road.y_min = -1.75;
    setup.road.y_max = 8.75;
    setup.host_extent = host_extent(g, 0.0, 0.2);
    setup.host_length = g.body_length;
    setup.host_width = g.body_width;
    setup.heading_spread = 0.2;
    std::vector<ObstacleVehicle> obs;
    for (int i = 0; i < 3; ++i) obs.push_back(obstacle(i + 1, dx(rng), lat(rng), ang(rng), v(rng), 4.5, 1.8));
    const auto pred = predict_obstacles(obs, 20, 0.1);
    try {
      const auto c = generate_corridor(x0, 20, 0.1, pred, setup, g);
      ++built;
      audit(c, pred, setup.growth.delta_safe);
    } catch (const InfeasibleSeedError&) {
    }
  }
  EXPECT_GT(built, 5);
}

TEST(GenerateCorridor, OverlappingStartThrows) {
  const VehicleGeometry g;
  const VehicleState x0{0, 0, 10.0, 0.0, 0, 0};
  CorridorSetup setup;
  setup.host_length = g.body_length;
  setup.host_width = g.body_width;
  const auto pred = predict_obstacles({obstacle(1, 1.0, 0.5, 0.0, 10.0, 4.5, 1.8)}, 5, 0.1);
  EXPECT_THROW(generate_corridor(x0, 5, 0.1, pred, setup, g), InfeasibleSeedError);
}

TEST(GrowthParams, Validation) {
  GrowthParams p;
  EXPECT_NO_THROW(validate(p));
  p.alpha_max = 0.5;
  EXPECT_THROW(validate(p), ParameterError);
  p = GrowthParams{};
  p.delta_safe = 0.0;
  EXPECT_THROW(validate(p), ParameterError);
}

}  // namespace
}  // namespace drf
