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
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "drf/config.hpp"
#include "drf/errors.hpp"
#include "drf/io.hpp"
#include "drf/simulation.hpp"

namespace drf {
namespace {

RunConfig nominal() {
  return to_run_config(load_config(std::string(DRF_CONFIG_DIR) + "/lane_change_nominal.ini"));
}

ObstacleVehicle straight_obstacle(double x, double y, double theta, double v) {
  ObstacleVehicle o;
  o.id = 1;
  o.x = x;
  o.y = y;
  o.theta = theta;
  o.v = v;
  return o;
}

TEST(AdvanceObstacles, Straight) {
  const auto next = advance_obstacles({straight_obstacle(1.0, 2.0, 0.0, 10.0)}, 0.0, 0.1);
  ASSERT_EQ(next.size(), 1u);
  EXPECT_NEAR(next[0].x, 2.0, 1e-14);
  EXPECT_EQ(next[0].y, 2.0);
  EXPECT_EQ(next[0].v, 10.0);
  const auto diag = advance_obstacles({straight_obstacle(0.0, 0.0, std::numbers::pi / 4, 2.0)}, 3.0, 0.5);
  EXPECT_NEAR(diag[0].x, std::sqrt(0.5), 1e-14);
  EXPECT_NEAR(diag[0].y, std::sqrt(0.5), 1e-14);
}

TEST(AdvanceObstacles, ArcAndZeroStep) {
  ObstacleVehicle o = straight_obstacle(20.0, 0.0, std::numbers::pi / 2, 8.0);
  o.motion = ArcMotion{Vec2(0.0, 0.0), 20.0, 0.4};
  const auto next = advance_obstacles({o}, 0.0, 0.1);
  EXPECT_NEAR(next[0].x, 19.984002133219559, 1e-12);
  EXPECT_NEAR(next[0].y, 0.79978668373268319, 1e-12);
  EXPECT_NEAR(next[0].theta, 1.6107963267948966, 1e-12);
  const auto same = advance_obstacles({o}, 0.0, 0.0);
  EXPECT_EQ(same[0].x, o.x);
  EXPECT_EQ(same[0].y, o.y);
}

TEST(AdvanceObstacles, PropertyArcStaysOnCircle) {
  ObstacleVehicle o = straight_obstacle(21.75, 0.0, std::numbers::pi / 2, 0.0);
  o.motion = ArcMotion{Vec2(0.0, 0.0), 21.75, 0.45};
  std::vector<ObstacleVehicle> obs{place_on_script(o, 0.0)};
  for (int i = 0; i < 2000; ++i) {
    obs = advance_obstacles(obs, 0.01 * i, 0.01);
    ASSERT_NEAR(obs[0].position().norm(), 21.75, 1e-9);
  }
}

SimulationLog synthetic(const std::vector<Vec2>& host, const std::vector<Vec2>& host_vel,
                        const std::vector<std::vector<Vec2>>& obs, double dt) {
  SimulationLog log;
  log.plant_dt = dt;
  for (std::size_t i = 0; i < host.size(); ++i) {
    log.times.push_back(dt * static_cast<double>(i));
    VehicleState s;
    s.x = host[i].x();
    s.y = host[i].y();
    s.v = host_vel.empty() ? 0.0 : host_vel[i].norm();
    log.host.push_back(s);
    log.controls.push_back(ControlInput{});
    std::vector<ObstacleVehicle> row;
    for (const auto& p : obs[i]) row.push_back(straight_obstacle(p.x(), p.y(), 0.0, 0.0));
    log.obstacles.push_back(row);
  }
  return log;
}

TEST(MinDistance, Examples) {
  const std::vector<Vec2> h(5, Vec2(0.0, 0.0));
  const auto none = min_distance_series(synthetic(h, {}, std::vector<std::vector<Vec2>>(5), 0.1));
  for (double d : none) EXPECT_EQ(d, kInfinity);
  const auto fixed = min_distance_series(
      synthetic(h, {}, std::vector<std::vector<Vec2>>(5, {Vec2(6.0, 8.0), Vec2(30.0, 0.0)}), 0.1));
  for (double d : fixed) EXPECT_EQ(d, 10.0);

  // Host (10 t, 0) and obstacle (10, -10 + 5 t).
  std::vector<Vec2> hp;
  std::vector<std::vector<Vec2>> op;
  for (int i = 0; i <= 300; ++i) {
    const double t = 0.01 * i;
    hp.emplace_back(10.0 * t, 0.0);
    op.push_back({Vec2(10.0, -10.0 + 5.0 * t)});
  }
  const auto series = min_distance_series(synthetic(hp, {}, op, 0.01));
  const auto it = std::min_element(series.begin(), series.end());
  EXPECT_EQ(it - series.begin(), 120);
  EXPECT_NEAR(*it, 4.4721359549995794, 1e-12);
}

TEST(Metrics, StationaryHost) {
  Scenario sc;
  sc.duration = 1.0;
  const SimulationSettings st;
  const std::vector<Vec2> h(101, Vec2(0.0, 0.0));
  const MetricsReport m =
      compute_metrics(synthetic(h, {}, std::vector<std::vector<Vec2>>(101), 0.01), sc, st);
  EXPECT_EQ(m.avg_jerk, 0.0);
  EXPECT_EQ(m.curvature_smoothness, 1.0);
  EXPECT_FALSE(m.lane_change_completed);
  EXPECT_FALSE(m.collision);
  EXPECT_EQ(m.min_distance, kInfinity);
  EXPECT_EQ(m.path_length, 0.0);
}

TEST(Metrics, JerkOfAccelerationSteps) {
  Scenario sc;
  const SimulationSettings st;
  const std::vector<Vec2> h(11, Vec2(0.0, 0.0));
  SimulationLog log = synthetic(h, {}, std::vector<std::vector<Vec2>>(11), 0.1);
  for (int i = 0; i < 11; ++i) log.controls[i].a = 0.5 * i;
  // Hand difference: |0.5 / 0.1| on each of the 10 intervals.
  EXPECT_NEAR(compute_metrics(log, sc, st).avg_jerk, 5.0, 1e-12);
}

TEST(Metrics, EmptyLogThrows) {
  EXPECT_THROW(compute_metrics(SimulationLog{}, Scenario{}, SimulationSettings{}), ParameterError);
}

// Growth fast enough for the corridor to cover a full horizon at 10 m/s, as
// in the bundled configs.
SimulationSettings roomy() {
  SimulationSettings st;
  st.growth.gamma_0 = 25.0;
  st.growth.lambda = 0.3;
  return st;
}

TEST(ClosedLoop, EmptyRoadLaneKeep) {
  Scenario sc;
  sc.duration = 3.0;
  sc.host.v = 10.0;
  sc.host.y = 0.3;
  const SimulationSettings st = roomy();
  const SimulationLog log = run_closed_loop(sc, st);
  ASSERT_EQ(log.size(), 301u);
  EXPECT_LT(std::abs(log.host.back().y), 0.05);
  const MetricsReport m = compute_metrics(log, sc, st);
  EXPECT_FALSE(m.lane_change_completed);
  EXPECT_EQ(m.nonconverged_cycles, 0);
}

TEST(ClosedLoop, EquilibriumNeedsNoControl) {
  Scenario sc;
  sc.duration = 1.0;
  sc.host.v = 10.0;
  const SimulationLog log = run_closed_loop(sc, roomy());
  for (const auto& u : log.controls) {
    EXPECT_LT(std::abs(u.a), 1e-6);
    EXPECT_LT(std::abs(u.phi_ddot), 1e-6);
  }
  EXPECT_NEAR(log.host.back().x, 10.0, 1e-5);
}

TEST(ClosedLoop, PropertyPlantReplaysControls) {
  RunConfig rc = nominal();
  rc.scenario.duration = 2.0;
  const SimulationLog log = run_closed_loop(rc.scenario, rc.settings);
  VehicleState s = log.host.front();
  for (std::size_t i = 0; i + 1 < log.size(); ++i) {
    s = step(s, log.controls[i], log.plant_dt, rc.settings.vehicle);
    ASSERT_EQ(s.to_vector(), log.host[i + 1].to_vector()) << i;
  }
  for (const auto& c : log.cycles) {
    const auto i = static_cast<std::size_t>(std::lround(c.t / log.plant_dt));
    ASSERT_FALSE(c.planned.states.empty());
    EXPECT_EQ(c.planned.states.front(), log.host[i].to_vector());
    if (c.flag == "ok") EXPECT_EQ(c.applied.to_vector(), c.planned.controls.front());
    EXPECT_EQ(log.controls[i].to_vector(), c.applied.to_vector());
  }
}

TEST(Metrics, PropertySanityOnNominalRun) {
  const RunConfig rc = nominal();
  const SimulationLog log = run_closed_loop(rc.scenario, rc.settings);
  const MetricsReport m = compute_metrics(log, rc.scenario, rc.settings);
  EXPECT_LE(m.min_distance, m.avg_distance);
  if (m.collision) EXPECT_LT(m.min_distance, rc.settings.near_miss_distance);
  EXPECT_GT(m.path_length, 0.0);
  EXPECT_GE(m.curvature_smoothness, 0.0);
  EXPECT_LE(m.curvature_smoothness, 1.0);

  // Host alone on the road, and an obstacle pulling away ahead: no closing.
  Scenario sc;
  sc.duration = 1.0;
  sc.host.v = 10.0;
  sc.obstacles.push_back(straight_obstacle(20.0, 0.0, 0.0, 15.0));
  SimulationSettings st;
  st.growth.gamma_0 = 25.0;
  st.growth.lambda = 0.3;
  const SimulationLog far = run_closed_loop(sc, st);
  for (double t : ttc_series(far, st.vehicle.geometry.body_width)) EXPECT_EQ(t, kInfinity);
}

TEST(ClosedLoop, Deterministic) {
  RunConfig rc = nominal();
  rc.scenario.duration = 2.0;
  const SimulationLog a = run_closed_loop(rc.scenario, rc.settings);
  const SimulationLog b = run_closed_loop(rc.scenario, rc.settings);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.host[i].to_vector(), b.host[i].to_vector());
    EXPECT_EQ(a.controls[i].to_vector(), b.controls[i].to_vector());
  }
  MetricsReport ma = compute_metrics(a, rc.scenario, rc.settings);
  MetricsReport mb = compute_metrics(b, rc.scenario, rc.settings);
  ma.avg_computation_ms = mb.avg_computation_ms = 0.0;
  EXPECT_EQ(metrics_text(ma), metrics_text(mb));
}

TEST(ClosedLoop, ObstacleAtStartIsInfeasible) {
  Scenario sc;
  sc.host.v = 10.0;
  sc.obstacles.push_back(straight_obstacle(2.0, 0.0, 0.0, 10.0));
  EXPECT_THROW(run_closed_loop(sc, SimulationSettings{}), InfeasibleSeedError);
}

std::string comparable(MetricsReport m) {
  m.avg_computation_ms = 0.0;
  return metrics_text(m);
}

TEST(MonteCarlo, SingleRunMatchesDirectRun) {
  RunConfig rc = nominal();
  rc.scenario.duration = 1.5;
  const AggregateStats stats = monte_carlo(rc.scenario, rc.settings, 1, 7, rc.randomization);
  ASSERT_EQ(stats.per_run.size(), 1u);
  const Scenario run = perturb(rc.scenario, rc.randomization, 7, rc.settings.vehicle.geometry,
                               rc.settings.growth.delta_safe);
  const MetricsReport direct = compute_metrics(run_closed_loop(run, rc.settings), run, rc.settings);
  EXPECT_EQ(comparable(stats.per_run[0].metrics), comparable(direct));
  EXPECT_EQ(stats.per_run[0].seed, 7u);
}

TEST(MonteCarlo, IndependentOfWorkersAndRepeatable) {
  RunConfig rc = nominal();
  rc.scenario.duration = 1.0;
  const AggregateStats a = monte_carlo(rc.scenario, rc.settings, 4, 11, rc.randomization, 1);
  const AggregateStats b = monte_carlo(rc.scenario, rc.settings, 4, 11, rc.randomization, 3);
  const AggregateStats c = monte_carlo(rc.scenario, rc.settings, 4, 11, rc.randomization, 1);
  ASSERT_EQ(a.per_run.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.per_run[i].seed, 11u + i);
    EXPECT_EQ(comparable(a.per_run[i].metrics), comparable(b.per_run[i].metrics));
    EXPECT_EQ(comparable(a.per_run[i].metrics), comparable(c.per_run[i].metrics));
  }
  EXPECT_EQ(a.collision_rate, b.collision_rate);
  EXPECT_EQ(a.min_distance_min, b.min_distance_min);
}

TEST(Perturb, PropertyKeepsSeparation) {
  const RunConfig rc = nominal();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Scenario p = perturb(rc.scenario, rc.randomization, seed, rc.settings.vehicle.geometry,
                               rc.settings.growth.delta_safe);
    ASSERT_EQ(p.obstacles.size(), rc.scenario.obstacles.size());
    EXPECT_NO_THROW(validate(p, rc.settings.vehicle.geometry, rc.settings.growth.delta_safe));
    for (std::size_t i = 0; i < p.obstacles.size(); ++i) {
      EXPECT_LE(std::abs(p.obstacles[i].v - rc.scenario.obstacles[i].v),
                rc.randomization.speed + 1e-12);
    }
  }
}

TEST(Aggregate, Rates) {
  std::vector<RunSummary> runs(4);
  for (int i = 0; i < 4; ++i) {
    runs[i].seed = 3 - i;
    runs[i].metrics.min_distance = 1.0 + i;
    runs[i].metrics.avg_distance = 10.0;
  }
  runs[0].metrics.collision = true;
  const AggregateStats s = aggregate(runs, 3.0);
  EXPECT_EQ(s.runs, 4);
  EXPECT_EQ(s.collision_rate, 0.25);
  EXPECT_EQ(s.safe_distance_rate, 0.5);
  EXPECT_EQ(s.min_distance_min, 1.0);
  EXPECT_EQ(s.min_distance_mean, 2.5);
  EXPECT_EQ(s.per_run.front().seed, 0u);
}

}  // namespace
}  // namespace drf
