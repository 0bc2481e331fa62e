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

#include "drf/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "drf/errors.hpp"

namespace drf {

namespace {


template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double mean(const std::vector<double>& v) {
  if (v.empty()) return kInfinity;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double lane_center_offset(const RoadGeometry& road, int lane) {
  return std::visit(Overloaded{[&](const StraightRoad& r) { return r.lane_center(lane); },
                               [&](const RoundaboutRoad& r) { return r.lane_radius(lane); }},
                    road);
}

double lateral_coordinate(const RoadGeometry& road, const VehicleState& s) {
  return std::visit(Overloaded{[&](const StraightRoad&) { return s.y; },
                               [&](const RoundaboutRoad& r) { return (s.position() - r.center).norm(); }},
                    road);
}

double lateral_velocity(const RoadGeometry& road, const VehicleState& s) {
  const Vec2 vel = s.v * Vec2(std::cos(s.theta), std::sin(s.theta));
  return std::visit(Overloaded{[&](const StraightRoad&) { return vel.y(); },
                               [&](const RoundaboutRoad& r) {
                                 const Vec2 d = s.position() - r.center;
                                 const double n = d.norm();
                                 return n > 0.0 ? vel.dot(d) / n : 0.0;
                               }},
                    road);
}

double road_lane_width(const RoadGeometry& road) {
  return std::visit(Overloaded{[](const StraightRoad& r) { return r.lane_width; },
                               [](const RoundaboutRoad& r) { return r.lane_width(); }},
                    road);
}

int road_lane_count(const RoadGeometry& road) {
  return std::visit(Overloaded{[](const StraightRoad& r) { return r.lane_count; },
                               [](const RoundaboutRoad&) { return 2; }},
                    road);
}

void validate(const Scenario& sc, const VehicleGeometry& geom, double delta_safe) {
  if (!(sc.duration > 0.0)) throw ParameterError("scenario.duration must be > 0");
  if (!(sc.plant_dt > 0.0)) throw ParameterError("scenario.plant_dt must be > 0");
  const double ratio = sc.replan_period / sc.plant_dt;
  if (!(ratio >= 1.0 - 1e-9) || std::abs(ratio - std::round(ratio)) > 1e-6) {
    throw ParameterError("scenario.replan_period must be a positive multiple of scenario.plant_dt");
  }
  if (!(sc.target_speed >= 0.0)) throw ParameterError("scenario.target_speed must be >= 0");
  std::visit(Overloaded{[](const StraightRoad& r) {
                          if (!(r.lane_width > 0.0) || r.lane_count < 1 || !(r.length > 0.0)) {
                            throw ParameterError("scenario: invalid straight road geometry");
                          }
                        },
                        [](const RoundaboutRoad& r) {
                          if (!(r.inner_radius > 0.0) || !(r.outer_radius > r.inner_radius)) {
                            throw ParameterError("scenario: roundabout radii must satisfy 0 < inner < outer");
                          }
                        }},
             sc.road);
  const int lanes = road_lane_count(sc.road);
  if (sc.start_lane < 0 || sc.start_lane >= lanes || sc.target_lane < 0 ||
      sc.target_lane >= lanes) {
    throw ParameterError("scenario: lane index out of range");
  }
  const OrientedBox body = footprint(sc.host, geom);
  for (const auto& o : sc.obstacles) {
    validate(o);
    const ObstacleVehicle placed = place_on_script(o, 0.0);
    if (box_clearance(body, placed.footprint()) < delta_safe) {
      throw InfeasibleSeedError("scenario: obstacle " + std::to_string(o.id) +
                                " starts within delta_safe of the host");
    }
  }
}

std::vector<StateVector> make_reference(const Scenario& sc, const VehicleState& host, int horizon,
                                        double dt, const VehicleGeometry& geom) {
  std::vector<StateVector> ref(horizon + 1, StateVector::Zero());
  const double v = sc.target_speed;
  std::visit(Overloaded{[&](const StraightRoad& r) {
                          const double y = r.lane_center(sc.target_lane);
                          for (int k = 0; k <= horizon; ++k) {
                            ref[k] << host.x + v * k * dt, y, v, 0.0, 0.0, 0.0;
                          }
                        },
                        [&](const RoundaboutRoad& r) {
                          const double R = r.lane_radius(sc.target_lane);
                          const Vec2 d = host.position() - r.center;
                          const double psi0 = std::atan2(d.y(), d.x());
                          const double phi = std::atan(geom.wheelbase / R);
                          for (int k = 0; k <= horizon; ++k) {
                            const double psi = psi0 + v * k * dt / R;
                            ref[k] << r.center.x() + R * std::cos(psi),
                                r.center.y() + R * std::sin(psi), v,
                                wrap_angle(psi + 0.5 * std::numbers::pi), phi, 0.0;
                          }
                        }},
             sc.road);
  return ref;
}

RoadBounds corridor_road(const RoadGeometry& road) {
  return std::visit(Overloaded{[](const StraightRoad& r) {
                                 return RoadBounds{r.x_start, r.x_start + r.length, r.y_min(),
                                                   r.y_max()};
                               },
                               [](const RoundaboutRoad& r) {
                                 return RoadBounds{r.center.x() - r.outer_radius,
                                                   r.center.x() + r.outer_radius,
                                                   r.center.y() - r.outer_radius,
                                                   r.center.y() + r.outer_radius};
                               }},
                    road);
}

std::vector<ControlVector> tracking_guess(std::span<const StateVector> reference,
                                          const VehicleState& host, const Dynamics& dynamics,
                                          const VehicleGeometry& geom) {
  const int N = static_cast<int>(reference.size()) - 1;
  const double dt = dynamics.dt();
  // Look ahead by about one second of travel along the reference.
  const int lookahead = std::max(1, static_cast<int>(std::lround(1.0 / dt)));
  constexpr double kOmega = 4.0;  // steering loop natural frequency, rad/s
  constexpr double kSpeedGain = 1.0;
  std::vector<ControlVector> u(std::max(N, 0), ControlVector::Zero());
  StateVector x = host.to_vector();
  for (int k = 0; k < N; ++k) {
    const StateVector& target = reference[std::min(k + lookahead, N)];
    const Vec2 d(target(kX) - x(kX), target(kY) - x(kY));
    const double ld = std::max(d.norm(), 1e-6);
    const double alpha = wrap_angle(std::atan2(d.y(), d.x()) - x(kTheta));
    const double phi_des = std::atan(2.0 * geom.wheelbase * std::sin(alpha) / ld);
    ControlVector c;
    c(0) = kSpeedGain * (reference[k](kV) - x(kV));
    c(1) = kOmega * kOmega * (phi_des - x(kPhi)) - 2.0 * kOmega * x(kPhiDot);
    u[k] = dynamics.clamp_control(c);
    x = dynamics.step(x, u[k]);
  }
  return u;
}

PlanCycle build_cycle(const Scenario& sc, const SimulationSettings& st, const VehicleState& host,
                      const std::vector<ObstacleVehicle>& obstacles, double t,
                      const Dynamics& dynamics, std::vector<ControlVector> warm_start,
                      GuessSource source) {
  const int N = st.horizon;
  const double dt = st.plan_dt;
  const VehicleGeometry& geom = st.vehicle.geometry;
  PlanCycle pc;
  PlanningProblem& p = pc.problem;
  p.x0 = host.to_vector();
  p.t0 = t;
  p.reference = make_reference(sc, host, N, dt, geom);
  pc.predictions = predict_obstacles(obstacles, N, dt, st.prediction, t);
  if (source == GuessSource::kTracking) warm_start = tracking_guess(p.reference, host, dynamics, geom);
  warm_start.resize(N, ControlVector::Zero());
  for (auto& u : warm_start) u = dynamics.clamp_control(u);
  pc.initial_controls = std::move(warm_start);

  // The corridor follows the initial guess so that the guess is feasible.
  std::vector<Vec2> anchors(N + 1);
  std::vector<double> headings(N + 1);
  StateVector x = host.to_vector();
  for (int k = 0; k <= N; ++k) {
    anchors[k] = Vec2(x(kX), x(kY));
    headings[k] = x(kTheta);
    if (k < N) x = dynamics.step(x, pc.initial_controls[k]);
  }
  CorridorSetup setup;
  setup.road = corridor_road(sc.road);
  setup.growth = st.growth;
  setup.limits = st.limits;
  setup.heading_spread = st.heading_spread;
  setup.host_extent = host_extent(geom, host.theta, st.heading_spread);
  setup.host_length = geom.body_length;
  setup.host_width = geom.body_width;
  setup.host_heading = host.theta;

  std::vector<Vec2> preferred(N + 1);
  for (int k = 0; k <= N; ++k) preferred[k] = Vec2(p.reference[k](kX), p.reference[k](kY));
  p.corridor =
      generate_corridor(host, N, dt, pc.predictions, setup, geom, t, anchors, headings, preferred);
  p.obstacles = pc.predictions;
  p.anchor = RiskAnchor::from_state(host);
  p.risk = st.risk;
  p.weights = st.weights;
  p.keep_in = road_keep_in(sc.road, geom);
  p.dynamics = &dynamics;
  return pc;
}

std::optional<KeepInAnnulus> road_keep_in(const RoadGeometry& road, const VehicleGeometry& geom) {
  const auto* r = std::get_if<RoundaboutRoad>(&road);
  if (!r) return std::nullopt;
  const double h = 0.5 * geom.body_width;
  return KeepInAnnulus{r->center, r->inner_radius + h, r->outer_radius - h};
}

double road_excursion(const RoadGeometry& road, const VehicleState& s, const VehicleGeometry& geom) {
  if (const auto ring = road_keep_in(road, geom)) return std::abs(ring->excursion(s.position()));
  const auto& st = std::get<StraightRoad>(road);
  const double h = 0.5 * geom.body_width;
  return std::max({0.0, st.y_min() + h - s.y, s.y - (st.y_max() - h)});
}

SimulationLog run_closed_loop(const Scenario& sc, const SimulationSettings& st) {
  validate(st.vehicle);
  validate(st.risk);
  validate(st.growth);
  validate(st.limits);
  validate(st.weights);
  validate(sc, st.vehicle.geometry, st.growth.delta_safe);
  const BicycleDynamics dynamics(st.vehicle, st.plan_dt);

  const long per_cycle = std::lround(sc.replan_period / sc.plant_dt);
  const long total = std::lround(sc.duration / sc.plant_dt);

  SimulationLog log;
  log.plant_dt = sc.plant_dt;
  VehicleState host = sc.host;
  std::vector<ObstacleVehicle> obs;
  for (const auto& o : sc.obstacles) obs.push_back(place_on_script(o, 0.0));
  log.times.push_back(0.0);
  log.host.push_back(host);
  log.obstacles.push_back(obs);

  std::vector<ControlVector> last_plan;
  std::size_t next_in_plan = 0;
  std::vector<ControlVector> warm;
  long step_index = 0;
  int cycle = 0;
  while (step_index < total) {
    const double t = step_index * sc.plant_dt;
    CycleRecord rec;
    rec.index = cycle++;
    rec.t = t;
    auto fallback = [&]() -> ControlVector {
      if (next_in_plan < last_plan.size()) return last_plan[next_in_plan++];
      return ControlVector::Zero();
    };
    ControlVector u;
    // A failed solve whose last iterate stays inside its corridor is still a
    // collision-free plan and fresher than the previous one.
    auto usable = [](const PlanResult& r) {
      return r.report.status != "failed" || r.report.max_corridor_violation <= 1e-9;
    };
    auto attempt = [&](GuessSource source) -> std::optional<std::pair<PlanCycle, PlanResult>> {
      try {
        PlanCycle pc = build_cycle(sc, st, host, obs, t, dynamics, warm, source);
        PlanResult pr = plan(pc.problem, st.solver, pc.initial_controls);
        return std::make_pair(std::move(pc), std::move(pr));
      } catch (const InfeasibleSeedError&) {
        return std::nullopt;
      }
    };
    auto solved = attempt(GuessSource::kWarmStart);
    // The shifted plan can box the corridor in; retry from the tracker.
    if (!warm.empty() && (!solved || !usable(solved->second))) {
      auto retry = attempt(GuessSource::kTracking);
      if (retry && (!solved || usable(retry->second))) solved = std::move(retry);
    }
    if (solved) {
      auto& [pc, pr] = *solved;
      rec.report = pr.report;
      rec.corridor = pc.problem.corridor;
      if (!usable(pr) && !last_plan.empty()) {
        rec.flag = "fallback_solver";
        u = fallback();
      } else {
        u = pr.trajectory.controls.front();
        last_plan = pr.trajectory.controls;
        next_in_plan = 1;
      }
      rec.planned = std::move(pr.trajectory);
    } else {
      rec.flag = "fallback_infeasible";
      rec.report.status = "infeasible";
      u = fallback();
    }
    // Warm start: remainder of the active plan, last control repeated.
    warm.assign(last_plan.begin() + std::min(next_in_plan, last_plan.size()), last_plan.end());
    if (!warm.empty()) warm.resize(st.horizon, warm.back());

    const ControlInput applied = ControlInput::from_vector(u);
    rec.applied = applied;
    log.cycles.push_back(std::move(rec));
    for (long s = 0; s < per_cycle && step_index < total; ++s) {
      const double ts = step_index * sc.plant_dt;
      host = step(host, applied, sc.plant_dt, st.vehicle);
      obs = advance_obstacles(obs, ts, sc.plant_dt);
      log.controls.push_back(applied);
      ++step_index;
      log.times.push_back(step_index * sc.plant_dt);
      log.host.push_back(host);
      log.obstacles.push_back(obs);
    }
  }
  log.controls.push_back(log.controls.empty() ? ControlInput{} : log.controls.back());
  return log;
}

std::vector<double> min_distance_series(const SimulationLog& log) {
  std::vector<double> out(log.size(), kInfinity);
  for (std::size_t i = 0; i < log.size(); ++i) {
    for (const auto& o : log.obstacles[i]) {
      out[i] = std::min(out[i], (o.position() - log.host[i].position()).norm());
    }
  }
  return out;
}

std::vector<double> clearance_series(const SimulationLog& log, const VehicleGeometry& geom) {
  std::vector<double> out(log.size(), kInfinity);
  for (std::size_t i = 0; i < log.size(); ++i) {
    const OrientedBox body = footprint(log.host[i], geom);
    for (const auto& o : log.obstacles[i]) {
      out[i] = std::min(out[i], box_clearance(body, o.footprint()));
    }
  }
  return out;
}

std::vector<double> ttc_series(const SimulationLog& log, double host_width) {
  std::vector<double> out(log.size(), kInfinity);
  for (std::size_t i = 0; i < log.size(); ++i) {
    const VehicleState& h = log.host[i];
    const Vec2 axis(std::cos(h.theta), std::sin(h.theta));
    const Vec2 normal(-axis.y(), axis.x());
    const Vec2 vh = h.v * axis;
    for (const auto& o : log.obstacles[i]) {
      const Vec2 d = o.position() - h.position();
      const double gap = d.dot(axis);
      if (gap <= 0.0) continue;
      // Car-following geometry only: the obstacle must share the host's path.
      if (std::abs(d.dot(normal)) >= 0.5 * (host_width + o.body_width)) continue;
      const Vec2 vo = o.v * Vec2(std::cos(o.theta), std::sin(o.theta));
      const double closing = (vh - vo).dot(axis);
      if (closing > 1e-9) out[i] = std::min(out[i], gap / closing);
    }
  }
  return out;
}

MetricsReport compute_metrics(const SimulationLog& log, const Scenario& sc,
                              const SimulationSettings& st) {
  if (log.size() == 0) throw ParameterError("compute_metrics: empty log");
  const VehicleGeometry& geom = st.vehicle.geometry;
  MetricsReport m;
  const std::size_t n = log.size();
  const double dt = log.plant_dt;

  const auto dist = min_distance_series(log);
  const auto clear = clearance_series(log, geom);
  const auto ttc = ttc_series(log, geom.body_width);
  m.min_distance = *std::min_element(dist.begin(), dist.end());
  m.avg_distance = std::isfinite(m.min_distance) ? mean(dist) : kInfinity;
  m.min_clearance = *std::min_element(clear.begin(), clear.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (clear[i] <= 0.0) {
      m.collision = true;
      m.first_contact_time = log.times[i];
      break;
    }
  }
  m.near_miss = !m.collision && m.min_distance < st.near_miss_distance;
  m.ttc_min = *std::min_element(ttc.begin(), ttc.end());

  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = log.host[i];
    m.max_lateral_accel = std::max(m.max_lateral_accel, s.v * s.v * std::abs(curvature(s.phi, geom)));
    m.max_road_excursion = std::max(m.max_road_excursion, road_excursion(sc.road, s, geom));
  }
  if (n >= 2 && log.controls.size() >= n) {
    double jerk = 0.0;
    double dk2 = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      jerk += std::abs(log.controls[i + 1].a - log.controls[i].a) / dt;
      const double dk =
          (curvature(log.host[i + 1].phi, geom) - curvature(log.host[i].phi, geom)) / dt;
      dk2 += dk * dk * dt;
      m.path_length += (log.host[i + 1].position() - log.host[i].position()).norm();
    }
    m.avg_jerk = jerk / static_cast<double>(n - 1);
    const double duration = dt * static_cast<double>(n - 1);
    m.curvature_smoothness = 1.0 / (1.0 + dk2 / duration);
  }

  if (sc.start_lane != sc.target_lane) {
    const double w = road_lane_width(sc.road);
    const double c0 = lane_center_offset(sc.road, sc.start_lane);
    const double c1 = lane_center_offset(sc.road, sc.target_lane);
    std::size_t start = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(lateral_coordinate(sc.road, log.host[i]) - c0) > st.lane_change_offset * w) {
        start = i;
        break;
      }
    }
    if (start < n) {
      m.lane_change_start = log.times[start];
      for (std::size_t i = start; i < n; ++i) {
        const auto& s = log.host[i];
        if (std::abs(lateral_coordinate(sc.road, s) - c1) < st.lane_change_offset * w &&
            std::abs(lateral_velocity(sc.road, s)) < st.lane_change_lateral_speed) {
          m.lane_change_completed = true;
          m.lane_change_time = log.times[i] - log.times[start];
          if (std::holds_alternative<StraightRoad>(sc.road)) {
            m.lane_change_distance = s.x - log.host[start].x;
          } else {
            double len = 0.0;
            for (std::size_t j = start; j < i; ++j) {
              len += (log.host[j + 1].position() - log.host[j].position()).norm();
            }
            m.lane_change_distance = len;
          }
          break;
        }
      }
    }
  }

  m.cycles = static_cast<int>(log.cycles.size());
  double wall = 0.0;
  for (const auto& c : log.cycles) {
    wall += c.report.wall_time_s;
    if (!c.report.converged) ++m.nonconverged_cycles;
    if (c.flag != "ok") ++m.fallback_cycles;
  }
  if (m.cycles > 0) m.avg_computation_ms = 1000.0 * wall / m.cycles;
  return m;
}

Scenario perturb(const Scenario& sc, const Randomization& spec, std::uint64_t seed,
                 const VehicleGeometry& geom, double delta_safe) {
  Scenario out = sc;
  out.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const OrientedBox body = footprint(sc.host, geom);
  for (std::size_t i = 0; i < sc.obstacles.size(); ++i) {
    const ObstacleVehicle& base = sc.obstacles[i];
    for (int attempt = 0; attempt < 100; ++attempt) {
      const double dp = spec.position * unit(rng);
      const double dv = spec.speed * unit(rng);
      const double dtime = spec.time * unit(rng);
      ObstacleVehicle o = base;
      std::visit(Overloaded{[&](StraightMotion&) {
                              o.x += dp * std::cos(o.theta);
                              o.y += dp * std::sin(o.theta);
                              o.v = std::max(0.0, o.v + dv);
                            },
                            [&](ArcMotion& a) {
                              const double dir = a.angular_rate >= 0.0 ? 1.0 : -1.0;
                              const Vec2 d = o.position() - a.center;
                              const double psi = std::atan2(d.y(), d.x()) + dir * dp / a.radius;
                              o.x = a.center.x() + a.radius * std::cos(psi);
                              o.y = a.center.y() + a.radius * std::sin(psi);
                              const double speed =
                                  std::max(0.0, std::abs(a.angular_rate) * a.radius + dv);
                              a.angular_rate = dir * speed / a.radius;
                              o.v = speed;
                            },
                            [&](WaypointMotion& w) {
                              for (auto& p : w.points) p.t += dtime;
                            }},
                 o.motion);
      o = place_on_script(o, 0.0);
      if (box_clearance(body, o.footprint()) >= delta_safe) {
        out.obstacles[i] = o;
        break;
      }
    }
  }
  return out;
}

AggregateStats aggregate(std::vector<RunSummary> runs, double near_miss_distance) {
  std::sort(runs.begin(), runs.end(),
            [](const RunSummary& a, const RunSummary& b) { return a.seed < b.seed; });
  AggregateStats s;
  s.runs = static_cast<int>(runs.size());
  if (runs.empty()) return s;
  int coll = 0, near = 0, lc = 0, safe = 0;
  double min_sum = 0.0, avg_sum = 0.0;
  bool finite = true;
  for (const auto& r : runs) {
    const auto& m = r.metrics;
    coll += m.collision;
    near += m.near_miss;
    lc += m.lane_change_completed;
    safe += m.min_distance >= near_miss_distance;
    s.min_distance_min = std::min(s.min_distance_min, m.min_distance);
    finite = finite && std::isfinite(m.min_distance);
    min_sum += m.min_distance;
    avg_sum += m.avg_distance;
  }
  const double n = static_cast<double>(runs.size());
  s.collision_rate = coll / n;
  s.near_miss_rate = near / n;
  s.lane_change_rate = lc / n;
  s.safe_distance_rate = safe / n;
  s.min_distance_mean = finite ? min_sum / n : kInfinity;
  s.avg_distance_mean = finite ? avg_sum / n : kInfinity;
  s.per_run = std::move(runs);
  return s;
}

AggregateStats monte_carlo(const Scenario& sc, const SimulationSettings& st, int n_runs,
                           std::uint64_t base_seed, const Randomization& spec, int workers) {
  if (n_runs < 1) throw ParameterError("monte_carlo: n_runs must be >= 1");
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n_runs);

  std::vector<RunSummary> results(n_runs);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&]() {
    for (int i = next++; i < n_runs; i = next++) {
      try {
        const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
        const Scenario run = perturb(sc, spec, seed, st.vehicle.geometry, st.growth.delta_safe);
        const SimulationLog log = run_closed_loop(run, st);
        results[i] = {seed, compute_metrics(log, run, st)};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return aggregate(std::move(results), st.near_miss_distance);
}

}  // namespace drf
