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

#ifndef DRF_SIMULATION_HPP_
#define DRF_SIMULATION_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "drf/convex_space.hpp"
#include "drf/obstacle.hpp"
#include "drf/planner.hpp"
#include "drf/risk_field.hpp"
#include "drf/vehicle_model.hpp"

namespace drf {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Lanes along +x. Lane i is centered at y = i * lane_width.
struct StraightRoad {
  double lane_width = 3.5;
  int lane_count = 2;
  double x_start = -50.0;
  double length = 250.0;

  double lane_center(int lane) const { return lane * lane_width; }
  double y_min() const { return -0.5 * lane_width; }
  double y_max() const { return (lane_count - 0.5) * lane_width; }
  bool operator==(const StraightRoad&) const = default;
};

/// Counter-clockwise circulation. Lane 0 is the inner lane.
struct RoundaboutRoad {
  Vec2 center{0.0, 0.0};
  double inner_radius = 18.25;
  double outer_radius = 25.25;
  int entrances = 4;
  double entrance_angle = -1.5707963267948966;  // rad, host entry
  double exit_angle = 1.5707963267948966;       // rad

  double lane_width() const { return 0.5 * (outer_radius - inner_radius); }
  double lane_radius(int lane) const { return inner_radius + (lane + 0.5) * lane_width(); }
  bool operator==(const RoundaboutRoad&) const = default;
};

using RoadGeometry = std::variant<StraightRoad, RoundaboutRoad>;

struct Scenario {
  RoadGeometry road = StraightRoad{};
  VehicleState host;
  int start_lane = 0;
  int target_lane = 0;
  double target_speed = 10.0;  // m/s
  std::vector<ObstacleVehicle> obstacles;
  double duration = 10.0;      // s
  double plant_dt = 0.01;      // s
  double replan_period = 0.1;  // s
  std::uint64_t seed = 0;
};

/// Provides lane geometry in a road-independent way: lateral offset is y on
/// a straight road and radius on a roundabout.
double lane_center_offset(const RoadGeometry& road, int lane);
double lateral_coordinate(const RoadGeometry& road, const VehicleState& s);
double lateral_velocity(const RoadGeometry& road, const VehicleState& s);
double road_lane_width(const RoadGeometry& road);
int road_lane_count(const RoadGeometry& road);

/// Throws ParameterError on a non-positive duration, a replan period that
/// is not a multiple of plant_dt, or lanes out of range, and
/// InfeasibleSeedError on an obstacle closer than delta_safe to the host.
void validate(const Scenario& scenario, const VehicleGeometry& geom, double delta_safe);

struct SimulationSettings {
  VehicleParams vehicle;
  RiskFieldParams risk;
  GrowthParams growth;
  KinematicLimits limits;
  CostWeights weights = CostWeights::defaults();
  PlanOptions solver;
  int horizon = 30;
  double plan_dt = 0.1;
  double heading_spread = 0.2;  // rad, host orientation spread covered by the corridor
  PredictionModel prediction = PredictionModel::kScript;
  double near_miss_distance = 3.0;     // m, center distance
  double lane_change_offset = 0.1;     // fraction of lane width
  double lane_change_lateral_speed = 0.1;  // m/s

  bool operator==(const SimulationSettings&) const = default;
};

/// Reference over the planning horizon from the measured state.
std::vector<StateVector> make_reference(const Scenario& scenario, const VehicleState& host,
                                        int horizon, double dt, const VehicleGeometry& geom);

/// Road limits seen by the corridor (bounding box for the roundabout).
RoadBounds corridor_road(const RoadGeometry& road);

/// Carriageway ring for a roundabout, shrunk by half the body width; none for
/// the straight road, whose edges the corridor already follows exactly.
std::optional<KeepInAnnulus> road_keep_in(const RoadGeometry& road, const VehicleGeometry& geom);

/// How far the host center is past the edge offset by half the body width
/// (0 while the body stays on the road).
double road_excursion(const RoadGeometry& road, const VehicleState& s, const VehicleGeometry& geom);

/// Everything needed to solve one cycle; exposed for single-shot planning.
struct PlanCycle {
  PlanningProblem problem;
  std::vector<std::vector<ObstacleVehicle>> predictions;
  std::vector<ControlVector> initial_controls;
};

/// Controls of a pure-pursuit and speed-hold tracker rolled along
/// `reference` from `host`; obstacle-blind, used as a fallback guess.
std::vector<ControlVector> tracking_guess(std::span<const StateVector> reference,
                                          const VehicleState& host, const Dynamics& dynamics,
                                          const VehicleGeometry& geom);

enum class GuessSource { kWarmStart, kTracking };

/// Builds predictions, reference, anchors, and corridor for one solve. The
/// returned problem refers to `dynamics`, which must outlive it. With
/// kTracking the warm start is ignored and tracking_guess seeds the solve.
/// Throws InfeasibleSeedError when the host already violates delta_safe.
PlanCycle build_cycle(const Scenario& scenario, const SimulationSettings& settings,
                      const VehicleState& host, const std::vector<ObstacleVehicle>& obstacles,
                      double t, const Dynamics& dynamics,
                      std::vector<ControlVector> warm_start = {},
                      GuessSource source = GuessSource::kWarmStart);

struct CycleRecord {
  int index = 0;
  double t = 0.0;
  SolveReport report;
  /// "ok", "fallback_solver", or "fallback_infeasible".
  std::string flag = "ok";
  ControlInput applied;
  std::vector<ConvexRegion> corridor;
  Trajectory planned;
};

/// Uniformly sampled at plant_dt. controls[i] is applied on [t_i, t_{i+1}).
struct SimulationLog {
  std::vector<double> times;
  std::vector<VehicleState> host;
  std::vector<ControlInput> controls;
  std::vector<std::vector<ObstacleVehicle>> obstacles;
  std::vector<CycleRecord> cycles;
  double plant_dt = 0.01;

  std::size_t size() const { return times.size(); }
};

SimulationLog run_closed_loop(const Scenario& scenario, const SimulationSettings& settings);

/// Per sample: minimum host-obstacle center distance (+inf without obstacles).
std::vector<double> min_distance_series(const SimulationLog& log);
/// Per sample: minimum footprint clearance (negative when overlapping).
std::vector<double> clearance_series(const SimulationLog& log, const VehicleGeometry& geom);
/// Per sample: minimum time to collision over obstacles ahead, closing, and
/// laterally overlapping the host (offset below the mean of both widths).
std::vector<double> ttc_series(const SimulationLog& log, double host_width);

struct MetricsReport {
  double min_distance = kInfinity;
  double avg_distance = kInfinity;
  double min_clearance = kInfinity;
  bool collision = false;
  double first_contact_time = kInfinity;
  bool near_miss = false;
  double ttc_min = kInfinity;
  double max_lateral_accel = 0.0;
  double avg_jerk = 0.0;
  double curvature_smoothness = 1.0;
  bool lane_change_completed = false;
  double lane_change_start = kInfinity;
  double lane_change_distance = kInfinity;
  double lane_change_time = kInfinity;
  double avg_computation_ms = 0.0;
  double path_length = 0.0;
  double max_road_excursion = 0.0;
  int cycles = 0;
  int nonconverged_cycles = 0;
  int fallback_cycles = 0;
};

MetricsReport compute_metrics(const SimulationLog& log, const Scenario& scenario,
                              const SimulationSettings& settings);

/// Uniform perturbation half-widths applied per run.
struct Randomization {
  double position = 1.0;  // m along the direction of travel
  double speed = 0.5;     // m/s
  double time = 0.3;      // s shift of waypoint scripts

  bool operator==(const Randomization&) const = default;
};

/// Perturbed copy of the scenario; obstacles that would start within
/// delta_safe of the host are redrawn.
Scenario perturb(const Scenario& scenario, const Randomization& spec, std::uint64_t seed,
                 const VehicleGeometry& geom, double delta_safe);

struct RunSummary {
  std::uint64_t seed = 0;
  MetricsReport metrics;
};

struct AggregateStats {
  int runs = 0;
  double collision_rate = 0.0;
  double near_miss_rate = 0.0;
  double lane_change_rate = 0.0;
  /// Fraction of runs whose minimum center distance is at least the
  /// near-miss threshold.
  double safe_distance_rate = 0.0;
  double min_distance_min = kInfinity;
  double min_distance_mean = kInfinity;
  double avg_distance_mean = kInfinity;
  std::vector<RunSummary> per_run;  // sorted by seed
};

AggregateStats aggregate(std::vector<RunSummary> runs, double near_miss_distance);

/// Runs seeds base_seed .. base_seed + n_runs - 1 on up to `workers` threads
/// (0 selects the hardware concurrency). The result does not depend on the
/// worker count.
AggregateStats monte_carlo(const Scenario& scenario, const SimulationSettings& settings,
                           int n_runs, std::uint64_t base_seed, const Randomization& spec,
                           int workers = 1);

}  // namespace drf

#endif  // DRF_SIMULATION_HPP_
