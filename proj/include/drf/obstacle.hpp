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

#ifndef DRF_OBSTACLE_HPP_
#define DRF_OBSTACLE_HPP_

#include <variant>
#include <vector>

#include "drf/geometry.hpp"

namespace drf {

/// Constant velocity along the current heading.
struct StraightMotion {
  bool operator==(const StraightMotion&) const = default;
};

/// Constant angular rate along a circle. Positive rate is counter-clockwise.
struct ArcMotion {
  Vec2 center{0.0, 0.0};
  double radius = 1.0;
  double angular_rate = 0.0;

  bool operator==(const ArcMotion&) const = default;
};

struct Waypoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Waypoint&) const = default;
};

/// Piecewise-linear interpolation through timed waypoints (absolute time).
struct WaypointMotion {
  std::vector<Waypoint> points;

  bool operator==(const WaypointMotion&) const = default;
};

using MotionScript = std::variant<StraightMotion, ArcMotion, WaypointMotion>;

struct ObstacleVehicle {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  double body_length = 4.5;
  double body_width = 1.8;
  MotionScript motion = StraightMotion{};

  Vec2 position() const { return {x, y}; }
  OrientedBox footprint() const { return {position(), theta, body_length, body_width}; }

  bool operator==(const ObstacleVehicle&) const = default;
};

/// Throws ParameterError on negative speed, non-positive footprint, a
/// degenerate arc, or waypoints that are not strictly increasing in time.
void validate(const ObstacleVehicle& obs);

/// Makes the pose consistent with the script at time t: arc obstacles are
/// snapped onto their circle with tangent heading, waypoint obstacles take
/// the interpolated pose.
ObstacleVehicle place_on_script(const ObstacleVehicle& obs, double t);

/// Advances every obstacle from time t to t + dt along its script. Waypoint
/// scripts hold their last pose (at rest) beyond the final waypoint.
std::vector<ObstacleVehicle> advance_obstacles(
    const std::vector<ObstacleVehicle>& obstacles, double t, double dt);

/// kConstantVelocity extrapolates waypoint scripts along the current
/// heading; kScript follows them. Straight and arc scripts are predicted
/// along their path either way.
enum class PredictionModel { kConstantVelocity, kScript };

/// Predicts obstacle states at t0 + k*dt for k = 0..steps from states taken
/// at t0.
std::vector<std::vector<ObstacleVehicle>> predict_obstacles(
    const std::vector<ObstacleVehicle>& obstacles, int steps, double dt,
    PredictionModel model = PredictionModel::kConstantVelocity, double t0 = 0.0);

}  // namespace drf

#endif  // DRF_OBSTACLE_HPP_
