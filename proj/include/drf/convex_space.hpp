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

#ifndef DRF_CONVEX_SPACE_HPP_
#define DRF_CONVEX_SPACE_HPP_

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "drf/geometry.hpp"
#include "drf/obstacle.hpp"
#include "drf/vehicle_model.hpp"

namespace drf {

/// Separating hyperplane: normal' p <= offset on the region side and
/// normal' q >= offset + delta_safe on the obstacle side.
struct Certificate {
  Vec2 normal{1.0, 0.0};
  double offset = 0.0;
  int obstacle_id = 0;
};

struct ConvexRegion {
  double x_lower = 0.0;
  double x_upper = 0.0;
  double y_lower = 0.0;
  double y_upper = 0.0;
  double t = 0.0;
  std::vector<Certificate> certificates;

  double width() const { return x_upper - x_lower; }
  double height() const { return y_upper - y_lower; }
  double area() const { return width() * height(); }
  bool valid() const { return x_lower < x_upper && y_lower < y_upper; }
  Vec2 clamp(const Vec2& p) const;
  /// Euclidean distance from p to the closed rectangle (0 inside).
  double distance(const Vec2& p) const;
  ConvexRegion inflated(const Vec2& half_extent) const;
  /// Faces pulled in by m, never past the center.
  ConvexRegion shrunk(double m) const;
  std::array<Vec2, 4> corners() const;
};

struct GrowthParams {
  double eta = 0.5;
  double alpha_max = 2.0;
  double v_ref = 10.0;
  double gamma_0 = 8.0;
  double lambda = 0.8;
  double delta_safe = 0.5;
  double init_margin = 0.3;

  bool operator==(const GrowthParams&) const = default;
};

void validate(const GrowthParams& params);

struct KinematicLimits {
  double phi_max = 0.6;
  double v_max = 25.0;
  double omega_max = 2.0;  // bound on |theta_ddot| (rad/s^2)
  double yaw_rate_max = std::numeric_limits<double>::infinity();  // |theta_dot| (rad/s)

  bool operator==(const KinematicLimits&) const = default;
};

void validate(const KinematicLimits& limits);

struct RoadBounds {
  double x_min = -std::numeric_limits<double>::infinity();
  double x_max = std::numeric_limits<double>::infinity();
  double y_min = -std::numeric_limits<double>::infinity();
  double y_max = std::numeric_limits<double>::infinity();
};

/// Everything region evolution needs besides the region itself.
struct CorridorSetup {
  RoadBounds road;
  GrowthParams growth;
  KinematicLimits limits;
  /// World-axis half extents of the host body; the road is shrunk by this
  /// amount before clipping.
  Vec2 host_extent{0.0, 0.0};
  /// Host body used to enlarge obstacles. With host_length > 0 each obstacle
  /// box grows, in its own frame, by the host body swept over
  /// host_heading +- heading_spread, so a host center inside the region keeps
  /// its whole body delta_safe away. host_length = 0 separates points only.
  double host_length = 0.0;
  double host_width = 0.0;
  double host_heading = 0.0;
  double heading_spread = 0.0;
};

/// Obstacle box as seen by host centers (see CorridorSetup).
OrientedBox enlarged_obstacle(const OrientedBox& obstacle, const CorridorSetup& setup);

Vec2 host_extent(const VehicleGeometry& geom, double heading, double heading_spread);

Eigen::Matrix2d growth_tensor(const VehicleState& state, double t, const GrowthParams& params);

ConvexRegion init_region(const VehicleState& state, const VehicleGeometry& geom, double margin);

bool contains(const ConvexRegion& region, const Vec2& p);

std::optional<Certificate> separating_certificate(const ConvexRegion& region,
                                                  const OrientedBox& obstacle,
                                                  double delta_safe);

/// Retracts faces of `region` until it is separated from every obstacle,
/// keeping `keep` inside when some retraction allows it and otherwise
/// staying as close to it as possible. Among retractions that keep `keep`,
/// one that also holds `prefer` wins over a larger one that does not.
/// Returns nullopt when no nonempty separated rectangle can be obtained.
std::optional<ConvexRegion> separate_from(const ConvexRegion& region,
                                          std::span<const ObstacleVehicle> obstacles,
                                          const Vec2& keep, const CorridorSetup& setup,
                                          std::optional<Vec2> prefer = std::nullopt);

/// One growth step of duration dt starting at corridor time t. Faces move
/// outward, are clipped to the road, then retracted against the obstacles
/// (already predicted at t + dt). `keep` defaults to the state position.
ConvexRegion grow(const ConvexRegion& region, const VehicleState& state, double t, double dt,
                  std::span<const ObstacleVehicle> obstacles, const CorridorSetup& setup,
                  std::optional<Vec2> keep = std::nullopt,
                  std::optional<Vec2> prefer = std::nullopt);

struct PathSample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

enum class KinematicViolation { kNone, kCurvature, kSpeed, kHeadingAccel, kYawRate };

struct KinematicCheck {
  bool feasible = true;
  KinematicViolation violation = KinematicViolation::kNone;
  int index = -1;  // sample (curvature) or segment (speed, heading) index
  double value = 0.0;
};

std::string to_string(KinematicViolation v);

/// Curvature, speed, and heading-acceleration bounds on a timed polyline.
KinematicCheck kinematic_feasible(std::span<const PathSample> path,
                                  const KinematicLimits& limits, const VehicleGeometry& geom);

/// Regions 0..N. `predictions[k]` holds the obstacles at step k. Optional
/// `anchors[k]` is the position region k should keep (defaults to x0).
/// Optional `headings[k]` sets the host heading used at step k for the road
/// extent and obstacle enlargement. Optional `preferred[k]` (typically the
/// reference position) is passed to separate_from as its `prefer` point.
std::vector<ConvexRegion> generate_corridor(
    const VehicleState& x0, int horizon, double dt,
    const std::vector<std::vector<ObstacleVehicle>>& predictions, const CorridorSetup& setup,
    const VehicleGeometry& geom, double t0 = 0.0, std::span<const Vec2> anchors = {},
    std::span<const double> headings = {}, std::span<const Vec2> preferred = {});

}  // namespace drf

#endif  // DRF_CONVEX_SPACE_HPP_
