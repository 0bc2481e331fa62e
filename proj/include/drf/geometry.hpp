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

#ifndef DRF_GEOMETRY_HPP_
#define DRF_GEOMETRY_HPP_

#include <array>

#include <Eigen/Core>

namespace drf {

using Vec2 = Eigen::Vector2d;

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

/// Oriented rectangle: center, heading of the long axis, full extents.
struct OrientedBox {
  Vec2 center{0.0, 0.0};
  double heading = 0.0;
  double length = 1.0;
  double width = 1.0;

  /// Corners in counter-clockwise order starting at front-left.
  std::array<Vec2, 4> corners() const;
  /// Unit vectors of the body frame: longitudinal then lateral.
  std::array<Vec2, 2> axes() const;
};

/// Axis-aligned world-frame half extents of a box of the given size at
/// any heading within [heading - spread, heading + spread].
Vec2 swept_half_extents(double length, double width, double heading,
                        double spread);

/// Euclidean separation of two oriented boxes; <= 0 when they overlap
/// (the value is then minus the minimum penetration along a separating
/// axis candidate).
double box_clearance(const OrientedBox& a, const OrientedBox& b);

}  // namespace drf

#endif  // DRF_GEOMETRY_HPP_
