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

#ifndef DRF_VEHICLE_MODEL_HPP_
#define DRF_VEHICLE_MODEL_HPP_

#include <Eigen/Core>

#include "drf/geometry.hpp"

namespace drf {

inline constexpr int kStateDim = 6;
inline constexpr int kControlDim = 2;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using ControlVector = Eigen::Matrix<double, kControlDim, 1>;
using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using ControlMatrix = Eigen::Matrix<double, kStateDim, kControlDim>;

// Index layout of the planner state vector.
enum StateIndex : int { kX = 0, kY = 1, kV = 2, kTheta = 3, kPhi = 4, kPhiDot = 5 };
enum ControlIndex : int { kAccel = 0, kPhiDdot = 1 };

struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double v = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double phi_dot = 0.0;

  Vec2 position() const { return {x, y}; }
  StateVector to_vector() const;
  static VehicleState from_vector(const StateVector& s);

  bool operator==(const VehicleState&) const = default;
};

struct ControlInput {
  double a = 0.0;
  double phi_ddot = 0.0;

  ControlVector to_vector() const { return {a, phi_ddot}; }
  static ControlInput from_vector(const ControlVector& u) { return {u(0), u(1)}; }

  bool operator==(const ControlInput&) const = default;
};

struct VehicleGeometry {
  double wheelbase = 2.7;
  double body_length = 4.5;
  double body_width = 1.8;

  bool operator==(const VehicleGeometry&) const = default;
};

struct ActuatorLimits {
  double phi_max = 0.6;
  double a_max = 3.0;
  double phi_ddot_max = 4.0;

  bool operator==(const ActuatorLimits&) const = default;
};

struct VehicleParams {
  VehicleGeometry geometry;
  ActuatorLimits limits;

  bool operator==(const VehicleParams&) const = default;
};

/// Throws ParameterError unless the geometry and limits are physical.
void validate(const VehicleParams& params);

/// One explicit Euler step of the rear-axle kinematic bicycle with a
/// double-integrator steering chain. Heading is rewrapped, speed is floored
/// at zero, and steering is clamped to +-phi_max with the steering rate
/// zeroed on saturation.
VehicleState step(const VehicleState& state, const ControlInput& u, double dt,
                  const VehicleParams& params);

struct DynamicsJacobians {
  StateMatrix A;
  ControlMatrix B;
};

/// Analytic derivatives of `step` with respect to state and control.
DynamicsJacobians jacobians(const VehicleState& state, const ControlInput& u,
                            double dt, const VehicleParams& params);

/// Path curvature of the bicycle at steering angle phi.
double curvature(double phi, const VehicleGeometry& geom);

/// Footprint of the host body centered on the state position.
OrientedBox footprint(const VehicleState& state, const VehicleGeometry& geom);

}  // namespace drf

#endif  // DRF_VEHICLE_MODEL_HPP_
