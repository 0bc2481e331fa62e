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

#include "drf/vehicle_model.hpp"

#include <cmath>
#include <numbers>

#include "drf/errors.hpp"

namespace drf {

StateVector VehicleState::to_vector() const {
  StateVector s;
  s << x, y, v, theta, phi, phi_dot;
  return s;
}

VehicleState VehicleState::from_vector(const StateVector& s) {
  return {s(kX), s(kY), s(kV), s(kTheta), s(kPhi), s(kPhiDot)};
}

void validate(const VehicleParams& params) {
  const auto& g = params.geometry;
  const auto& l = params.limits;
  if (!(g.wheelbase > 0.0) || !(g.body_length > 0.0) || !(g.body_width > 0.0)) {
    throw ParameterError("vehicle geometry must be strictly positive");
  }
  if (!(g.wheelbase < g.body_length)) {
    throw ParameterError("wheelbase must be shorter than the body length");
  }
  if (!(l.phi_max > 0.0) || !(l.phi_max < std::numbers::pi / 2.0)) {
    throw ParameterError("phi_max must lie in (0, pi/2)");
  }
  if (!(l.a_max > 0.0) || !(l.phi_ddot_max > 0.0)) {
    throw ParameterError("actuator limits must be strictly positive");
  }
}

namespace {

void require_finite(const VehicleState& s, const ControlInput& u) {
  const bool ok = std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.v) &&
                  std::isfinite(s.theta) && std::isfinite(s.phi) &&
                  std::isfinite(s.phi_dot) && std::isfinite(u.a) &&
                  std::isfinite(u.phi_ddot);
  if (!ok) throw InvalidStateError("non-finite vehicle state or control");
}

}  // namespace

VehicleState step(const VehicleState& s, const ControlInput& u, double dt,
                  const VehicleParams& params) {
  if (!(dt > 0.0)) throw ParameterError("step: dt must be positive");
  require_finite(s, u);
  const double L = params.geometry.wheelbase;
  const double phi_max = params.limits.phi_max;

  VehicleState next;
  next.x = s.x + dt * s.v * std::cos(s.theta);
  next.y = s.y + dt * s.v * std::sin(s.theta);
  next.v = std::max(0.0, s.v + dt * u.a);
  next.theta = wrap_angle(s.theta + dt * s.v * std::tan(s.phi) / L);
  next.phi = s.phi + dt * s.phi_dot;
  next.phi_dot = s.phi_dot + dt * u.phi_ddot;
  if (std::abs(next.phi) > phi_max) {
    next.phi = std::copysign(phi_max, next.phi);
    next.phi_dot = 0.0;
  }
  return next;
}

DynamicsJacobians jacobians(const VehicleState& s, const ControlInput& u,
                            double dt, const VehicleParams& params) {
  if (!(std::abs(s.phi) < std::numbers::pi / 2.0)) {
    throw SingularSteeringError("jacobians: |phi| must be below pi/2");
  }
  const double L = params.geometry.wheelbase;
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  const double t = std::tan(s.phi);
  const double sec2 = 1.0 + t * t;

  DynamicsJacobians J;
  J.A.setIdentity();
  J.B.setZero();
  J.A(kX, kV) = dt * c;
  J.A(kX, kTheta) = -dt * s.v * sn;
  J.A(kY, kV) = dt * sn;
  J.A(kY, kTheta) = dt * s.v * c;
  J.A(kTheta, kV) = dt * t / L;
  J.A(kTheta, kPhi) = dt * s.v * sec2 / L;
  J.A(kPhi, kPhiDot) = dt;
  J.B(kV, kAccel) = dt;
  J.B(kPhiDot, kPhiDdot) = dt;

  if (s.v + dt * u.a < 0.0) {
    J.A.row(kV).setZero();
    J.B.row(kV).setZero();
  }
  if (std::abs(s.phi + dt * s.phi_dot) > params.limits.phi_max) {
    J.A.row(kPhi).setZero();
    J.A.row(kPhiDot).setZero();
    J.B.row(kPhiDot).setZero();
  }
  return J;
}

double curvature(double phi, const VehicleGeometry& geom) {
  return std::tan(phi) / geom.wheelbase;
}

OrientedBox footprint(const VehicleState& state, const VehicleGeometry& geom) {
  return {state.position(), state.theta, geom.body_length, geom.body_width};
}

}  // namespace drf
