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

#ifndef DRF_RISK_FIELD_HPP_
#define DRF_RISK_FIELD_HPP_

#include <span>
#include <vector>

#include <Eigen/Core>

#include "drf/geometry.hpp"
#include "drf/obstacle.hpp"
#include "drf/vehicle_model.hpp"

namespace drf {

struct RiskFieldParams {
  double A_s = 1.0;          // static peak amplitude
  double sigma_x = 4.0;      // longitudinal spread (m)
  double sigma_y = 1.2;      // lateral spread (m)
  double beta = 1.0;         // static decay shape exponent
  double A_d = 0.8;          // dynamic amplitude
  double k_v = 0.5;          // velocity-to-spread gain (s)
  double alpha_shift = 1.0;  // sigmoid position modulation
  double d_e = 20.0;         // host-distance decay length (m)
  double sigma_v_min = 0.5;  // floor on the velocity spread (m)

  bool operator==(const RiskFieldParams&) const = default;
};

void validate(const RiskFieldParams& params);

/// Where the host-distance decay is anchored and which host speed enters
/// the relative velocity. During planning both are the measured host state
/// at the start of the cycle.
struct RiskAnchor {
  Vec2 host_position{0.0, 0.0};
  double host_speed = 0.0;

  static RiskAnchor from_state(const VehicleState& s) { return {s.position(), s.v}; }
};

/// Relative position expressed in the obstacle body frame.
Vec2 to_obstacle_frame(const Vec2& p, const ObstacleVehicle& obs);

double static_risk(const Vec2& p, const ObstacleVehicle& obs,
                   const RiskFieldParams& params);

/// Velocity-skewed lobe; sgn(0) is taken as 0 and the velocity spread is
/// floored at sigma_v_min.
double dynamic_risk(const Vec2& p, const ObstacleVehicle& obs, double v_host,
                    const RiskFieldParams& params);

double decay_factor(const Vec2& p, const Vec2& host, double d_e);

/// Sum over obstacles of (static + dynamic) * decay.
double total_risk(const Vec2& p, std::span<const ObstacleVehicle> obstacles,
                  const RiskAnchor& anchor, const RiskFieldParams& params);
double total_risk(const Vec2& p, std::span<const ObstacleVehicle> obstacles,
                  const VehicleState& host, const RiskFieldParams& params);

/// Analytic spatial gradient of total_risk.
Vec2 risk_gradient(const Vec2& p, std::span<const ObstacleVehicle> obstacles,
                   const RiskAnchor& anchor, const RiskFieldParams& params);
Vec2 risk_gradient(const Vec2& p, std::span<const ObstacleVehicle> obstacles,
                   const VehicleState& host, const RiskFieldParams& params);

/// Hessian of total_risk by central differences of the analytic gradient.
Eigen::Matrix2d risk_hessian(const Vec2& p, std::span<const ObstacleVehicle> obstacles,
                             const RiskAnchor& anchor, const RiskFieldParams& params,
                             double h = 1e-5);

struct GridBounds {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

/// Row-major samples: values[j * nx + i] is the risk at
/// (x_min + i * resolution, y_min + j * resolution).
struct RiskGrid {
  GridBounds bounds;
  double resolution = 1.0;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
};

RiskGrid risk_grid(const GridBounds& bounds, double resolution,
                   std::span<const ObstacleVehicle> obstacles,
                   const RiskAnchor& anchor, const RiskFieldParams& params);

}  // namespace drf

#endif  // DRF_RISK_FIELD_HPP_
