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

#include "drf/risk_field.hpp"

#include <cmath>

#include "drf/errors.hpp"

namespace drf {

void validate(const RiskFieldParams& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ParameterError(std::string("risk.") + name + " must be > 0");
  };
  positive(p.A_s, "A_s");
  positive(p.sigma_x, "sigma_x");
  positive(p.sigma_y, "sigma_y");
  positive(p.A_d, "A_d");
  positive(p.k_v, "k_v");
  positive(p.alpha_shift, "alpha_shift");
  positive(p.d_e, "d_e");
  positive(p.sigma_v_min, "sigma_v_min");
  if (!(p.beta >= 0.5)) throw ParameterError("risk.beta must be >= 0.5");
}

namespace {

double sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// 1 / (1 + exp(z)) without overflow.
double logistic_complement(double z) {
  if (z > 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

struct LobeTerms {
  double value = 0.0;
  Vec2 grad_local{0.0, 0.0};  // gradient w.r.t. (dx', dy')
};

LobeTerms static_lobe(const Vec2& d, const RiskFieldParams& p) {
  const double ux = d.x() / p.sigma_x;
  const double uy = d.y() / p.sigma_y;
  const double r2 = ux * ux + uy * uy;
  LobeTerms out;
  out.value = p.A_s * std::exp(-std::pow(r2, p.beta));
  if (r2 > 0.0) {
    const double outer = -out.value * p.beta * std::pow(r2, p.beta - 1.0);
    out.grad_local = outer * Vec2(2.0 * d.x() / (p.sigma_x * p.sigma_x),
                                  2.0 * d.y() / (p.sigma_y * p.sigma_y));
  }
  return out;
}

LobeTerms dynamic_lobe(const Vec2& d, double v_rel, const RiskFieldParams& p) {
  const double s = sign_of(v_rel);
  const double sigma_v = std::max(p.k_v * std::abs(v_rel), p.sigma_v_min);
  const double numer = p.A_d * std::exp(-d.x() * d.x() / (sigma_v * sigma_v) -
                                        d.y() * d.y() / (p.sigma_y * p.sigma_y));
  const double z = -s * (d.x() - p.alpha_shift * p.sigma_x * s);
  const double sig = logistic_complement(z);
  LobeTerms out;
  out.value = numer * sig;
  out.grad_local = Vec2(out.value * (-2.0 * d.x() / (sigma_v * sigma_v) + s * (1.0 - sig)),
                        out.value * (-2.0 * d.y() / (p.sigma_y * p.sigma_y)));
  return out;
}

// Transpose of the obstacle-frame rotation, mapping local gradients back.
Vec2 to_world_gradient(const Vec2& g_local, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * g_local.x() - s * g_local.y(), s * g_local.x() + c * g_local.y()};
}

}  // namespace

Vec2 to_obstacle_frame(const Vec2& p, const ObstacleVehicle& obs) {
  const double c = std::cos(obs.theta);
  const double s = std::sin(obs.theta);
  const double dx = p.x() - obs.x;
  const double dy = p.y() - obs.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

double static_risk(const Vec2& p, const ObstacleVehicle& obs, const RiskFieldParams& params) {
  return static_lobe(to_obstacle_frame(p, obs), params).value;
}

double dynamic_risk(const Vec2& p, const ObstacleVehicle& obs, double v_host,
                    const RiskFieldParams& params) {
  return dynamic_lobe(to_obstacle_frame(p, obs), obs.v - v_host, params).value;
}

double decay_factor(const Vec2& p, const Vec2& host, double d_e) {
  return std::exp(-(p - host).norm() / d_e);
}

double total_risk(const Vec2& p, std::span<const ObstacleVehicle> obstacles,
                  const RiskAnchor& anchor, const RiskFieldParams& params) {
  if (obstacles.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& obs : obstacles) {
    const Vec2 d = to_obstacle_frame(p, obs);
    sum += static_lobe(d, params).value +
           dynamic_lobe(d, obs.v - anchor.host_speed, params).value;
  }
  return sum * decay_factor(p, anchor.host_position, params.d_e);
}

double total_risk(const Vec2& p, std::span<const ObstacleVehicle> obstacles,
                  const VehicleState& host, const RiskFieldParams& params) {
  return total_risk(p, obstacles, RiskAnchor::from_state(host), params);
}

Vec2 risk_gradient(const Vec2& p, std::span<const ObstacleVehicle> obstacles,
                   const RiskAnchor& anchor, const RiskFieldParams& params) {
  if (obstacles.empty()) return Vec2::Zero();
  double lobes = 0.0;
  Vec2 lobe_grad = Vec2::Zero();
  for (const auto& obs : obstacles) {
    const Vec2 d = to_obstacle_frame(p, obs);
    const LobeTerms st = static_lobe(d, params);
    const LobeTerms dy = dynamic_lobe(d, obs.v - anchor.host_speed, params);
    lobes += st.value + dy.value;
    lobe_grad += to_world_gradient(st.grad_local + dy.grad_local, obs.theta);
  }
  const Vec2 rel = p - anchor.host_position;
  const double dist = rel.norm();
  const double F = std::exp(-dist / params.d_e);
  Vec2 grad = F * lobe_grad;
  if (dist > 0.0) grad += lobes * (-F / params.d_e) * (rel / dist);
  return grad;
}

Vec2 risk_gradient(const Vec2& p, std::span<const ObstacleVehicle> obstacles,
                   const VehicleState& host, const RiskFieldParams& params) {
  return risk_gradient(p, obstacles, RiskAnchor::from_state(host), params);
}

Eigen::Matrix2d risk_hessian(const Vec2& p, std::span<const ObstacleVehicle> obstacles,
                             const RiskAnchor& anchor, const RiskFieldParams& params,
                             double h) {
  Eigen::Matrix2d H;
  for (int i = 0; i < 2; ++i) {
    Vec2 e = Vec2::Zero();
    e(i) = h;
    H.col(i) = (risk_gradient(p + e, obstacles, anchor, params) -
                risk_gradient(p - e, obstacles, anchor, params)) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

RiskGrid risk_grid(const GridBounds& bounds, double resolution,
                   std::span<const ObstacleVehicle> obstacles,
                   const RiskAnchor& anchor, const RiskFieldParams& params) {
  if (!(resolution > 0.0)) throw ParameterError("risk_grid: resolution must be positive");
  const bool finite = std::isfinite(bounds.x_min) && std::isfinite(bounds.x_max) &&
                      std::isfinite(bounds.y_min) && std::isfinite(bounds.y_max);
  if (!finite || !(bounds.x_max > bounds.x_min) || !(bounds.y_max > bounds.y_min)) {
    throw ParameterError("risk_grid: degenerate bounds");
  }
  RiskGrid grid;
  grid.bounds = bounds;
  grid.resolution = resolution;
  grid.nx = static_cast<int>(std::floor((bounds.x_max - bounds.x_min) / resolution + 1e-9)) + 1;
  grid.ny = static_cast<int>(std::floor((bounds.y_max - bounds.y_min) / resolution + 1e-9)) + 1;
  grid.values.resize(static_cast<std::size_t>(grid.nx) * grid.ny);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 p(bounds.x_min + i * resolution, bounds.y_min + j * resolution);
      grid.values[static_cast<std::size_t>(j) * grid.nx + i] =
          total_risk(p, obstacles, anchor, params);
    }
  }
  return grid;
}

}  // namespace drf
