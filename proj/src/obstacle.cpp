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

#include "drf/obstacle.hpp"

#include <cmath>
#include <numbers>

#include "drf/errors.hpp"

namespace drf {

void validate(const ObstacleVehicle& obs) {
  if (!(obs.v >= 0.0)) throw ParameterError("obstacle speed must be non-negative");
  if (!(obs.body_length > 0.0) || !(obs.body_width > 0.0)) {
    throw ParameterError("obstacle footprint must be strictly positive");
  }
  if (const auto* arc = std::get_if<ArcMotion>(&obs.motion)) {
    if (!(arc->radius > 0.0)) throw ParameterError("arc radius must be positive");
  }
  if (const auto* wp = std::get_if<WaypointMotion>(&obs.motion)) {
    if (wp->points.empty()) throw ParameterError("waypoint script is empty");
    for (std::size_t i = 1; i < wp->points.size(); ++i) {
      if (!(wp->points[i].t > wp->points[i - 1].t)) {
        throw ParameterError("waypoint times must be strictly increasing");
      }
    }
  }
}

namespace {

ObstacleVehicle on_arc(ObstacleVehicle obs, const ArcMotion& arc, double angle) {
  obs.x = arc.center.x() + arc.radius * std::cos(angle);
  obs.y = arc.center.y() + arc.radius * std::sin(angle);
  const double dir = arc.angular_rate >= 0.0 ? 1.0 : -1.0;
  obs.theta = wrap_angle(angle + dir * std::numbers::pi / 2.0);
  obs.v = std::abs(arc.angular_rate) * arc.radius;
  return obs;
}

double arc_angle(const ObstacleVehicle& obs, const ArcMotion& arc) {
  return std::atan2(obs.y - arc.center.y(), obs.x - arc.center.x());
}

ObstacleVehicle on_waypoints(ObstacleVehicle obs, const WaypointMotion& wp, double t) {
  const auto& p = wp.points;
  if (p.size() == 1 || t <= p.front().t) {
    obs.x = p.front().x;
    obs.y = p.front().y;
    if (p.size() > 1) {
      obs.theta = std::atan2(p[1].y - p[0].y, p[1].x - p[0].x);
    }
    obs.v = 0.0;
    return obs;
  }
  if (t >= p.back().t) {
    const auto& a = p[p.size() - 2];
    const auto& b = p.back();
    obs.x = b.x;
    obs.y = b.y;
    obs.theta = std::atan2(b.y - a.y, b.x - a.x);
    obs.v = 0.0;
    return obs;
  }
  std::size_t i = 1;
  while (p[i].t < t) ++i;
  const auto& a = p[i - 1];
  const auto& b = p[i];
  const double s = (t - a.t) / (b.t - a.t);
  obs.x = a.x + s * (b.x - a.x);
  obs.y = a.y + s * (b.y - a.y);
  obs.theta = std::atan2(b.y - a.y, b.x - a.x);
  obs.v = std::hypot(b.x - a.x, b.y - a.y) / (b.t - a.t);
  return obs;
}

ObstacleVehicle straight(ObstacleVehicle obs, double dt) {
  obs.x += obs.v * std::cos(obs.theta) * dt;
  obs.y += obs.v * std::sin(obs.theta) * dt;
  return obs;
}

}  // namespace

ObstacleVehicle place_on_script(const ObstacleVehicle& obs, double t) {
  if (const auto* arc = std::get_if<ArcMotion>(&obs.motion)) {
    return on_arc(obs, *arc, arc_angle(obs, *arc));
  }
  if (const auto* wp = std::get_if<WaypointMotion>(&obs.motion)) {
    return on_waypoints(obs, *wp, t);
  }
  return obs;
}

std::vector<ObstacleVehicle> advance_obstacles(
    const std::vector<ObstacleVehicle>& obstacles, double t, double dt) {
  std::vector<ObstacleVehicle> out;
  out.reserve(obstacles.size());
  for (const auto& obs : obstacles) {
    if (dt == 0.0) {
      out.push_back(obs);
    } else if (const auto* arc = std::get_if<ArcMotion>(&obs.motion)) {
      out.push_back(on_arc(obs, *arc, arc_angle(obs, *arc) + arc->angular_rate * dt));
    } else if (const auto* wp = std::get_if<WaypointMotion>(&obs.motion)) {
      out.push_back(on_waypoints(obs, *wp, t + dt));
    } else {
      out.push_back(straight(obs, dt));
    }
  }
  return out;
}

std::vector<std::vector<ObstacleVehicle>> predict_obstacles(
    const std::vector<ObstacleVehicle>& obstacles, int steps, double dt, PredictionModel model,
    double t0) {
  std::vector<std::vector<ObstacleVehicle>> out;
  out.reserve(steps + 1);
  out.push_back(obstacles);
  for (int k = 1; k <= steps; ++k) {
    std::vector<ObstacleVehicle> next;
    next.reserve(obstacles.size());
    for (const auto& obs : obstacles) {
      if (const auto* arc = std::get_if<ArcMotion>(&obs.motion)) {
        next.push_back(on_arc(obs, *arc, arc_angle(obs, *arc) + arc->angular_rate * k * dt));
      } else if (model == PredictionModel::kScript &&
                 std::holds_alternative<WaypointMotion>(obs.motion)) {
        next.push_back(place_on_script(obs, t0 + k * dt));
      } else {
        next.push_back(straight(obs, k * dt));
      }
    }
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace drf
