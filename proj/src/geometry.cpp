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

#include "drf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace drf {

double wrap_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  // In-range angles come back bit-for-bit.
  if (angle > -std::numbers::pi && angle <= std::numbers::pi) return angle;
  double wrapped = std::fmod(angle + std::numbers::pi, kTwoPi);
  if (wrapped <= 0.0) wrapped += kTwoPi;
  return wrapped - std::numbers::pi;
}

std::array<Vec2, 4> OrientedBox::corners() const {
  const auto [u, n] = axes();
  const Vec2 hl = 0.5 * length * u;
  const Vec2 hw = 0.5 * width * n;
  return {center + hl + hw, center - hl + hw, center - hl - hw,
          center + hl - hw};
}

std::array<Vec2, 2> OrientedBox::axes() const {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  return {Vec2(c, s), Vec2(-s, c)};
}

Vec2 swept_half_extents(double length, double width, double heading,
                        double spread) {
  // The half-extent along world x is hl|cos h| + hw|sin h|; over a heading
  // interval its maximum is attained either at an endpoint or where the
  // derivative vanishes, so sample both endpoints and the interior extrema.
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  auto ext = [&](double h) {
    return Vec2(hl * std::abs(std::cos(h)) + hw * std::abs(std::sin(h)),
                hl * std::abs(std::sin(h)) + hw * std::abs(std::cos(h)));
  };
  Vec2 best = ext(heading - spread).cwiseMax(ext(heading + spread));
  const double lo = heading - spread;
  const double hi = heading + spread;
  const double phase_x = std::atan2(hw, hl);
  const double phase_y = std::atan2(hl, hw);
  for (int k = -8; k <= 8; ++k) {
    const double base = k * std::numbers::pi / 2.0;
    for (double cand : {base + phase_x, base - phase_x, base + phase_y,
                        base - phase_y}) {
      if (cand > lo && cand < hi) best = best.cwiseMax(ext(cand));
    }
  }
  return best;
}

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

double box_clearance(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  // Separating-axis overlap test over the four body axes.
  double max_gap = -std::numeric_limits<double>::infinity();
  for (const auto& axes : {a.axes(), b.axes()}) {
    for (const Vec2& n : axes) {
      double amin = std::numeric_limits<double>::infinity();
      double amax = -amin;
      double bmin = amin;
      double bmax = -amin;
      for (const Vec2& p : ca) {
        amin = std::min(amin, n.dot(p));
        amax = std::max(amax, n.dot(p));
      }
      for (const Vec2& q : cb) {
        bmin = std::min(bmin, n.dot(q));
        bmax = std::max(bmax, n.dot(q));
      }
      max_gap = std::max(max_gap, std::max(bmin - amax, amin - bmax));
    }
  }
  if (max_gap <= 0.0) return max_gap;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, point_segment_distance(ca[i], cb[j], cb[(j + 1) % 4]));
      best = std::min(best, point_segment_distance(cb[i], ca[j], ca[(j + 1) % 4]));
    }
  }
  return best;
}

}  // namespace drf
