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

#include "drf/convex_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "drf/errors.hpp"

namespace drf {

namespace {
constexpr double kContainTol = 1e-9;
constexpr double kGapTol = 1e-12;
}  // namespace

Vec2 ConvexRegion::clamp(const Vec2& p) const {
  return {std::clamp(p.x(), x_lower, x_upper), std::clamp(p.y(), y_lower, y_upper)};
}

double ConvexRegion::distance(const Vec2& p) const { return (p - clamp(p)).norm(); }

ConvexRegion ConvexRegion::inflated(const Vec2& e) const {
  ConvexRegion r = *this;
  r.x_lower -= e.x();
  r.x_upper += e.x();
  r.y_lower -= e.y();
  r.y_upper += e.y();
  return r;
}

ConvexRegion ConvexRegion::shrunk(double m) const {
  ConvexRegion r = *this;
  const double mx = std::min(m, 0.5 * width());
  const double my = std::min(m, 0.5 * height());
  r.x_lower += mx;
  r.x_upper -= mx;
  r.y_lower += my;
  r.y_upper -= my;
  return r;
}

std::array<Vec2, 4> ConvexRegion::corners() const {
  return {Vec2(x_upper, y_upper), Vec2(x_lower, y_upper), Vec2(x_lower, y_lower),
          Vec2(x_upper, y_lower)};
}

void validate(const GrowthParams& p) {
  if (!(p.eta > 0.0) || !(p.v_ref > 0.0) || !(p.gamma_0 > 0.0) || !(p.lambda > 0.0) ||
      !(p.delta_safe > 0.0)) {
    throw ParameterError("growth parameters must be strictly positive");
  }
  if (!(p.alpha_max >= 1.0)) throw ParameterError("growth.alpha_max must be >= 1");
  if (!(p.init_margin >= 0.0)) throw ParameterError("growth.init_margin must be >= 0");
}

void validate(const KinematicLimits& l) {
  if (!(l.phi_max > 0.0) || !(l.phi_max < std::numbers::pi / 2.0)) {
    throw ParameterError("kinematic phi_max must lie in (0, pi/2)");
  }
  if (!(l.v_max > 0.0) || !(l.omega_max > 0.0) || !(l.yaw_rate_max > 0.0)) {
    throw ParameterError("kinematic limits must be strictly positive");
  }
}

Vec2 host_extent(const VehicleGeometry& geom, double heading, double heading_spread) {
  return swept_half_extents(geom.body_length, geom.body_width, heading, heading_spread);
}

Eigen::Matrix2d growth_tensor(const VehicleState& state, double t, const GrowthParams& p) {
  if (!(t >= 0.0)) throw ParameterError("growth_tensor: t must be >= 0");
  const double alpha = std::min(1.0 + p.eta * state.v / p.v_ref, p.alpha_max);
  const double c = std::cos(state.theta);
  const double s = std::sin(state.theta);
  Eigen::Matrix2d heading;
  heading << std::abs(c), -s, s, std::abs(c);
  const double gamma = p.gamma_0 * std::exp(-p.lambda * t);
  return alpha * gamma * heading;
}

ConvexRegion init_region(const VehicleState& state, const VehicleGeometry& geom, double margin) {
  if (!(margin >= 0.0)) throw ParameterError("init_region: margin must be >= 0");
  const Vec2 e = host_extent(geom, state.theta, 0.0);
  ConvexRegion r;
  r.x_lower = state.x - e.x() - margin;
  r.x_upper = state.x + e.x() + margin;
  r.y_lower = state.y - e.y() - margin;
  r.y_upper = state.y + e.y() + margin;
  return r;
}

bool contains(const ConvexRegion& r, const Vec2& p) {
  return p.x() >= r.x_lower && p.x() <= r.x_upper && p.y() >= r.y_lower && p.y() <= r.y_upper;
}

std::optional<Certificate> separating_certificate(const ConvexRegion& region,
                                                  const OrientedBox& obstacle,
                                                  double delta_safe) {
  const auto rc = region.corners();
  const auto oc = obstacle.corners();
  const auto oa = obstacle.axes();
  const std::array<Vec2, 8> normals = {Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1),
                                       oa[0],      -oa[0],      oa[1],      -oa[1]};
  std::optional<Certificate> best;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (const Vec2& n : normals) {
    double a = -std::numeric_limits<double>::infinity();
    double b = std::numeric_limits<double>::infinity();
    for (const Vec2& p : rc) a = std::max(a, n.dot(p));
    for (const Vec2& q : oc) b = std::min(b, n.dot(q));
    const double gap = b - a;
    if (gap >= delta_safe - kGapTol && gap > best_gap) {
      best_gap = gap;
      best = Certificate{n, a, 0};
    }
  }
  return best;
}

namespace {

// Keeps retracted faces strictly on the safe side of rounding.
constexpr double kRetractSlack = 1e-9;

// Candidate rectangles that clear `obs` by delta_safe along one candidate
// normal, each obtained by pulling in one face (or, for a tilted normal, the
// two faces meeting at the corner nearest the obstacle).
std::vector<ConvexRegion> face_retractions(const ConvexRegion& r, const OrientedBox& obs,
                                           double delta_safe, const Vec2& keep) {
  const auto oa = obs.axes();
  const auto oc = obs.corners();
  const std::array<Vec2, 8> normals = {Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1),
                                       oa[0],      -oa[0],      oa[1],      -oa[1]};
  std::vector<ConvexRegion> out;
  out.reserve(16);
  for (const Vec2& n : normals) {
    double c = std::numeric_limits<double>::infinity();
    for (const Vec2& q : oc) c = std::min(c, n.dot(q));
    c -= delta_safe + kRetractSlack;
    const double xs = n.x() > 0.0 ? r.x_upper : r.x_lower;
    const double ys = n.y() > 0.0 ? r.y_upper : r.y_lower;
    if (std::abs(n.x()) > 1e-12) {
      ConvexRegion cand = r;
      const double bound = (c - n.y() * ys) / n.x();
      if (n.x() > 0.0) {
        cand.x_upper = std::min(r.x_upper, bound);
      } else {
        cand.x_lower = std::max(r.x_lower, bound);
      }
      out.push_back(cand);
    }
    if (std::abs(n.y()) > 1e-12) {
      ConvexRegion cand = r;
      const double bound = (c - n.x() * xs) / n.y();
      if (n.y() > 0.0) {
        cand.y_upper = std::min(r.y_upper, bound);
      } else {
        cand.y_lower = std::max(r.y_lower, bound);
      }
      out.push_back(cand);
    }
    // A tilted normal can need two faces to move: pull the corner facing
    // the obstacle toward `keep` until it clears the half-plane.
    if (std::abs(n.x()) > 1e-12 && std::abs(n.y()) > 1e-12 && contains(r, keep)) {
      const Vec2 corner(xs, ys);
      const double slack = c - n.dot(keep);
      const double reach = n.dot(corner - keep);
      if (slack > 0.0 && reach > slack) {
        const Vec2 moved = keep + (slack / reach) * (corner - keep);
        ConvexRegion cand = r;
        (n.x() > 0.0 ? cand.x_upper : cand.x_lower) = moved.x();
        (n.y() > 0.0 ? cand.y_upper : cand.y_lower) = moved.y();
        out.push_back(cand);
      }
    }
  }
  return out;
}

}  // namespace

OrientedBox enlarged_obstacle(const OrientedBox& obs, const CorridorSetup& setup) {
  if (!(setup.host_length > 0.0)) return obs;
  const Vec2 e = swept_half_extents(setup.host_length, setup.host_width,
                                    setup.host_heading - obs.heading, setup.heading_spread);
  return {obs.center, obs.heading, obs.length + 2.0 * e.x(), obs.width + 2.0 * e.y()};
}

std::optional<ConvexRegion> separate_from(const ConvexRegion& region,
                                          std::span<const ObstacleVehicle> obstacles,
                                          const Vec2& keep, const CorridorSetup& setup,
                                          std::optional<Vec2> prefer) {
  const double d = setup.growth.delta_safe;
  ConvexRegion r = region;
  r.certificates.clear();
  bool keep_inside = contains(r, keep);
  // Candidates holding `prefer` as well rank above larger ones without it.
  auto better = [&](const ConvexRegion& c, const ConvexRegion& best) {
    if (prefer) {
      const bool a = contains(c, *prefer);
      const bool b = contains(best, *prefer);
      if (a != b) return a;
    }
    return c.area() > best.area();
  };
  for (const auto& obs : obstacles) {
    const OrientedBox box = enlarged_obstacle(obs.footprint(), setup);
    if (separating_certificate(r, box, d)) continue;
    std::optional<ConvexRegion> pick;
    std::optional<ConvexRegion> fallback;
    for (const auto& c : face_retractions(r, box, d, keep)) {
      if (!c.valid()) continue;
      if (keep_inside && contains(c, keep) && (!pick || better(c, *pick))) pick = c;
      // Without a candidate holding `keep`, stay as close to it as possible.
      if (!fallback || c.distance(keep) < fallback->distance(keep) ||
          (c.distance(keep) == fallback->distance(keep) && c.area() > fallback->area())) {
        fallback = c;
      }
    }
    if (!pick) pick = fallback;
    if (!pick) return std::nullopt;
    r = *pick;
    keep_inside = keep_inside && contains(r, keep);
  }
  for (const auto& obs : obstacles) {
    auto cert = separating_certificate(r, enlarged_obstacle(obs.footprint(), setup), d);
    if (!cert) return std::nullopt;
    cert->obstacle_id = obs.id;
    r.certificates.push_back(*cert);
  }
  return r;
}

ConvexRegion grow(const ConvexRegion& region, const VehicleState& state, double t, double dt,
                  std::span<const ObstacleVehicle> obstacles, const CorridorSetup& setup,
                  std::optional<Vec2> keep, std::optional<Vec2> prefer) {
  if (!(dt >= 0.0)) throw ParameterError("grow: dt must be >= 0");
  if (!region.valid()) throw ParameterError("grow: region has an empty interior");
  const Vec2 pos = state.position();
  if (region.distance(pos) > kContainTol) {
    throw InfeasibleSeedError("grow: state lies outside the region");
  }
  if (dt == 0.0) return region;

  // Faces stay axis-aligned; each moves by |G n| integrated exactly over
  // [t, t + dt] (G decays as exp(-lambda t) with the state frozen), capped by
  // the reachable distance v_max * dt.
  const Eigen::Matrix2d G = growth_tensor(state, t, setup.growth);
  const double lam = setup.growth.lambda;
  const double span = -std::expm1(-lam * dt) / lam;
  const double cap = setup.limits.v_max * dt;
  auto push = [&](const Vec2& n) { return std::min((G * n).norm() * span, cap); };
  ConvexRegion r = region;
  r.x_upper += push(Vec2(1, 0));
  r.x_lower -= push(Vec2(-1, 0));
  r.y_upper += push(Vec2(0, 1));
  r.y_lower -= push(Vec2(0, -1));
  r.t = region.t + dt;

  const Vec2 target = keep.value_or(pos);
  const Vec2& e = setup.host_extent;
  const RoadBounds& road = setup.road;
  r.x_lower = std::max(r.x_lower, std::min(road.x_min + e.x(), std::min(target.x(), region.x_lower)));
  r.x_upper = std::min(r.x_upper, std::max(road.x_max - e.x(), std::max(target.x(), region.x_upper)));
  r.y_lower = std::max(r.y_lower, std::min(road.y_min + e.y(), std::min(target.y(), region.y_lower)));
  r.y_upper = std::min(r.y_upper, std::max(road.y_max - e.y(), std::max(target.y(), region.y_upper)));

  auto out = separate_from(r, obstacles, target, setup, prefer);
  if (!out) throw InfeasibleSeedError("grow: obstacles leave no feasible rectangle");
  return *out;
}

std::string to_string(KinematicViolation v) {
  switch (v) {
    case KinematicViolation::kNone: return "none";
    case KinematicViolation::kCurvature: return "curvature";
    case KinematicViolation::kSpeed: return "speed";
    case KinematicViolation::kHeadingAccel: return "heading_accel";
    case KinematicViolation::kYawRate: return "yaw_rate";
  }
  return "unknown";
}

KinematicCheck kinematic_feasible(std::span<const PathSample> path,
                                  const KinematicLimits& limits, const VehicleGeometry& geom) {
  if (path.size() < 3) throw ParameterError("kinematic_feasible: need at least 3 samples");
  constexpr double kTol = 1e-9;
  const double kappa_max = std::tan(limits.phi_max) / geom.wheelbase;
  const std::size_t n = path.size();
  auto pt = [&](std::size_t i) { return Vec2(path[i].x, path[i].y); };

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dt = path[i + 1].t - path[i].t;
    if (!(dt > 0.0)) throw ParameterError("kinematic_feasible: timestamps must increase");
    const double speed = (pt(i + 1) - pt(i)).norm() / dt;
    if (speed > limits.v_max + kTol) {
      return {false, KinematicViolation::kSpeed, static_cast<int>(i), speed};
    }
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec2 a = pt(i - 1), b = pt(i), c = pt(i + 1);
    const double ab = (b - a).norm(), bc = (c - b).norm(), ca = (a - c).norm();
    const double cross = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
    const double denom = ab * bc * ca;
    const double kappa = denom > 0.0 ? 2.0 * std::abs(cross) / denom : 0.0;
    if (kappa > kappa_max + kTol) {
      return {false, KinematicViolation::kCurvature, static_cast<int>(i), kappa};
    }
  }
  // Segment headings, then their first and second time differences.
  std::vector<double> heading(n - 1);
  std::vector<double> mid_t(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec2 d = pt(i + 1) - pt(i);
    heading[i] = std::atan2(d.y(), d.x());
    mid_t[i] = 0.5 * (path[i].t + path[i + 1].t);
  }
  std::vector<double> rate(n - 2);
  for (std::size_t i = 0; i + 1 < heading.size(); ++i) {
    rate[i] = wrap_angle(heading[i + 1] - heading[i]) / (mid_t[i + 1] - mid_t[i]);
    if (std::abs(rate[i]) > limits.yaw_rate_max + kTol) {
      return {false, KinematicViolation::kYawRate, static_cast<int>(i), rate[i]};
    }
  }
  for (std::size_t i = 0; i + 1 < rate.size(); ++i) {
    const double span_t = 0.5 * (mid_t[i + 2] - mid_t[i]);
    const double accel = (rate[i + 1] - rate[i]) / span_t;
    if (std::abs(accel) > limits.omega_max + kTol) {
      return {false, KinematicViolation::kHeadingAccel, static_cast<int>(i), accel};
    }
  }
  return {};
}

std::vector<ConvexRegion> generate_corridor(
    const VehicleState& x0, int horizon, double dt,
    const std::vector<std::vector<ObstacleVehicle>>& predictions, const CorridorSetup& setup,
    const VehicleGeometry& geom, double t0, std::span<const Vec2> anchors,
    std::span<const double> headings, std::span<const Vec2> preferred) {
  if (horizon < 0) throw ParameterError("generate_corridor: horizon must be >= 0");
  if (!(dt > 0.0)) throw ParameterError("generate_corridor: dt must be positive");
  if (static_cast<int>(predictions.size()) != horizon + 1) {
    throw ParameterError("generate_corridor: need obstacle predictions for every step");
  }
  if (!anchors.empty() && static_cast<int>(anchors.size()) != horizon + 1) {
    throw ParameterError("generate_corridor: anchors must cover every step");
  }
  if (!preferred.empty() && static_cast<int>(preferred.size()) != horizon + 1) {
    throw ParameterError("generate_corridor: preferred points must cover every step");
  }
  auto prefer = [&](int k) -> std::optional<Vec2> {
    if (preferred.empty()) return std::nullopt;
    return preferred[k];
  };
  if (!headings.empty() && static_cast<int>(headings.size()) != horizon + 1) {
    throw ParameterError("generate_corridor: headings must cover every step");
  }
  auto setup_at = [&](int k) {
    CorridorSetup s = setup;
    if (!headings.empty()) {
      s.host_extent = host_extent(geom, headings[k], setup.heading_spread);
      s.host_heading = headings[k];
    }
    return s;
  };
  const OrientedBox body = footprint(x0, geom);
  for (const auto& obs : predictions[0]) {
    if (box_clearance(body, obs.footprint()) < setup.growth.delta_safe) {
      throw InfeasibleSeedError("host footprint within delta_safe of obstacle " +
                                std::to_string(obs.id) + " at the corridor start");
    }
  }
  auto anchor = [&](int k) { return anchors.empty() ? x0.position() : anchors[k]; };

  ConvexRegion seed = init_region(x0, geom, setup.growth.init_margin);
  seed.t = t0;
  auto first = separate_from(seed, predictions[0], x0.position(), setup_at(0), prefer(0));
  if (!first || !contains(*first, x0.position())) {
    throw InfeasibleSeedError("no separated region contains the host position");
  }
  std::vector<ConvexRegion> corridor;
  corridor.reserve(horizon + 1);
  corridor.push_back(std::move(*first));
  VehicleState grow_state = x0;
  for (int k = 0; k < horizon; ++k) {
    const ConvexRegion& prev = corridor.back();
    const Vec2 seed_pos = prev.clamp(anchor(k));
    grow_state.x = seed_pos.x();
    grow_state.y = seed_pos.y();
    if (!headings.empty()) grow_state.theta = headings[k];
    corridor.push_back(grow(prev, grow_state, k * dt, dt, predictions[k + 1], setup_at(k + 1),
                            anchor(k + 1), prefer(k + 1)));
  }
  return corridor;
}

}  // namespace drf
