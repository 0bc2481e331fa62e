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

#include "drf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include "drf/errors.hpp"
#include "drf/io.hpp"

namespace drf {

namespace {

using Kind = ValueKind;

// Sections in canonical order.
const std::vector<std::string>& section_order() {
  static const std::vector<std::string> order = {"vehicle", "risk",   "growth", "weights",
                                                 "scenario", "solver", "output"};
  return order;
}

const std::regex& obstacle_key_pattern() {
  static const std::regex re("obstacle([0-9]+)_(motion|pose|size|arc|waypoints)");
  return re;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && !std::isnan(out);
}

const KeySpec* find_spec(const std::string& section, const std::string& key) {
  for (const auto& k : key_registry()) {
    if (section == k.section && key == k.key) return &k;
  }
  return nullptr;
}

Kind obstacle_field_kind(const std::string& field) {
  return field == "motion" ? Kind::kString : Kind::kList;
}

bool section_known(const std::string& name) {
  const auto& o = section_order();
  return std::find(o.begin(), o.end(), name) != o.end();
}

ConfigValue parse_value(const std::string& raw, Kind kind, const std::string& where, int line) {
  switch (kind) {
    case Kind::kString:
      return trim(raw);
    case Kind::kNumber:
    case Kind::kInteger: {
      double v;
      if (!parse_number(raw, v)) throw ConfigError(where + ": expected a number", line);
      if (kind == Kind::kInteger && std::floor(v) != v) {
        throw ConfigError(where + ": expected an integer", line);
      }
      return v;
    }
    case Kind::kList: {
      std::vector<double> out;
      const std::string t = trim(raw);
      if (t.empty()) return out;
      std::stringstream ss(t);
      std::string item;
      while (std::getline(ss, item, ',')) {
        double v;
        if (!parse_number(item, v)) throw ConfigError(where + ": expected a list of numbers", line);
        out.push_back(v);
      }
      return out;
    }
  }
  return 0.0;
}

std::vector<double> diag_list(const Eigen::MatrixXd& m) {
  std::vector<double> d(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) d[i] = m(i, i);
  return d;
}

// Generic defaults, taken from the default-constructed types.
ConfigDocument generic_defaults() {
  ConfigDocument d;
  const VehicleParams vp;
  const RiskFieldParams rp;
  const GrowthParams gp;
  const KinematicLimits kl;
  const SimulationSettings st;
  const CostWeights w = CostWeights::defaults();
  const PlanOptions po;
  const Randomization rz;
  const StraightRoad sr;
  const RoundaboutRoad rr;
  const Scenario sc;
  const RenderSpec rs;

  d.set("vehicle", "wheelbase", vp.geometry.wheelbase);
  d.set("vehicle", "body_length", vp.geometry.body_length);
  d.set("vehicle", "body_width", vp.geometry.body_width);
  d.set("vehicle", "phi_max", vp.limits.phi_max);
  d.set("vehicle", "a_max", vp.limits.a_max);
  d.set("vehicle", "phi_ddot_max", vp.limits.phi_ddot_max);

  d.set("risk", "A_s", rp.A_s);
  d.set("risk", "sigma_x", rp.sigma_x);
  d.set("risk", "sigma_y", rp.sigma_y);
  d.set("risk", "beta", rp.beta);
  d.set("risk", "A_d", rp.A_d);
  d.set("risk", "k_v", rp.k_v);
  d.set("risk", "alpha_shift", rp.alpha_shift);
  d.set("risk", "d_e", rp.d_e);
  d.set("risk", "sigma_v_min", rp.sigma_v_min);

  d.set("growth", "eta", gp.eta);
  d.set("growth", "alpha_max", gp.alpha_max);
  d.set("growth", "v_ref", gp.v_ref);
  d.set("growth", "gamma_0", gp.gamma_0);
  d.set("growth", "lambda", gp.lambda);
  d.set("growth", "delta_safe", gp.delta_safe);
  d.set("growth", "init_margin", gp.init_margin);
  d.set("growth", "v_max", kl.v_max);
  d.set("growth", "omega_max", kl.omega_max);
  d.set("growth", "yaw_rate_max", kl.yaw_rate_max);
  d.set("growth", "heading_spread", st.heading_spread);

  d.set("weights", "Q", diag_list(w.Q));
  d.set("weights", "R", diag_list(w.R));
  d.set("weights", "gamma_risk", w.gamma_risk);
  d.set("weights", "mu_corridor", w.mu_corridor);
  d.set("weights", "corridor_margin", w.corridor_margin);
  d.set("weights", "mu_road", w.mu_road);

  d.set("scenario", "duration", sc.duration);
  d.set("scenario", "plant_dt", sc.plant_dt);
  d.set("scenario", "replan_period", sc.replan_period);
  d.set("scenario", "seed", 0.0);
  d.set("scenario", "target_speed", sc.target_speed);
  d.set("scenario", "start_lane", 0.0);
  d.set("scenario", "target_lane", 0.0);
  d.set("scenario", "lane_width", sr.lane_width);
  d.set("scenario", "lane_count", static_cast<double>(sr.lane_count));
  d.set("scenario", "road_x_start", sr.x_start);
  d.set("scenario", "road_length", sr.length);
  d.set("scenario", "center", std::vector<double>{rr.center.x(), rr.center.y()});
  d.set("scenario", "inner_radius", rr.inner_radius);
  d.set("scenario", "outer_radius", rr.outer_radius);
  d.set("scenario", "entrances", static_cast<double>(rr.entrances));
  d.set("scenario", "entrance_angle", rr.entrance_angle);
  d.set("scenario", "exit_angle", rr.exit_angle);
  d.set("scenario", "near_miss_distance", st.near_miss_distance);
  d.set("scenario", "lane_change_offset", st.lane_change_offset);
  d.set("scenario", "lane_change_lateral_speed", st.lane_change_lateral_speed);
  d.set("scenario", "prediction", std::string("script"));
  d.set("scenario", "randomize", 0.0);
  d.set("scenario", "rand_position", rz.position);
  d.set("scenario", "rand_speed", rz.speed);
  d.set("scenario", "rand_time", rz.time);
  d.set("scenario", "runs", 100.0);

  d.set("solver", "max_iter", static_cast<double>(po.max_iter));
  d.set("solver", "tol_cost", po.tol_cost);
  d.set("solver", "tol_grad", po.tol_grad);
  d.set("solver", "mu_init", po.mu_init);
  d.set("solver", "mu_max", po.mu_max);
  d.set("solver", "line_search_steps", static_cast<double>(po.line_search_steps));
  d.set("solver", "risk_hessian", std::string("gauss_newton"));
  d.set("solver", "horizon", static_cast<double>(st.horizon));
  d.set("solver", "dt", st.plan_dt);

  d.set("output", "layers", std::string("road,risk,corridor,obstacles,trajectory"));
  d.set("output", "snapshot_times", std::vector<double>{});
  d.set("output", "width_px", static_cast<double>(rs.width_px));
  d.set("output", "height_px", static_cast<double>(rs.height_px));
  d.set("output", "risk_resolution", rs.risk_resolution);
  d.set("output", "render_input", std::string(""));
  return d;
}

// Scenario keys whose defaults depend on scenario.type.
ConfigSection type_defaults(const std::string& type) {
  ConfigSection s;
  if (type == "lane_change") {
    s["duration"] = 8.0;
    s["target_speed"] = 10.0;
    s["start_lane"] = 0.0;
    s["target_lane"] = 1.0;
  } else if (type == "lane_keep") {
    s["duration"] = 8.0;
    s["target_speed"] = 10.0;
  } else if (type == "roundabout") {
    s["duration"] = 10.0;
    s["target_speed"] = 8.0;
    s["start_lane"] = 1.0;
    s["target_lane"] = 0.0;
  } else if (type == "lq_oracle") {
    s["duration"] = 3.0;
    s["target_speed"] = 10.0;
    s["target_lane"] = 1.0;
  } else {
    throw ConfigError("scenario.type: must be one of lane_change, lane_keep, roundabout, lq_oracle");
  }
  return s;
}

double number(const ConfigDocument& d, const std::string& sec, const std::string& key) {
  const ConfigValue* v = d.find(sec, key);
  if (!v || !std::holds_alternative<double>(*v)) {
    throw ConfigError(sec + "." + key + ": missing numeric value");
  }
  return std::get<double>(*v);
}

std::string text(const ConfigDocument& d, const std::string& sec, const std::string& key) {
  const ConfigValue* v = d.find(sec, key);
  if (!v || !std::holds_alternative<std::string>(*v)) {
    throw ConfigError(sec + "." + key + ": missing string value");
  }
  return std::get<std::string>(*v);
}

std::vector<double> list(const ConfigDocument& d, const std::string& sec, const std::string& key) {
  const ConfigValue* v = d.find(sec, key);
  if (!v || !std::holds_alternative<std::vector<double>>(*v)) {
    throw ConfigError(sec + "." + key + ": missing list value");
  }
  return std::get<std::vector<double>>(*v);
}

std::vector<double> arc_point(double R, double angle) {
  return {R * std::cos(angle), R * std::sin(angle)};
}

// Default traffic per scenario type, as explicit obstacle keys.
void default_obstacles(const std::string& type, ConfigDocument& d) {
  auto put = [&](int id, const std::string& field, ConfigValue v) {
    d.set("scenario", "obstacle" + std::to_string(id) + "_" + field, std::move(v));
  };
  if (type == "lane_change") {
    const double w = number(d, "scenario", "lane_width");
    put(1, "motion", std::string("straight"));
    put(1, "pose", std::vector<double>{25.0, 0.0, 0.0, 6.0});
    put(2, "motion", std::string("straight"));
    put(2, "pose", std::vector<double>{45.0, w, 0.0, 11.0});
    put(3, "motion", std::string("straight"));
    put(3, "pose", std::vector<double>{-25.0, w, 0.0, 10.0});
  } else if (type == "roundabout") {
    const auto c = list(d, "scenario", "center");
    const double inner = number(d, "scenario", "inner_radius");
    const double outer = number(d, "scenario", "outer_radius");
    const double a0 = number(d, "scenario", "entrance_angle");
    const double r_outer = inner + 1.5 * 0.5 * (outer - inner);
    const double half_lane = 0.25 * (outer - inner);
    auto on = [&](double angle, double speed) {
      const auto p = arc_point(r_outer, angle);
      return std::vector<double>{c[0] + p[0], c[1] + p[1], angle + std::numbers::pi / 2.0, speed};
    };
    const double deg = std::numbers::pi / 180.0;
    // Slow leader and fast follower circulating in the outer lane.
    put(1, "motion", std::string("arc"));
    put(1, "pose", on(a0 + 40.0 * deg, 5.0));
    put(1, "arc", std::vector<double>{c[0], c[1], r_outer, 5.0 / r_outer});
    put(2, "motion", std::string("arc"));
    put(2, "pose", on(a0 - 45.0 * deg, 10.0));
    put(2, "arc", std::vector<double>{c[0], c[1], r_outer, 10.0 / r_outer});
    // Vehicle entering from the next entrance and merging into the outer lane.
    const double ae = a0 + 90.0 * deg;
    const Vec2 radial(std::cos(ae), std::sin(ae));
    const Vec2 side(-radial.y(), radial.x());
    std::vector<double> wp;
    auto add = [&](double t, const Vec2& p) {
      wp.insert(wp.end(), {t, c[0] + p.x(), c[1] + p.y()});
    };
    add(0.0, (outer + 20.0) * radial + half_lane * side);
    add(2.5, (outer + 5.0) * radial + half_lane * side);
    for (int i = 0; i <= 12; ++i) {
      const double ang = ae + 0.075 + 0.255 * i;
      add(3.5 + i, r_outer * Vec2(std::cos(ang), std::sin(ang)));
    }
    put(3, "motion", std::string("waypoints"));
    put(3, "waypoints", wp);
  }
}

// Host placement on the start lane for the roundabout, lane center
// otherwise.
void default_host(const std::string& type, ConfigDocument& d) {
  const double v = number(d, "scenario", "target_speed");
  if (type == "roundabout") {
    const auto c = list(d, "scenario", "center");
    const double inner = number(d, "scenario", "inner_radius");
    const double outer = number(d, "scenario", "outer_radius");
    const double lane = number(d, "scenario", "start_lane");
    const double R = inner + (lane + 0.5) * 0.5 * (outer - inner);
    const double a0 = number(d, "scenario", "entrance_angle");
    const auto p = arc_point(R, a0);
    if (!d.find("scenario", "host_pose")) {
      d.set("scenario", "host_pose",
            std::vector<double>{c[0] + p[0], c[1] + p[1], a0 + std::numbers::pi / 2.0, v});
    }
    if (!d.find("scenario", "host_steering")) {
      d.set("scenario", "host_steering",
            std::vector<double>{std::atan(number(d, "vehicle", "wheelbase") / R), 0.0});
    }
  } else {
    const double y = number(d, "scenario", "start_lane") * number(d, "scenario", "lane_width");
    if (!d.find("scenario", "host_pose")) {
      d.set("scenario", "host_pose", std::vector<double>{0.0, y, 0.0, v});
    }
    if (!d.find("scenario", "host_steering")) {
      d.set("scenario", "host_steering", std::vector<double>{0.0, 0.0});
    }
  }
}

[[noreturn]] void invalid(const std::string& sec, const std::string& key, const std::string& what) {
  throw ConfigError(sec + "." + key + ": " + what);
}

double positive(const ConfigDocument& d, const std::string& sec, const std::string& key) {
  const double v = number(d, sec, key);
  if (!(v > 0.0)) invalid(sec, key, "must be > 0");
  return v;
}

double non_negative(const ConfigDocument& d, const std::string& sec, const std::string& key) {
  const double v = number(d, sec, key);
  if (!(v >= 0.0)) invalid(sec, key, "must be >= 0");
  return v;
}

int integer_at_least(const ConfigDocument& d, const std::string& sec, const std::string& key,
                     int lo) {
  const double v = number(d, sec, key);
  if (!(v >= lo)) invalid(sec, key, "must be >= " + std::to_string(lo));
  return static_cast<int>(v);
}

std::vector<double> sized_list(const ConfigDocument& d, const std::string& sec,
                               const std::string& key, std::size_t n) {
  auto v = list(d, sec, key);
  if (v.size() != n) invalid(sec, key, "expected " + std::to_string(n) + " numbers");
  return v;
}

template <int Dim>
Eigen::Matrix<double, Dim, Dim> weight_matrix(const ConfigDocument& d, const std::string& key) {
  const auto v = list(d, "weights", key);
  Eigen::Matrix<double, Dim, Dim> m = Eigen::Matrix<double, Dim, Dim>::Zero();
  if (v.size() == static_cast<std::size_t>(Dim)) {
    for (int i = 0; i < Dim; ++i) m(i, i) = v[i];
  } else if (v.size() == static_cast<std::size_t>(Dim * Dim)) {
    for (int i = 0; i < Dim; ++i) {
      for (int j = 0; j < Dim; ++j) m(i, j) = v[i * Dim + j];
    }
  } else {
    invalid("weights", key,
            "expected " + std::to_string(Dim) + " diagonal or " + std::to_string(Dim * Dim) +
                " row-major entries");
  }
  return m;
}

ObstacleVehicle build_obstacle(const ConfigDocument& d, int id) {
  const std::string p = "obstacle" + std::to_string(id) + "_";
  ObstacleVehicle o;
  o.id = id;
  const std::string motion = text(d, "scenario", p + "motion");
  if (const auto* size = d.find("scenario", p + "size")) {
    const auto s = std::get<std::vector<double>>(*size);
    if (s.size() != 2 || !(s[0] > 0.0) || !(s[1] > 0.0)) {
      invalid("scenario", p + "size", "expected two positive numbers (length, width)");
    }
    o.body_length = s[0];
    o.body_width = s[1];
  }
  auto pose = [&]() {
    const auto v = sized_list(d, "scenario", p + "pose", 4);
    o.x = v[0];
    o.y = v[1];
    o.theta = v[2];
    o.v = v[3];
    if (!(o.v >= 0.0)) invalid("scenario", p + "pose", "speed must be >= 0");
  };
  if (motion == "straight") {
    pose();
    o.motion = StraightMotion{};
  } else if (motion == "arc") {
    pose();
    const auto a = sized_list(d, "scenario", p + "arc", 4);
    if (!(a[2] > 0.0)) invalid("scenario", p + "arc", "radius must be > 0");
    o.motion = ArcMotion{Vec2(a[0], a[1]), a[2], a[3]};
  } else if (motion == "waypoints") {
    const auto w = list(d, "scenario", p + "waypoints");
    if (w.empty() || w.size() % 3 != 0) {
      invalid("scenario", p + "waypoints", "expected triples t, x, y");
    }
    WaypointMotion wm;
    for (std::size_t i = 0; i < w.size(); i += 3) wm.points.push_back({w[i], w[i + 1], w[i + 2]});
    for (std::size_t i = 1; i < wm.points.size(); ++i) {
      if (!(wm.points[i].t > wm.points[i - 1].t)) {
        invalid("scenario", p + "waypoints", "times must be strictly increasing");
      }
    }
    o.motion = wm;
    if (d.find("scenario", p + "pose")) pose();
    o = place_on_script(o, 0.0);
  } else {
    invalid("scenario", p + "motion", "must be straight, arc, or waypoints");
  }
  return o;
}

std::set<int> obstacle_ids(const ConfigDocument& d) {
  std::set<int> ids;
  const auto it = d.sections.find("scenario");
  if (it == d.sections.end()) return ids;
  std::smatch m;
  for (const auto& [key, value] : it->second) {
    if (std::regex_match(key, m, obstacle_key_pattern())) ids.insert(std::stoi(m[1].str()));
  }
  return ids;
}

template <class F>
void wrap_module(const std::string& section, F&& f) {
  try {
    f();
  } catch (const ParameterError& e) {
    throw ConfigError("[" + section + "] " + e.what());
  }
}

}  // namespace

const ConfigValue* ConfigDocument::find(const std::string& section, const std::string& key) const {
  const auto s = sections.find(section);
  if (s == sections.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

void ConfigDocument::set(const std::string& section, const std::string& key, ConfigValue value) {
  sections[section][key] = std::move(value);
}

const std::vector<KeySpec>& key_registry() {
  static const std::vector<KeySpec> keys = {
      {"vehicle", "wheelbase", Kind::kNumber, "m", "axle distance"},
      {"vehicle", "body_length", Kind::kNumber, "m", "footprint length"},
      {"vehicle", "body_width", Kind::kNumber, "m", "footprint width"},
      {"vehicle", "phi_max", Kind::kNumber, "rad", "steering bound"},
      {"vehicle", "a_max", Kind::kNumber, "m/s^2", "acceleration bound"},
      {"vehicle", "phi_ddot_max", Kind::kNumber, "rad/s^2", "steering acceleration bound"},
      {"risk", "A_s", Kind::kNumber, "-", "static lobe amplitude"},
      {"risk", "sigma_x", Kind::kNumber, "m", "longitudinal spread"},
      {"risk", "sigma_y", Kind::kNumber, "m", "lateral spread"},
      {"risk", "beta", Kind::kNumber, "-", "static shape exponent"},
      {"risk", "A_d", Kind::kNumber, "-", "dynamic lobe amplitude"},
      {"risk", "k_v", Kind::kNumber, "s", "velocity spread gain"},
      {"risk", "alpha_shift", Kind::kNumber, "-", "sigmoid position modulation"},
      {"risk", "d_e", Kind::kNumber, "m", "host distance decay length"},
      {"risk", "sigma_v_min", Kind::kNumber, "m", "velocity spread floor"},
      {"growth", "eta", Kind::kNumber, "-", "speed gain of the growth rate"},
      {"growth", "alpha_max", Kind::kNumber, "-", "growth gain cap"},
      {"growth", "v_ref", Kind::kNumber, "m/s", "reference speed of the growth gain"},
      {"growth", "gamma_0", Kind::kNumber, "m/s", "initial growth rate"},
      {"growth", "lambda", Kind::kNumber, "1/s", "growth decay rate"},
      {"growth", "delta_safe", Kind::kNumber, "m", "separation margin"},
      {"growth", "init_margin", Kind::kNumber, "m", "initial region margin"},
      {"growth", "v_max", Kind::kNumber, "m/s", "speed bound; caps face motion per step"},
      {"growth", "omega_max", Kind::kNumber, "rad/s^2", "heading acceleration bound"},
      {"growth", "yaw_rate_max", Kind::kNumber, "rad/s", "yaw rate bound"},
      {"growth", "heading_spread", Kind::kNumber, "rad", "host heading spread covered by the corridor"},
      {"weights", "Q", Kind::kList, "-", "state weight (6 diagonal or 36 row-major)"},
      {"weights", "R", Kind::kList, "-", "control weight (2 diagonal or 4 row-major)"},
      {"weights", "Q_T", Kind::kList, "-", "terminal weight; defaults to 10 Q"},
      {"weights", "gamma_risk", Kind::kNumber, "-", "risk weight"},
      {"weights", "mu_corridor", Kind::kNumber, "1/m^2", "corridor penalty weight"},
      {"weights", "corridor_margin", Kind::kNumber, "m", "inner margin of the corridor penalty"},
      {"weights", "mu_road", Kind::kNumber, "1/m^2", "roundabout edge penalty weight"},
      {"scenario", "type", Kind::kString, "-", "lane_change | lane_keep | roundabout | lq_oracle"},
      {"scenario", "duration", Kind::kNumber, "s", "simulated time"},
      {"scenario", "plant_dt", Kind::kNumber, "s", "plant integration step"},
      {"scenario", "replan_period", Kind::kNumber, "s", "replanning period"},
      {"scenario", "seed", Kind::kInteger, "-", "base seed"},
      {"scenario", "target_speed", Kind::kNumber, "m/s", "reference speed"},
      {"scenario", "start_lane", Kind::kInteger, "-", "initial lane index"},
      {"scenario", "target_lane", Kind::kInteger, "-", "goal lane index"},
      {"scenario", "lane_width", Kind::kNumber, "m", "straight road lane width"},
      {"scenario", "lane_count", Kind::kInteger, "-", "straight road lanes"},
      {"scenario", "road_x_start", Kind::kNumber, "m", "straight road start"},
      {"scenario", "road_length", Kind::kNumber, "m", "straight road length"},
      {"scenario", "center", Kind::kList, "m", "roundabout center x, y"},
      {"scenario", "inner_radius", Kind::kNumber, "m", "roundabout inner edge"},
      {"scenario", "outer_radius", Kind::kNumber, "m", "roundabout outer edge"},
      {"scenario", "entrances", Kind::kInteger, "-", "roundabout entrances"},
      {"scenario", "entrance_angle", Kind::kNumber, "rad", "host entry angle"},
      {"scenario", "exit_angle", Kind::kNumber, "rad", "host exit angle"},
      {"scenario", "host_pose", Kind::kList, "m, m, rad, m/s", "host x, y, theta, v"},
      {"scenario", "host_steering", Kind::kList, "rad, rad/s", "host phi, phi_dot"},
      {"scenario", "obstacles", Kind::kString, "-", "default | none | explicit"},
      {"scenario", "near_miss_distance", Kind::kNumber, "m", "center distance threshold"},
      {"scenario", "lane_change_offset", Kind::kNumber, "-", "lane change threshold, fraction of lane width"},
      {"scenario", "lane_change_lateral_speed", Kind::kNumber, "m/s", "lane change settling speed"},
      {"scenario", "prediction", Kind::kString, "-", "script | constant_velocity"},
      {"scenario", "randomize", Kind::kInteger, "-", "perturb obstacles in simulate (0 or 1)"},
      {"scenario", "rand_position", Kind::kNumber, "m", "position perturbation half width"},
      {"scenario", "rand_speed", Kind::kNumber, "m/s", "speed perturbation half width"},
      {"scenario", "rand_time", Kind::kNumber, "s", "waypoint time perturbation half width"},
      {"scenario", "runs", Kind::kInteger, "-", "sweep runs"},
      {"solver", "max_iter", Kind::kInteger, "-", "iteration cap"},
      {"solver", "tol_cost", Kind::kNumber, "-", "relative cost change tolerance"},
      {"solver", "tol_grad", Kind::kNumber, "-", "max |Q_u| tolerance"},
      {"solver", "mu_init", Kind::kNumber, "-", "initial regularization"},
      {"solver", "mu_max", Kind::kNumber, "-", "regularization cap"},
      {"solver", "line_search_steps", Kind::kInteger, "-", "halvings tried"},
      {"solver", "risk_hessian", Kind::kString, "-", "gauss_newton | exact"},
      {"solver", "horizon", Kind::kInteger, "-", "planning steps"},
      {"solver", "dt", Kind::kNumber, "s", "planning step"},
      {"output", "layers", Kind::kString, "-", "comma list of road, risk, corridor, obstacles, trajectory"},
      {"output", "snapshot_times", Kind::kList, "s", "render and risk grid instants"},
      {"output", "width_px", Kind::kInteger, "px", "figure width"},
      {"output", "height_px", Kind::kInteger, "px", "figure height"},
      {"output", "risk_resolution", Kind::kNumber, "m", "risk grid spacing"},
      {"output", "render_input", Kind::kString, "-", "directory read by render (default: --out)"},
  };
  return keys;
}

ConfigDocument parse_config(const std::string& input) {
  ConfigDocument doc;
  std::istringstream in(input);
  std::string raw;
  std::string section;
  int line = 0;
  bool seen_content = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto c = s.find_first_of("#;");
    if (c != std::string::npos) s = s.substr(0, c);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header", line);
      section = trim(s.substr(1, s.size() - 2));
      if (!section_known(section)) throw ConfigError("unknown section [" + section + "]", line);
      seen_content = true;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = s.substr(eq + 1);
    if (!seen_content && section.empty() && key == "schema") {
      if (trim(value) != "1") throw ConfigError("unsupported schema " + trim(value), line);
      seen_content = true;
      continue;
    }
    seen_content = true;
    if (section.empty()) throw ConfigError("key '" + key + "' outside of a section", line);
    const std::string where = section + "." + key;
    Kind kind;
    std::smatch m;
    if (const KeySpec* spec = find_spec(section, key)) {
      kind = spec->kind;
    } else if (section == "scenario" && std::regex_match(key, m, obstacle_key_pattern())) {
      kind = obstacle_field_kind(m[2].str());
    } else {
      throw ConfigError("unknown key " + where, line);
    }
    if (doc.find(section, key)) throw ConfigError("duplicate key " + where, line);
    doc.set(section, key, parse_value(value, kind, where, line));
  }
  return doc;
}

ConfigDocument resolve_config(ConfigDocument doc) {
  const ConfigValue* tv = doc.find("scenario", "type");
  if (!tv) throw ConfigError("scenario.type: required");
  const std::string type = std::get<std::string>(*tv);
  const ConfigSection typed = type_defaults(type);

  for (const auto& [sec, keys] : generic_defaults().sections) {
    for (const auto& [key, value] : keys) {
      if (doc.find(sec, key)) continue;
      if (sec == "scenario" && typed.count(key)) {
        doc.set(sec, key, typed.at(key));
      } else {
        doc.set(sec, key, value);
      }
    }
  }
  if (!doc.find("weights", "Q_T")) {
    std::vector<double> qt;
    for (double v : list(doc, "weights", "Q")) qt.push_back(10.0 * v);
    doc.set("weights", "Q_T", qt);
  }
  default_host(type, doc);

  std::string mode = "default";
  if (const auto* ov = doc.find("scenario", "obstacles")) mode = std::get<std::string>(*ov);
  if (mode != "default" && mode != "none" && mode != "explicit") {
    invalid("scenario", "obstacles", "must be default, none, or explicit");
  }
  const bool listed = !obstacle_ids(doc).empty();
  if (mode == "none") {
    auto& sc = doc.sections["scenario"];
    for (auto it = sc.begin(); it != sc.end();) {
      it = std::regex_match(it->first, obstacle_key_pattern()) ? sc.erase(it) : std::next(it);
    }
  } else if (mode == "default" && !listed) {
    default_obstacles(type, doc);
  }
  doc.set("scenario", "obstacles", std::string("explicit"));
  (void)to_run_config(doc);
  return doc;
}

ConfigDocument load_config_text(const std::string& text) {
  return resolve_config(parse_config(text));
}

ConfigDocument load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str());
}

std::string emit_config(const ConfigDocument& doc) {
  std::ostringstream out;
  out << "schema=1\n";
  for (const auto& sec : section_order()) {
    const auto it = doc.sections.find(sec);
    if (it == doc.sections.end()) continue;
    out << "\n[" << sec << "]\n";
    // Registry order first, then obstacle keys sorted by id and field.
    std::vector<std::string> keys;
    for (const auto& k : key_registry()) {
      if (sec == k.section && it->second.count(k.key)) keys.push_back(k.key);
    }
    std::vector<std::pair<int, std::string>> extra;
    std::smatch m;
    for (const auto& [key, value] : it->second) {
      if (std::regex_match(key, m, obstacle_key_pattern())) extra.emplace_back(std::stoi(m[1].str()), key);
    }
    std::sort(extra.begin(), extra.end());
    for (const auto& e : extra) keys.push_back(e.second);
    for (const auto& key : keys) {
      const ConfigValue& v = it->second.at(key);
      out << key << " = ";
      if (const auto* d = std::get_if<double>(&v)) {
        out << format_number(*d);
      } else if (const auto* s = std::get_if<std::string>(&v)) {
        out << *s;
      } else {
        const auto& l = std::get<std::vector<double>>(v);
        for (std::size_t i = 0; i < l.size(); ++i) out << (i ? ", " : "") << format_number(l[i]);
      }
      out << "\n";
    }
  }
  return out.str();
}

std::string to_string(RenderLayer layer) {
  switch (layer) {
    case RenderLayer::kRoad: return "road";
    case RenderLayer::kRisk: return "risk";
    case RenderLayer::kCorridor: return "corridor";
    case RenderLayer::kObstacles: return "obstacles";
    case RenderLayer::kTrajectory: return "trajectory";
  }
  return "";
}

bool RenderSpec::has(RenderLayer layer) const {
  return std::find(layers.begin(), layers.end(), layer) != layers.end();
}

void validate(const RenderSpec& spec) {
  if (spec.layers.empty()) throw ParameterError("render: at least one layer must be enabled");
  if (spec.width_px < 1 || spec.height_px < 1) throw ParameterError("render: size must be positive");
  if (!(spec.risk_resolution > 0.0)) throw ParameterError("render: risk_resolution must be > 0");
}

RunConfig to_run_config(const ConfigDocument& d) {
  RunConfig rc;
  rc.type = text(d, "scenario", "type");
  (void)type_defaults(rc.type);
  SimulationSettings& st = rc.settings;

  auto& geom = st.vehicle.geometry;
  geom.wheelbase = positive(d, "vehicle", "wheelbase");
  geom.body_length = positive(d, "vehicle", "body_length");
  geom.body_width = positive(d, "vehicle", "body_width");
  st.vehicle.limits.phi_max = positive(d, "vehicle", "phi_max");
  st.vehicle.limits.a_max = positive(d, "vehicle", "a_max");
  st.vehicle.limits.phi_ddot_max = positive(d, "vehicle", "phi_ddot_max");
  wrap_module("vehicle", [&] { validate(st.vehicle); });

  auto& r = st.risk;
  r.A_s = non_negative(d, "risk", "A_s");
  r.sigma_x = positive(d, "risk", "sigma_x");
  r.sigma_y = positive(d, "risk", "sigma_y");
  r.beta = positive(d, "risk", "beta");
  r.A_d = non_negative(d, "risk", "A_d");
  r.k_v = non_negative(d, "risk", "k_v");
  r.alpha_shift = number(d, "risk", "alpha_shift");
  r.d_e = positive(d, "risk", "d_e");
  r.sigma_v_min = positive(d, "risk", "sigma_v_min");
  wrap_module("risk", [&] { validate(r); });

  auto& g = st.growth;
  g.eta = non_negative(d, "growth", "eta");
  g.alpha_max = positive(d, "growth", "alpha_max");
  g.v_ref = positive(d, "growth", "v_ref");
  g.gamma_0 = positive(d, "growth", "gamma_0");
  g.lambda = positive(d, "growth", "lambda");
  g.delta_safe = positive(d, "growth", "delta_safe");
  g.init_margin = non_negative(d, "growth", "init_margin");
  wrap_module("growth", [&] { validate(g); });
  st.limits.phi_max = st.vehicle.limits.phi_max;
  st.limits.v_max = positive(d, "growth", "v_max");
  st.limits.omega_max = positive(d, "growth", "omega_max");
  st.limits.yaw_rate_max = positive(d, "growth", "yaw_rate_max");
  wrap_module("growth", [&] { validate(st.limits); });
  st.heading_spread = non_negative(d, "growth", "heading_spread");

  auto& w = st.weights;
  w.Q = weight_matrix<kStateDim>(d, "Q");
  w.R = weight_matrix<kControlDim>(d, "R");
  w.Q_T = weight_matrix<kStateDim>(d, "Q_T");
  w.gamma_risk = positive(d, "weights", "gamma_risk");
  w.mu_corridor = positive(d, "weights", "mu_corridor");
  w.corridor_margin = non_negative(d, "weights", "corridor_margin");
  w.mu_road = positive(d, "weights", "mu_road");
  wrap_module("weights", [&] { validate(w); });

  auto& po = st.solver;
  po.max_iter = integer_at_least(d, "solver", "max_iter", 1);
  po.tol_cost = positive(d, "solver", "tol_cost");
  po.tol_grad = positive(d, "solver", "tol_grad");
  po.mu_init = positive(d, "solver", "mu_init");
  po.mu_max = positive(d, "solver", "mu_max");
  if (!(po.mu_max >= po.mu_init)) invalid("solver", "mu_max", "must be >= solver.mu_init");
  po.line_search_steps = integer_at_least(d, "solver", "line_search_steps", 1);
  const std::string hess = text(d, "solver", "risk_hessian");
  if (hess == "gauss_newton") {
    po.risk_hessian = RiskHessianMode::kGaussNewton;
  } else if (hess == "exact") {
    po.risk_hessian = RiskHessianMode::kExact;
  } else {
    invalid("solver", "risk_hessian", "must be gauss_newton or exact");
  }
  st.horizon = integer_at_least(d, "solver", "horizon", 1);
  st.plan_dt = positive(d, "solver", "dt");

  Scenario& sc = rc.scenario;
  st.near_miss_distance = positive(d, "scenario", "near_miss_distance");
  st.lane_change_offset = positive(d, "scenario", "lane_change_offset");
  st.lane_change_lateral_speed = positive(d, "scenario", "lane_change_lateral_speed");
  const std::string pred = text(d, "scenario", "prediction");
  if (pred == "script") {
    st.prediction = PredictionModel::kScript;
  } else if (pred == "constant_velocity") {
    st.prediction = PredictionModel::kConstantVelocity;
  } else {
    invalid("scenario", "prediction", "must be script or constant_velocity");
  }
  sc.duration = positive(d, "scenario", "duration");
  sc.plant_dt = positive(d, "scenario", "plant_dt");
  sc.replan_period = positive(d, "scenario", "replan_period");
  const double ratio = sc.replan_period / sc.plant_dt;
  if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-6) {
    invalid("scenario", "replan_period", "must be a multiple of scenario.plant_dt");
  }
  const double seed = number(d, "scenario", "seed");
  if (seed < 0.0) invalid("scenario", "seed", "must be >= 0");
  sc.seed = static_cast<std::uint64_t>(seed);
  sc.target_speed = non_negative(d, "scenario", "target_speed");
  sc.start_lane = integer_at_least(d, "scenario", "start_lane", 0);
  sc.target_lane = integer_at_least(d, "scenario", "target_lane", 0);
  if (rc.type == "roundabout") {
    RoundaboutRoad road;
    const auto c = sized_list(d, "scenario", "center", 2);
    road.center = Vec2(c[0], c[1]);
    road.inner_radius = positive(d, "scenario", "inner_radius");
    road.outer_radius = positive(d, "scenario", "outer_radius");
    if (!(road.outer_radius > road.inner_radius)) {
      invalid("scenario", "outer_radius", "must exceed scenario.inner_radius");
    }
    road.entrances = integer_at_least(d, "scenario", "entrances", 1);
    road.entrance_angle = number(d, "scenario", "entrance_angle");
    road.exit_angle = number(d, "scenario", "exit_angle");
    sc.road = road;
  } else {
    StraightRoad road;
    road.lane_width = positive(d, "scenario", "lane_width");
    road.lane_count = integer_at_least(d, "scenario", "lane_count", 1);
    road.x_start = number(d, "scenario", "road_x_start");
    road.length = positive(d, "scenario", "road_length");
    sc.road = road;
  }
  const int lanes = road_lane_count(sc.road);
  if (sc.start_lane >= lanes) invalid("scenario", "start_lane", "exceeds the lane count");
  if (sc.target_lane >= lanes) invalid("scenario", "target_lane", "exceeds the lane count");
  const auto pose = sized_list(d, "scenario", "host_pose", 4);
  const auto steer = sized_list(d, "scenario", "host_steering", 2);
  sc.host.x = pose[0];
  sc.host.y = pose[1];
  sc.host.theta = pose[2];
  sc.host.v = pose[3];
  sc.host.phi = steer[0];
  sc.host.phi_dot = steer[1];
  if (!(sc.host.v >= 0.0)) invalid("scenario", "host_pose", "speed must be >= 0");
  if (!(std::abs(sc.host.phi) <= st.vehicle.limits.phi_max)) {
    invalid("scenario", "host_steering", "|phi| must not exceed vehicle.phi_max");
  }
  for (int id : obstacle_ids(d)) sc.obstacles.push_back(build_obstacle(d, id));
  wrap_module("scenario", [&] { validate(sc, geom, g.delta_safe); });

  rc.randomize = number(d, "scenario", "randomize") != 0.0;
  rc.randomization.position = non_negative(d, "scenario", "rand_position");
  rc.randomization.speed = non_negative(d, "scenario", "rand_speed");
  rc.randomization.time = non_negative(d, "scenario", "rand_time");
  rc.runs = integer_at_least(d, "scenario", "runs", 1);

  RenderSpec& rs = rc.render;
  std::stringstream ls(text(d, "output", "layers"));
  std::string item;
  while (std::getline(ls, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    bool found = false;
    for (RenderLayer l : {RenderLayer::kRoad, RenderLayer::kRisk, RenderLayer::kCorridor,
                          RenderLayer::kObstacles, RenderLayer::kTrajectory}) {
      if (item == to_string(l)) {
        if (!rs.has(l)) rs.layers.push_back(l);
        found = true;
      }
    }
    if (!found) invalid("output", "layers", "unknown layer '" + item + "'");
  }
  if (rs.layers.empty()) invalid("output", "layers", "at least one layer must be enabled");
  rs.snapshot_times = list(d, "output", "snapshot_times");
  for (double t : rs.snapshot_times) {
    if (!(t >= 0.0)) invalid("output", "snapshot_times", "times must be >= 0");
  }
  rs.width_px = integer_at_least(d, "output", "width_px", 1);
  rs.height_px = integer_at_least(d, "output", "height_px", 1);
  rs.risk_resolution = positive(d, "output", "risk_resolution");
  rc.render_input = text(d, "output", "render_input");
  return rc;
}

}  // namespace drf
