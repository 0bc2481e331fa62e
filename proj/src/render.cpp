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

#include "drf/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "drf/errors.hpp"
#include "drf/io.hpp"

namespace drf {

namespace {

struct View {
  GridBounds b;
  double scale = 1.0;
  double ox = 0.0;
  double oy = 0.0;
  int w = 0;
  int h = 0;

  double sx(double x) const { return ox + (x - b.x_min) * scale; }
  double sy(double y) const { return h - (oy + (y - b.y_min) * scale); }
};

std::string f3(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

void extend(GridBounds& b, bool& any, const Vec2& p) {
  if (!any) {
    b = {p.x(), p.x(), p.y(), p.y()};
    any = true;
    return;
  }
  b.x_min = std::min(b.x_min, p.x());
  b.x_max = std::max(b.x_max, p.x());
  b.y_min = std::min(b.y_min, p.y());
  b.y_max = std::max(b.y_max, p.y());
}

GridBounds content_bounds(const SceneData& s, const RenderSpec& spec) {
  if (spec.has(RenderLayer::kRisk) && s.risk) return s.risk->bounds;
  if (spec.has(RenderLayer::kRoad) && s.road && s.host) {
    VehicleState hs;
    hs.x = s.host->center.x();
    hs.y = s.host->center.y();
    return view_bounds(*s.road, hs);
  }
  GridBounds b;
  bool any = false;
  if (spec.has(RenderLayer::kTrajectory)) {
    for (const auto& p : s.trajectory) extend(b, any, p);
    if (s.host) {
      for (const auto& c : s.host->corners()) extend(b, any, c);
    }
  }
  if (spec.has(RenderLayer::kCorridor)) {
    for (const auto& r : s.corridor) {
      for (const auto& c : r.corners()) extend(b, any, c);
    }
  }
  if (spec.has(RenderLayer::kObstacles)) {
    for (const auto& o : s.obstacles) {
      for (const auto& c : o.corners()) extend(b, any, c);
    }
  }
  if (!any) b = {-10.0, 10.0, -10.0, 10.0};
  const double pad = 3.0;
  return {b.x_min - pad, b.x_max + pad, b.y_min - pad, b.y_max + pad};
}

View make_view(const GridBounds& b, const RenderSpec& spec) {
  View v;
  v.b = b;
  v.w = spec.width_px;
  v.h = spec.height_px;
  const double dx = std::max(b.x_max - b.x_min, 1e-6);
  const double dy = std::max(b.y_max - b.y_min, 1e-6);
  v.scale = std::min(v.w / dx, v.h / dy);
  v.ox = 0.5 * (v.w - dx * v.scale);
  v.oy = 0.5 * (v.h - dy * v.scale);
  return v;
}

std::string polygon(const View& v, const std::array<Vec2, 4>& pts, const std::string& style) {
  std::string s = "<polygon points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    s += (i ? " " : "") + f3(v.sx(pts[i].x())) + "," + f3(v.sy(pts[i].y()));
  }
  return s + "\" " + style + "/>\n";
}

// White to red.
std::string heat_color(double u) {
  u = std::clamp(u, 0.0, 1.0);
  const int g = static_cast<int>(std::lround(255.0 * (1.0 - u)));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#ff%02x%02x", g, g);
  return buf;
}

void draw_road(std::ostream& out, const View& v, const RoadGeometry& road) {
  out << "<g id=\"road\">\n";
  if (const auto* s = std::get_if<StraightRoad>(&road)) {
    const double x0 = std::max(v.b.x_min, s->x_start);
    const double x1 = std::min(v.b.x_max, s->x_start + s->length);
    out << "<rect x=\"" << f3(v.sx(x0)) << "\" y=\"" << f3(v.sy(s->y_max())) << "\" width=\""
        << f3((x1 - x0) * v.scale) << "\" height=\"" << f3((s->y_max() - s->y_min()) * v.scale)
        << "\" fill=\"#e6e6e6\"/>\n";
    for (int i = 0; i <= s->lane_count; ++i) {
      const double y = s->y_min() + i * s->lane_width;
      const bool edge = i == 0 || i == s->lane_count;
      out << "<line x1=\"" << f3(v.sx(x0)) << "\" y1=\"" << f3(v.sy(y)) << "\" x2=\""
          << f3(v.sx(x1)) << "\" y2=\"" << f3(v.sy(y)) << "\" stroke=\"#555\" stroke-width=\""
          << (edge ? 2 : 1) << "\"" << (edge ? "" : " stroke-dasharray=\"8,6\"") << "/>\n";
    }
  } else {
    const auto& r = std::get<RoundaboutRoad>(road);
    const double cx = v.sx(r.center.x());
    const double cy = v.sy(r.center.y());
    out << "<circle cx=\"" << f3(cx) << "\" cy=\"" << f3(cy) << "\" r=\""
        << f3(r.outer_radius * v.scale) << "\" fill=\"#e6e6e6\" stroke=\"#555\" stroke-width=\"2\"/>\n";
    out << "<circle cx=\"" << f3(cx) << "\" cy=\"" << f3(cy) << "\" r=\""
        << f3(r.inner_radius * v.scale) << "\" fill=\"#b5d99c\" stroke=\"#555\" stroke-width=\"2\"/>\n";
    out << "<circle cx=\"" << f3(cx) << "\" cy=\"" << f3(cy) << "\" r=\""
        << f3((r.inner_radius + r.lane_width()) * v.scale)
        << "\" fill=\"none\" stroke=\"#555\" stroke-dasharray=\"8,6\"/>\n";
  }
  out << "</g>\n";
}

void draw_risk(std::ostream& out, const View& v, const RiskGrid& g) {
  out << "<g id=\"risk\">\n";
  double peak = 0.0;
  for (double x : g.values) peak = std::max(peak, x);
  const double cell = g.resolution * v.scale;
  if (peak > 0.0) {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const double u = g.at(i, j) / peak;
        if (u < 1e-3) continue;
        const double x = g.bounds.x_min + (i - 0.5) * g.resolution;
        const double y = g.bounds.y_min + (j + 0.5) * g.resolution;
        out << "<rect x=\"" << f3(v.sx(x)) << "\" y=\"" << f3(v.sy(y)) << "\" width=\"" << f3(cell)
            << "\" height=\"" << f3(cell) << "\" fill=\"" << heat_color(u)
            << "\" fill-opacity=\"0.8\"/>\n";
      }
    }
  }
  out << "</g>\n";
}

}  // namespace

GridBounds view_bounds(const RoadGeometry& road, const VehicleState& host) {
  if (const auto* s = std::get_if<StraightRoad>(&road)) {
    return {host.x - 30.0, host.x + 70.0, s->y_min() - 2.0, s->y_max() + 2.0};
  }
  const auto& r = std::get<RoundaboutRoad>(road);
  const double m = r.outer_radius + 8.0;
  return {r.center.x() - m, r.center.x() + m, r.center.y() - m, r.center.y() + m};
}

std::string render_svg(const SceneData& s, const RenderSpec& spec) {
  validate(spec);
  const View v = make_view(content_bounds(s, spec), spec);
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << v.w << "\" height=\"" << v.h
      << "\" viewBox=\"0 0 " << v.w << " " << v.h << "\">\n";
  out << "<title>t = " << f3(s.t) << " s</title>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Painter's order, bottom to top.
  if (spec.has(RenderLayer::kRoad) && s.road) draw_road(out, v, *s.road);
  if (spec.has(RenderLayer::kRisk) && s.risk) draw_risk(out, v, *s.risk);
  if (spec.has(RenderLayer::kCorridor)) {
    out << "<g id=\"corridor\">\n";
    for (std::size_t k = 0; k < s.corridor.size(); ++k) {
      const bool hi = static_cast<int>(k) == s.highlighted_region;
      out << polygon(v, s.corridor[k].corners(),
                     hi ? "fill=\"#3b7dd8\" fill-opacity=\"0.15\" stroke=\"#1f4f99\" stroke-width=\"2\""
                        : "fill=\"none\" stroke=\"#3b7dd8\" stroke-opacity=\"0.35\"");
    }
    out << "</g>\n";
  }
  if (spec.has(RenderLayer::kObstacles)) {
    out << "<g id=\"obstacles\">\n";
    for (const auto& o : s.obstacles) {
      out << polygon(v, o.corners(), "fill=\"#d9534f\" stroke=\"#7a1f1c\"");
    }
    out << "</g>\n";
  }
  if (spec.has(RenderLayer::kTrajectory)) {
    out << "<g id=\"trajectory\">\n";
    if (!s.trajectory.empty()) {
      out << "<polyline fill=\"none\" stroke=\"#222\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < s.trajectory.size(); ++i) {
        out << (i ? " " : "") << f3(v.sx(s.trajectory[i].x())) << ","
            << f3(v.sy(s.trajectory[i].y()));
      }
      out << "\"/>\n";
    }
    if (s.host) out << polygon(v, s.host->corners(), "fill=\"#4a90d9\" stroke=\"#1c3f66\"");
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string figure_filename(double t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "figure_t%.3f.svg", t);
  return buf;
}

namespace {

template <class T>
std::size_t nearest_index(const std::vector<T>& items, double t, double (*time_of)(const T&)) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (std::abs(time_of(items[i]) - t) < std::abs(time_of(items[best]) - t)) best = i;
  }
  return best;
}

double host_time(const HostSample& h) { return h.t; }
double sample_time(const ObstacleSample& s) { return s.t; }

std::vector<int> parse_id_list(const std::string& s) {
  std::vector<int> ids;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) ids.push_back(std::stoi(item));
  }
  return ids;
}

}  // namespace

std::vector<std::filesystem::path> render_directory(const std::filesystem::path& in,
                                                    const std::filesystem::path& out_dir,
                                                    const RenderSpec& spec) {
  validate(spec);
  const Manifest manifest = read_manifest(in);
  // Road and footprint sizes come from the echoed configuration.
  std::optional<RunConfig> config;
  const auto config_path = in / "effective_config.ini";
  if (spec.has(RenderLayer::kRoad) || std::filesystem::exists(config_path)) {
    const std::string text = read_text_file(config_path);
    config = to_run_config(load_config_text(text));
  }

  auto load = [&](const std::string& name) { return read_text_file(in / name); };
  std::vector<std::filesystem::path> written;

  if (manifest.kind == "plan") {
    const Trajectory traj = parse_trajectory_csv(load("trajectory.csv"), "trajectory.csv");
    std::vector<double> times = spec.snapshot_times;
    if (times.empty()) times.push_back(traj.times.front());
    std::vector<ConvexRegion> corridor;
    if (spec.has(RenderLayer::kCorridor)) {
      corridor = parse_corridor_text(load("corridor.txt"), "corridor.txt");
    }
    std::vector<ObstacleSample> obstacles;
    if (spec.has(RenderLayer::kObstacles)) {
      obstacles = parse_predictions_csv(load("obstacles.csv"), "obstacles.csv");
    }
    for (double t : times) {
      SceneData s;
      s.t = t;
      if (config) s.road = config->scenario.road;
      for (const auto& x : traj.states) s.trajectory.emplace_back(x(kX), x(kY));
      std::size_t k = 0;
      for (std::size_t i = 1; i < traj.times.size(); ++i) {
        if (std::abs(traj.times[i] - t) < std::abs(traj.times[k] - t)) k = i;
      }
      if (config) {
        s.host = footprint(VehicleState::from_vector(traj.states[k]), config->settings.vehicle.geometry);
      }
      s.corridor = corridor;
      s.highlighted_region = corridor.empty() ? -1 : static_cast<int>(std::min(k, corridor.size() - 1));
      if (!obstacles.empty()) {
        const double tk = traj.times[k];
        for (const auto& o : obstacles) {
          if (std::abs(o.t - tk) < 1e-9) s.obstacles.push_back(o.obstacle.footprint());
        }
      }
      if (spec.has(RenderLayer::kRisk)) {
        const std::string name = risk_grid_filename(t);
        s.risk = parse_risk_grid(load(name), name);
      }
      const auto path = out_dir / figure_filename(t);
      write_text_file(path, render_svg(s, spec));
      written.push_back(path);
    }
    return written;
  }

  if (manifest.kind != "simulation") {
    throw FormatError((in / "manifest.txt").string() + ": unknown kind '" + manifest.kind + "'");
  }
  const auto host = parse_host_csv(load("host.csv"), "host.csv");
  if (host.empty()) throw FormatError("host.csv: no samples");
  std::vector<std::vector<ObstacleSample>> tracks;
  if (spec.has(RenderLayer::kObstacles)) {
    const auto it = manifest.entries.find("obstacle_ids");
    if (it != manifest.entries.end()) {
      for (int id : parse_id_list(it->second)) {
        const std::string name = "obstacle_" + std::to_string(id) + ".csv";
        tracks.push_back(parse_obstacle_csv(load(name), id, name));
      }
    }
  }
  std::vector<double> cycle_times;
  if (spec.has(RenderLayer::kCorridor)) {
    const std::string text = load("solve_reports.csv");
    const auto lines = body_lines(text, "solve_reports.csv");
    for (std::size_t i = 1; i < lines.size(); ++i) {
      std::stringstream ss(lines[i]);
      std::string index;
      std::string t;
      std::getline(ss, index, ',');
      std::getline(ss, t, ',');
      cycle_times.push_back(parse_number_field(t, "solve_reports.csv"));
    }
  }
  std::vector<double> times = spec.snapshot_times;
  if (times.empty()) times.push_back(host.front().t);
  for (double t : times) {
    SceneData s;
    s.t = t;
    if (config) s.road = config->scenario.road;
    const std::size_t i = nearest_index(host, t, &host_time);
    for (const auto& h : host) s.trajectory.push_back(h.state.position());
    if (config) s.host = footprint(host[i].state, config->settings.vehicle.geometry);
    for (const auto& track : tracks) {
      if (!track.empty()) s.obstacles.push_back(track[nearest_index(track, t, &sample_time)].obstacle.footprint());
    }
    if (!cycle_times.empty()) {
      std::size_t c = 0;
      for (std::size_t j = 0; j < cycle_times.size(); ++j) {
        if (cycle_times[j] <= t + 1e-9) c = j;
      }
      const std::string name = cycle_corridor_filename(static_cast<int>(c));
      s.corridor = parse_corridor_text(load(name), name);
      s.highlighted_region = 0;
    }
    if (spec.has(RenderLayer::kRisk)) {
      const std::string name = risk_grid_filename(t);
      s.risk = parse_risk_grid(load(name), name);
    }
    const auto path = out_dir / figure_filename(t);
    write_text_file(path, render_svg(s, spec));
    written.push_back(path);
  }
  return written;
}

}  // namespace drf
