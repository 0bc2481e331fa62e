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

#include "drf/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "drf/errors.hpp"

namespace drf {

namespace {

constexpr const char* kSchema = "schema=1";
constexpr const char* kTrajectoryHeader =
    "t,x,y,v,theta,phi,phi_dot,a,phi_ddot,stage_cost,region_id";
constexpr const char* kHostHeader = "t,x,y,v,theta,phi,phi_dot,a,phi_ddot";
constexpr const char* kObstacleHeader = "t,x,y,theta,v,length,width";
constexpr const char* kPredictionHeader = "k,t,id,x,y,theta,v,length,width";
constexpr const char* kCycleHeader =
    "index,t,status,flag,iterations,final_cost,max_corridor_violation,a,phi_ddot";
constexpr const char* kRunsHeader =
    "seed,collision,near_miss,min_distance,avg_distance,min_clearance,ttc_min,"
    "lane_change_completed,lane_change_time,lane_change_distance,max_road_excursion";

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (in >> item) out.push_back(item);
  return out;
}

std::vector<double> numeric_row(const std::vector<std::string>& fields, const std::string& where) {
  std::vector<double> v;
  v.reserve(fields.size());
  for (const auto& f : fields) v.push_back(parse_number_field(f, where));
  return v;
}

// Data rows of a CSV body whose first line must equal `header`.
std::vector<std::vector<double>> csv_rows(const std::string& text, const std::string& header,
                                          const std::string& where) {
  const auto lines = body_lines(text, where);
  if (lines.empty() || lines.front() != header) {
    throw FormatError(where + ": expected header '" + header + "'");
  }
  const std::size_t cols = split(header, ',').size();
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != cols) {
      throw FormatError(where + ": row " + std::to_string(i) + " has " + std::to_string(f.size()) +
                        " fields, expected " + std::to_string(cols));
    }
    rows.push_back(numeric_row(f, where));
  }
  return rows;
}

std::string join(const std::vector<double>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += format_number(v[i]);
  }
  return out;
}

const std::string& require(const KeyValues& kv, const std::string& key, const std::string& where) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw FormatError(where + ": missing key '" + key + "'");
  return it->second;
}

double require_number(const KeyValues& kv, const std::string& key, const std::string& where) {
  return parse_number_field(require(kv, key, where), where + "." + key);
}

bool require_bool(const KeyValues& kv, const std::string& key, const std::string& where) {
  const std::string& v = require(kv, key, where);
  if (v == "true") return true;
  if (v == "false") return false;
  throw FormatError(where + "." + key + ": expected true or false");
}

const char* boolean(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_number_field(const std::string& text, const std::string& where) {
  std::size_t b = text.find_first_not_of(" \t\r");
  std::size_t e = text.find_last_not_of(" \t\r");
  if (b == std::string::npos) throw FormatError(where + ": empty number");
  const std::string t = text.substr(b, e - b + 1);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw FormatError(where + ": bad number '" + t + "'");
  return v;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("missing file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("write failed for " + path.string());
}

std::vector<std::string> body_lines(const std::string& text, const std::string& where) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      if (line != kSchema) throw FormatError(where + ": missing '" + kSchema + "' header");
      first = false;
      continue;
    }
    if (!line.empty()) lines.push_back(line);
  }
  if (first) throw FormatError(where + ": empty file");
  return lines;
}

KeyValues parse_key_values(const std::string& text, const std::string& where) {
  KeyValues kv;
  for (const auto& line : body_lines(text, where)) {
    if (line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(where + ": expected key=value, got '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << kSchema << "\n" << kTrajectoryHeader << "\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const StateVector& x = traj.states[k];
    const ControlVector u =
        k < traj.controls.size() ? traj.controls[k] : ControlVector::Zero().eval();
    std::vector<double> row = {traj.times[k], x(0), x(1), x(2), x(3), x(4), x(5), u(0), u(1),
                               traj.stage_costs[k]};
    out << join(row, ",") << "," << traj.region_ids[k] << "\n";
  }
  return out.str();
}

Trajectory parse_trajectory_csv(const std::string& text, const std::string& where) {
  Trajectory traj;
  const auto rows = csv_rows(text, kTrajectoryHeader, where);
  if (rows.empty()) throw FormatError(where + ": no rows");
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    traj.times.push_back(r[0]);
    StateVector x;
    x << r[1], r[2], r[3], r[4], r[5], r[6];
    traj.states.push_back(x);
    if (k + 1 < rows.size()) traj.controls.push_back(ControlVector(r[7], r[8]));
    traj.stage_costs.push_back(r[9]);
    traj.region_ids.push_back(static_cast<int>(r[10]));
    traj.total_cost += r[9];
  }
  return traj;
}

std::string corridor_text(std::span<const ConvexRegion> corridor) {
  std::ostringstream out;
  out << kSchema << "\n# k t x_lower x_upper y_lower y_upper\n";
  for (std::size_t k = 0; k < corridor.size(); ++k) {
    const auto& r = corridor[k];
    out << k << " " << join({r.t, r.x_lower, r.x_upper, r.y_lower, r.y_upper}, " ") << "\n";
  }
  return out.str();
}

std::vector<ConvexRegion> parse_corridor_text(const std::string& text, const std::string& where) {
  std::vector<ConvexRegion> out;
  for (const auto& line : body_lines(text, where)) {
    if (line.front() == '#') continue;
    const auto f = split_ws(line);
    if (f.size() != 6) throw FormatError(where + ": expected 6 fields per line");
    const auto v = numeric_row(f, where);
    if (static_cast<std::size_t>(v[0]) != out.size()) {
      throw FormatError(where + ": step indices must run 0, 1, 2, ...");
    }
    ConvexRegion r;
    r.t = v[1];
    r.x_lower = v[2];
    r.x_upper = v[3];
    r.y_lower = v[4];
    r.y_upper = v[5];
    out.push_back(r);
  }
  return out;
}

std::string solve_report_text(const SolveReport& r) {
  std::ostringstream out;
  out << kSchema << "\n";
  out << "status=" << r.status << "\n";
  out << "converged=" << boolean(r.converged) << "\n";
  out << "iterations=" << r.iterations << "\n";
  out << "cost_curve=" << join(r.cost_curve, ",") << "\n";
  out << "final_cost=" << format_number(r.cost_curve.empty() ? 0.0 : r.cost_curve.back()) << "\n";
  out << "max_corridor_violation=" << format_number(r.max_corridor_violation) << "\n";
  out << "final_max_qu=" << format_number(r.final_max_qu) << "\n";
  return out.str();
}

SolveReport parse_solve_report(const std::string& text, const std::string& where) {
  const KeyValues kv = parse_key_values(text, where);
  SolveReport r;
  r.status = require(kv, "status", where);
  r.converged = require_bool(kv, "converged", where);
  r.iterations = static_cast<int>(require_number(kv, "iterations", where));
  const std::string& curve = require(kv, "cost_curve", where);
  if (!curve.empty()) r.cost_curve = numeric_row(split(curve, ','), where + ".cost_curve");
  r.max_corridor_violation = require_number(kv, "max_corridor_violation", where);
  r.final_max_qu = require_number(kv, "final_max_qu", where);
  return r;
}

std::string risk_grid_text(const RiskGrid& g) {
  std::ostringstream out;
  out << kSchema << "\n";
  out << "# risk_grid " << join({g.bounds.x_min, g.bounds.x_max, g.bounds.y_min, g.bounds.y_max}, " ")
      << " " << g.nx << " " << g.ny << "\n";
  out << "# resolution " << format_number(g.resolution)
      << "; row j holds y = ymin + j * resolution, x = xmin + i * resolution ascending\n";
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) out << (i ? " " : "") << format_number(g.at(i, j));
    out << "\n";
  }
  return out.str();
}

RiskGrid parse_risk_grid(const std::string& text, const std::string& where) {
  const auto lines = body_lines(text, where);
  if (lines.empty()) throw FormatError(where + ": missing risk_grid header");
  const auto h = split_ws(lines.front());
  if (h.size() != 8 || h[0] != "#" || h[1] != "risk_grid") {
    throw FormatError(where + ": expected '# risk_grid xmin xmax ymin ymax nx ny'");
  }
  RiskGrid g;
  g.bounds = {parse_number_field(h[2], where), parse_number_field(h[3], where),
              parse_number_field(h[4], where), parse_number_field(h[5], where)};
  g.nx = static_cast<int>(parse_number_field(h[6], where));
  g.ny = static_cast<int>(parse_number_field(h[7], where));
  if (g.nx < 1 || g.ny < 1) throw FormatError(where + ": grid size must be positive");
  g.resolution = 1.0;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    if (lines[l].front() == '#') {
      const auto c = split_ws(lines[l]);
      if (c.size() >= 3 && c[1] == "resolution") {
        std::string r = c[2];
        if (!r.empty() && r.back() == ';') r.pop_back();
        g.resolution = parse_number_field(r, where);
      }
      continue;
    }
    for (const auto& f : split_ws(lines[l])) g.values.push_back(parse_number_field(f, where));
  }
  if (g.values.size() != static_cast<std::size_t>(g.nx) * g.ny) {
    throw FormatError(where + ": expected nx*ny values");
  }
  return g;
}

std::string risk_grid_filename(double t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "risk_grid_t%.3f.txt", t);
  return buf;
}

std::string metrics_text(const MetricsReport& m) {
  std::ostringstream out;
  out << kSchema << "\n";
  auto num = [&](const char* k, double v) { out << k << "=" << format_number(v) << "\n"; };
  auto flag = [&](const char* k, bool v) { out << k << "=" << boolean(v) << "\n"; };
  num("min_distance", m.min_distance);
  num("avg_distance", m.avg_distance);
  num("min_clearance", m.min_clearance);
  flag("collision", m.collision);
  num("first_contact_time", m.first_contact_time);
  flag("near_miss", m.near_miss);
  num("ttc_min", m.ttc_min);
  num("max_lateral_accel", m.max_lateral_accel);
  num("avg_jerk", m.avg_jerk);
  num("curvature_smoothness", m.curvature_smoothness);
  flag("lane_change_completed", m.lane_change_completed);
  num("lane_change_start", m.lane_change_start);
  num("lane_change_distance", m.lane_change_distance);
  num("lane_change_time", m.lane_change_time);
  num("path_length", m.path_length);
  num("max_road_excursion", m.max_road_excursion);
  out << "cycles=" << m.cycles << "\n";
  out << "nonconverged_cycles=" << m.nonconverged_cycles << "\n";
  out << "fallback_cycles=" << m.fallback_cycles << "\n";
  return out.str();
}

MetricsReport parse_metrics(const std::string& text, const std::string& where) {
  const KeyValues kv = parse_key_values(text, where);
  MetricsReport m;
  m.min_distance = require_number(kv, "min_distance", where);
  m.avg_distance = require_number(kv, "avg_distance", where);
  m.min_clearance = require_number(kv, "min_clearance", where);
  m.collision = require_bool(kv, "collision", where);
  m.first_contact_time = require_number(kv, "first_contact_time", where);
  m.near_miss = require_bool(kv, "near_miss", where);
  m.ttc_min = require_number(kv, "ttc_min", where);
  m.max_lateral_accel = require_number(kv, "max_lateral_accel", where);
  m.avg_jerk = require_number(kv, "avg_jerk", where);
  m.curvature_smoothness = require_number(kv, "curvature_smoothness", where);
  m.lane_change_completed = require_bool(kv, "lane_change_completed", where);
  m.lane_change_start = require_number(kv, "lane_change_start", where);
  m.lane_change_distance = require_number(kv, "lane_change_distance", where);
  m.lane_change_time = require_number(kv, "lane_change_time", where);
  m.path_length = require_number(kv, "path_length", where);
  m.max_road_excursion = require_number(kv, "max_road_excursion", where);
  m.cycles = static_cast<int>(require_number(kv, "cycles", where));
  m.nonconverged_cycles = static_cast<int>(require_number(kv, "nonconverged_cycles", where));
  m.fallback_cycles = static_cast<int>(require_number(kv, "fallback_cycles", where));
  return m;
}

std::string predictions_csv(const std::vector<std::vector<ObstacleVehicle>>& predictions,
                            double t0, double dt) {
  std::ostringstream out;
  out << kSchema << "\n" << kPredictionHeader << "\n";
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    for (const auto& o : predictions[k]) {
      out << k << "," << format_number(t0 + static_cast<double>(k) * dt) << "," << o.id << ","
          << join({o.x, o.y, o.theta, o.v, o.body_length, o.body_width}, ",") << "\n";
    }
  }
  return out.str();
}

std::vector<ObstacleSample> parse_predictions_csv(const std::string& text,
                                                  const std::string& where) {
  std::vector<ObstacleSample> out;
  for (const auto& r : csv_rows(text, kPredictionHeader, where)) {
    ObstacleSample s;
    s.t = r[1];
    s.obstacle.id = static_cast<int>(r[2]);
    s.obstacle.x = r[3];
    s.obstacle.y = r[4];
    s.obstacle.theta = r[5];
    s.obstacle.v = r[6];
    s.obstacle.body_length = r[7];
    s.obstacle.body_width = r[8];
    out.push_back(s);
  }
  return out;
}

std::vector<HostSample> parse_host_csv(const std::string& text, const std::string& where) {
  std::vector<HostSample> out;
  for (const auto& r : csv_rows(text, kHostHeader, where)) {
    out.push_back({r[0], VehicleState{r[1], r[2], r[3], r[4], r[5], r[6]}, ControlInput{r[7], r[8]}});
  }
  return out;
}

std::vector<ObstacleSample> parse_obstacle_csv(const std::string& text, int id,
                                               const std::string& where) {
  std::vector<ObstacleSample> out;
  for (const auto& r : csv_rows(text, kObstacleHeader, where)) {
    ObstacleSample s;
    s.t = r[0];
    s.obstacle.id = id;
    s.obstacle.x = r[1];
    s.obstacle.y = r[2];
    s.obstacle.theta = r[3];
    s.obstacle.v = r[4];
    s.obstacle.body_length = r[5];
    s.obstacle.body_width = r[6];
    out.push_back(s);
  }
  return out;
}

std::string cycle_corridor_filename(int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "corridors/cycle_%05d.txt", index);
  return buf;
}

void write_manifest(const std::filesystem::path& dir, const std::string& kind,
                    const KeyValues& entries) {
  std::ostringstream out;
  out << kSchema << "\nkind=" << kind << "\n";
  for (const auto& [k, v] : entries) out << k << "=" << v << "\n";
  write_text_file(dir / "manifest.txt", out.str());
}

Manifest read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / "manifest.txt";
  KeyValues kv = parse_key_values(read_text_file(path), path.string());
  Manifest m;
  m.kind = require(kv, "kind", path.string());
  kv.erase("kind");
  m.entries = std::move(kv);
  return m;
}

void write_simulation_log(const std::filesystem::path& dir, const SimulationLog& log,
                          const MetricsReport& metrics) {
  std::filesystem::create_directories(dir);
  {
    std::ostringstream out;
    out << kSchema << "\n" << kHostHeader << "\n";
    for (std::size_t i = 0; i < log.size(); ++i) {
      const auto& s = log.host[i];
      const auto& u = log.controls[i];
      out << join({log.times[i], s.x, s.y, s.v, s.theta, s.phi, s.phi_dot, u.a, u.phi_ddot}, ",")
          << "\n";
    }
    write_text_file(dir / "host.csv", out.str());
  }
  // One file per obstacle id, in order of first appearance.
  std::vector<int> ids;
  if (!log.obstacles.empty()) {
    for (const auto& o : log.obstacles.front()) ids.push_back(o.id);
  }
  std::string id_list;
  for (int id : ids) {
    std::ostringstream out;
    out << kSchema << "\n" << kObstacleHeader << "\n";
    for (std::size_t i = 0; i < log.size(); ++i) {
      for (const auto& o : log.obstacles[i]) {
        if (o.id != id) continue;
        out << join({log.times[i], o.x, o.y, o.theta, o.v, o.body_length, o.body_width}, ",")
            << "\n";
      }
    }
    write_text_file(dir / ("obstacle_" + std::to_string(id) + ".csv"), out.str());
    id_list += (id_list.empty() ? "" : ",") + std::to_string(id);
  }
  std::ostringstream cycles;
  std::ostringstream timing;
  cycles << kSchema << "\n" << kCycleHeader << "\n";
  timing << kSchema << "\n# wall time per planning cycle, not reproducible\nindex,wall_ms\n";
  for (const auto& c : log.cycles) {
    cycles << c.index << "," << format_number(c.t) << "," << c.report.status << "," << c.flag
           << "," << c.report.iterations << ","
           << format_number(c.report.cost_curve.empty() ? 0.0 : c.report.cost_curve.back()) << ","
           << format_number(c.report.max_corridor_violation) << "," << format_number(c.applied.a)
           << "," << format_number(c.applied.phi_ddot) << "\n";
    timing << c.index << "," << format_number(1000.0 * c.report.wall_time_s) << "\n";
    write_text_file(dir / cycle_corridor_filename(c.index), corridor_text(c.corridor));
  }
  write_text_file(dir / "solve_reports.csv", cycles.str());
  write_text_file(dir / "timing.txt", timing.str());
  write_text_file(dir / "metrics.txt", metrics_text(metrics));
  write_manifest(dir, "simulation",
                 {{"host", "host.csv"},
                  {"obstacle_ids", id_list},
                  {"cycles", std::to_string(log.cycles.size())},
                  {"corridors", "corridors"},
                  {"solve_reports", "solve_reports.csv"},
                  {"metrics", "metrics.txt"},
                  {"timing", "timing.txt"},
                  {"plant_dt", format_number(log.plant_dt)}});
}

std::string aggregate_text(const AggregateStats& s) {
  std::ostringstream out;
  out << kSchema << "\n";
  out << "runs=" << s.runs << "\n";
  out << "collision_rate=" << format_number(s.collision_rate) << "\n";
  out << "near_miss_rate=" << format_number(s.near_miss_rate) << "\n";
  out << "lane_change_rate=" << format_number(s.lane_change_rate) << "\n";
  out << "safe_distance_rate=" << format_number(s.safe_distance_rate) << "\n";
  out << "min_distance_min=" << format_number(s.min_distance_min) << "\n";
  out << "min_distance_mean=" << format_number(s.min_distance_mean) << "\n";
  out << "avg_distance_mean=" << format_number(s.avg_distance_mean) << "\n";
  return out.str();
}

std::string runs_csv(const AggregateStats& s) {
  std::ostringstream out;
  out << kSchema << "\n" << kRunsHeader << "\n";
  for (const auto& r : s.per_run) {
    const auto& m = r.metrics;
    out << r.seed << "," << (m.collision ? 1 : 0) << "," << (m.near_miss ? 1 : 0) << ","
        << join({m.min_distance, m.avg_distance, m.min_clearance, m.ttc_min}, ",") << ","
        << (m.lane_change_completed ? 1 : 0) << ","
        << join({m.lane_change_time, m.lane_change_distance, m.max_road_excursion}, ",") << "\n";
  }
  return out.str();
}

int count_run_rows(const std::string& text, const std::string& where) {
  return static_cast<int>(csv_rows(text, kRunsHeader, where).size());
}

}  // namespace drf
