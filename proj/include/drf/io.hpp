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

#ifndef DRF_IO_HPP_
#define DRF_IO_HPP_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "drf/planner.hpp"
#include "drf/risk_field.hpp"
#include "drf/simulation.hpp"

namespace drf {

// Every file written here starts with the line "schema=1". Numbers use the
// shortest representation that parses back to the same double.

std::string format_number(double v);
double parse_number_field(const std::string& text, const std::string& where);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Lines after the schema header; throws FormatError naming `where` when the
/// header is missing or wrong.
std::vector<std::string> body_lines(const std::string& text, const std::string& where);

using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(const std::string& text, const std::string& where);

/// One row per knot; the controls of the last row are zero.
std::string trajectory_csv(const Trajectory& traj);
Trajectory parse_trajectory_csv(const std::string& text, const std::string& where = "trajectory");

/// `k t x_lower x_upper y_lower y_upper` per region.
std::string corridor_text(std::span<const ConvexRegion> corridor);
std::vector<ConvexRegion> parse_corridor_text(const std::string& text,
                                              const std::string& where = "corridor");

/// Wall time is left out; see timing_text.
std::string solve_report_text(const SolveReport& report);
SolveReport parse_solve_report(const std::string& text, const std::string& where = "solve_report");

/// Header `# risk_grid xmin xmax ymin ymax nx ny`, then one row of nx values
/// per grid line y_min + j * resolution, j ascending. The resolution sits
/// on a second comment line.
std::string risk_grid_text(const RiskGrid& grid);
RiskGrid parse_risk_grid(const std::string& text, const std::string& where = "risk_grid");
std::string risk_grid_filename(double t);

std::string metrics_text(const MetricsReport& m);
MetricsReport parse_metrics(const std::string& text, const std::string& where = "metrics");

/// Predicted obstacles per step: `k,t,id,x,y,theta,v,length,width`.
std::string predictions_csv(const std::vector<std::vector<ObstacleVehicle>>& predictions,
                            double t0, double dt);

struct ObstacleSample {
  double t = 0.0;
  ObstacleVehicle obstacle;
};
std::vector<ObstacleSample> parse_predictions_csv(const std::string& text,
                                                  const std::string& where = "obstacles");

/// Host log `t,x,y,v,theta,phi,phi_dot,a,phi_ddot`.
struct HostSample {
  double t = 0.0;
  VehicleState state;
  ControlInput control;
};
std::vector<HostSample> parse_host_csv(const std::string& text, const std::string& where = "host");

/// Obstacle log `t,x,y,theta,v,length,width` (one file per obstacle).
std::vector<ObstacleSample> parse_obstacle_csv(const std::string& text, int id,
                                               const std::string& where = "obstacle");

std::string cycle_corridor_filename(int index);

/// Files of a closed-loop run. wall times go to timing.txt only, so all
/// other files are reproducible byte for byte.
void write_simulation_log(const std::filesystem::path& dir, const SimulationLog& log,
                          const MetricsReport& metrics);

struct Manifest {
  std::string kind;  // plan | simulation
  KeyValues entries;
};
Manifest read_manifest(const std::filesystem::path& dir);
void write_manifest(const std::filesystem::path& dir, const std::string& kind,
                    const KeyValues& entries);

/// Per-run rows plus summary statistics.
std::string aggregate_text(const AggregateStats& stats);
std::string runs_csv(const AggregateStats& stats);
/// Number of data rows in a runs file.
int count_run_rows(const std::string& text, const std::string& where = "runs");

}  // namespace drf

#endif  // DRF_IO_HPP_
