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

#include "drf/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "drf/errors.hpp"
#include "drf/io.hpp"
#include "drf/render.hpp"
#include "drf/simulation.hpp"

namespace drf {

namespace {

// Resolved document and its typed view.
struct Loaded {
  ConfigDocument doc;
  RunConfig rc;
};

Loaded load_run(const CommandOptions& opt) {
  Loaded l;
  l.doc = load_with_overrides(opt);
  l.rc = to_run_config(l.doc);
  return l;
}

void echo_config(const Loaded& l, const CommandOptions& opt, std::ostream& out) {
  if (opt.dry_run) {
    out << emit_config(l.doc);
    return;
  }
  std::filesystem::create_directories(opt.out);
  write_text_file(opt.out / "effective_config.ini", emit_config(l.doc));
  out << "effective config: " << (opt.out / "effective_config.ini").string() << "\n";
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParameterError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasibleSeedError& e) {
    err << "infeasible seed: " << e.what() << "\n";
    return kExitInfeasibleSeed;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitNonConverged;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

void write_timing(const std::filesystem::path& dir, double wall_s) {
  write_text_file(dir / "timing.txt", "schema=1\n# wall time, not reproducible\nwall_ms=" +
                                          format_number(1000.0 * wall_s) + "\n");
}

Scenario scenario_for_run(const RunConfig& rc) {
  if (!rc.randomize) return rc.scenario;
  return perturb(rc.scenario, rc.randomization, rc.scenario.seed, rc.settings.vehicle.geometry,
                 rc.settings.growth.delta_safe);
}

}  // namespace

ConfigDocument load_with_overrides(const CommandOptions& opt) {
  ConfigDocument doc = parse_config(read_text_file(opt.config));
  if (opt.seed) doc.set("scenario", "seed", static_cast<double>(*opt.seed));
  if (opt.runs) doc.set("scenario", "runs", static_cast<double>(*opt.runs));
  return resolve_config(std::move(doc));
}

std::unique_ptr<Dynamics> make_dynamics(const RunConfig& rc) {
  const auto& st = rc.settings;
  if (rc.linear_dynamics()) {
    return std::make_unique<LinearDynamics>(
        linearized_bicycle(rc.scenario.host.v, st.vehicle, st.plan_dt));
  }
  return std::make_unique<BicycleDynamics>(st.vehicle, st.plan_dt);
}

int sweep_workers() {
  if (const char* env = std::getenv("PLANNER_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_plan(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const Loaded l = load_run(opt);
    echo_config(l, opt, out);
    if (opt.dry_run) return kExitOk;
    const RunConfig& rc = l.rc;
    const Scenario sc = scenario_for_run(rc);
    const auto dynamics = make_dynamics(rc);
    const PlanCycle cycle = build_cycle(sc, rc.settings, sc.host, sc.obstacles, 0.0, *dynamics);
    const PlanResult res = plan(cycle.problem, rc.settings.solver, cycle.initial_controls);

    write_text_file(opt.out / "trajectory.csv", trajectory_csv(res.trajectory));
    write_text_file(opt.out / "corridor.txt", corridor_text(cycle.problem.corridor));
    write_text_file(opt.out / "solve_report.txt", solve_report_text(res.report));
    write_text_file(opt.out / "obstacles.csv",
                    predictions_csv(cycle.predictions, 0.0, rc.settings.plan_dt));
    write_timing(opt.out, res.report.wall_time_s);
    KeyValues files = {{"trajectory", "trajectory.csv"}, {"corridor", "corridor.txt"},
                       {"solve_report", "solve_report.txt"}, {"obstacles", "obstacles.csv"},
                       {"config", "effective_config.ini"}, {"timing", "timing.txt"}};
    std::string grids;
    const int N = res.trajectory.horizon();
    for (double t : rc.render.snapshot_times) {
      const int k = std::clamp(static_cast<int>(std::lround(t / rc.settings.plan_dt)), 0, N);
      const VehicleState hk = VehicleState::from_vector(res.trajectory.states[k]);
      const RiskGrid g = risk_grid(view_bounds(sc.road, hk), rc.render.risk_resolution,
                                   cycle.predictions[k], cycle.problem.anchor, rc.settings.risk);
      write_text_file(opt.out / risk_grid_filename(t), risk_grid_text(g));
      grids += (grids.empty() ? "" : ",") + risk_grid_filename(t);
    }
    files["risk_grids"] = grids;
    write_manifest(opt.out, "plan", files);

    out << "status=" << res.report.status << " iterations=" << res.report.iterations
        << " cost=" << format_number(res.trajectory.total_cost) << "\n";
    if (!res.report.converged) {
      err << "plan did not converge (status " << res.report.status << ")\n";
      return kExitNonConverged;
    }
    return kExitOk;
  });
}

namespace {

int run_sweep(const Loaded& l, const CommandOptions& opt, std::ostream& out) {
  const RunConfig& rc = l.rc;
  const AggregateStats stats =
      monte_carlo(rc.scenario, rc.settings, rc.runs, rc.scenario.seed, rc.randomization,
                  sweep_workers());
  write_text_file(opt.out / "aggregate.txt", aggregate_text(stats));
  write_text_file(opt.out / "runs.csv", runs_csv(stats));
  write_manifest(opt.out, "sweep",
                 {{"aggregate", "aggregate.txt"}, {"runs", "runs.csv"},
                  {"config", "effective_config.ini"}});
  out << "runs=" << stats.runs << " collision_rate=" << format_number(stats.collision_rate)
      << " safe_distance_rate=" << format_number(stats.safe_distance_rate)
      << " min_distance_min=" << format_number(stats.min_distance_min) << "\n";
  return stats.collision_rate > 0.0 ? kExitCollision : kExitOk;
}

}  // namespace

int cmd_simulate(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const Loaded l = load_run(opt);
    echo_config(l, opt, out);
    if (opt.dry_run) return kExitOk;
    if (opt.runs) return run_sweep(l, opt, out);
    const RunConfig& rc = l.rc;
    const Scenario sc = scenario_for_run(rc);
    const SimulationLog log = run_closed_loop(sc, rc.settings);
    const MetricsReport m = compute_metrics(log, sc, rc.settings);
    write_simulation_log(opt.out, log, m);
    for (double t : rc.render.snapshot_times) {
      std::size_t i = 0;
      for (std::size_t j = 1; j < log.size(); ++j) {
        if (std::abs(log.times[j] - t) < std::abs(log.times[i] - t)) i = j;
      }
      const RiskGrid g = risk_grid(view_bounds(sc.road, log.host[i]), rc.render.risk_resolution,
                                   log.obstacles[i], RiskAnchor::from_state(log.host[i]),
                                   rc.settings.risk);
      write_text_file(opt.out / risk_grid_filename(t), risk_grid_text(g));
    }
    out << "min_distance=" << format_number(m.min_distance)
        << " collision=" << (m.collision ? "true" : "false")
        << " lane_change_completed=" << (m.lane_change_completed ? "true" : "false")
        << " T=" << format_number(m.lane_change_time) << " D=" << format_number(m.lane_change_distance)
        << "\n";
    if (m.collision) {
      err << "collision: first contact at t=" << format_number(m.first_contact_time) << " s\n";
      return kExitCollision;
    }
    return kExitOk;
  });
}

int cmd_render(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const Loaded l = load_run(opt);
    if (opt.dry_run) {
      out << emit_config(l.doc);
      return kExitOk;
    }
    const std::filesystem::path input =
        l.rc.render_input.empty() ? opt.out : std::filesystem::path(l.rc.render_input);
    const auto files = render_directory(input, opt.out, l.rc.render);
    for (const auto& f : files) out << f.string() << "\n";
    return kExitOk;
  });
}

int cmd_sweep(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const Loaded l = load_run(opt);
    echo_config(l, opt, out);
    if (opt.dry_run) return kExitOk;
    return run_sweep(l, opt, out);
  });
}

}  // namespace drf
