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


#include <filesystem>
#include <regex>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "drf/commands.hpp"
#include "drf/io.hpp"
#include "drf/render.hpp"

namespace drf {
namespace {

namespace fs = std::filesystem;

class Commands : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / (std::string("drf_cmd_") + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = root_ / name;
    write_text_file(p, text);
    return p;
  }

  CommandOptions opts(const fs::path& config, const std::string& out) {
    CommandOptions o;
    o.config = config;
    o.out = root_ / out;
    return o;
  }

  fs::path root_;
  std::ostringstream out_, err_;
};

const char* kNominal = DRF_CONFIG_DIR "/lane_change_nominal.ini";

std::string short_lane_change(double duration) {
  return "[scenario]\ntype = lane_change\nduration = " + std::to_string(duration) +
         "\nhost_pose = 0, 0, 0, 10\nobstacles = explicit\n"
         "obstacle1_motion = straight\nobstacle1_pose = 25, 0, 0, 6\n"
         "[growth]\ngamma_0 = 25\nlambda = 0.3\n";
}

TEST_F(Commands, PlanWritesOutputs) {
  const CommandOptions o = opts(kNominal, "plan");
  ASSERT_EQ(cmd_plan(o, out_, err_), kExitOk) << err_.str();
  for (const char* f : {"trajectory.csv", "corridor.txt", "solve_report.txt", "effective_config.ini"}) {
    ASSERT_TRUE(fs::exists(o.out / f)) << f;
    EXPECT_EQ(read_text_file(o.out / f).rfind("schema=1\n", 0), 0u) << f;
  }
  const Trajectory t = parse_trajectory_csv(read_text_file(o.out / "trajectory.csv"));
  EXPECT_EQ(t.horizon(), 30);
  EXPECT_EQ(parse_corridor_text(read_text_file(o.out / "corridor.txt")).size(), 31u);
  EXPECT_TRUE(parse_solve_report(read_text_file(o.out / "solve_report.txt")).converged);
  EXPECT_EQ(read_manifest(o.out).kind, "plan");
}

TEST_F(Commands, PlanOverlapIsInfeasible) {
  const fs::path c = write_config(
      "overlap.ini",
      "[scenario]\ntype = lane_change\nobstacles = explicit\n"
      "obstacle1_motion = straight\nobstacle1_pose = 1, 0.2, 0, 10\n");
  EXPECT_EQ(cmd_plan(opts(c, "plan"), out_, err_), kExitInfeasibleSeed);
  EXPECT_NE(err_.str().find("infeasible"), std::string::npos);
}

TEST_F(Commands, DryRunEchoesOnly) {
  const CommandOptions base = opts(kNominal, "dry");
  CommandOptions o = base;
  o.dry_run = true;
  EXPECT_EQ(cmd_plan(o, out_, err_), kExitOk);
  EXPECT_FALSE(fs::exists(o.out));
  EXPECT_EQ(out_.str(), emit_config(load_with_overrides(base)));
}

TEST_F(Commands, ConfigErrorExitCode) {
  const fs::path c = write_config("bad.ini", "[scenario]\ntype = lane_change\n[risk]\nsigma_x = -1\n");
  EXPECT_EQ(cmd_plan(opts(c, "x"), out_, err_), kExitConfig);
  EXPECT_NE(err_.str().find("risk.sigma_x"), std::string::npos);
  CommandOptions missing = opts(root_ / "nope.ini", "x");
  EXPECT_EQ(cmd_simulate(missing, out_, err_), kExitConfig);
}

TEST_F(Commands, SimulateEmptyRoad) {
  const fs::path c = write_config(
      "keep.ini", "[scenario]\ntype = lane_keep\nduration = 2\nobstacles = none\n"
      "[growth]\ngamma_0 = 25\nlambda = 0.3\n");
  const CommandOptions o = opts(c, "sim");
  ASSERT_EQ(cmd_simulate(o, out_, err_), kExitOk) << err_.str();
  const MetricsReport m = parse_metrics(read_text_file(o.out / "metrics.txt"));
  EXPECT_FALSE(m.lane_change_completed);
  EXPECT_FALSE(m.collision);
}

TEST_F(Commands, SimulateNominalReportsLaneChange) {
  const CommandOptions o = opts(kNominal, "sim");
  ASSERT_EQ(cmd_simulate(o, out_, err_), kExitOk) << err_.str();
  const std::string text = read_text_file(o.out / "metrics.txt");
  EXPECT_NE(text.find("lane_change_distance="), std::string::npos);
  EXPECT_NE(text.find("lane_change_time="), std::string::npos);
  const MetricsReport m = parse_metrics(text);
  EXPECT_TRUE(m.lane_change_completed);
  EXPECT_TRUE(std::isfinite(m.lane_change_time));
  EXPECT_EQ(read_manifest(o.out).kind, "simulation");
}

TEST_F(Commands, SweepRowCount) {
  const fs::path c = write_config("short.ini", short_lane_change(0.3));
  CommandOptions o = opts(c, "sweep");
  o.runs = 100;
  o.seed = 5;
  ASSERT_EQ(cmd_simulate(o, out_, err_), kExitOk) << err_.str();
  EXPECT_EQ(count_run_rows(read_text_file(o.out / "runs.csv")), 100);
  EXPECT_TRUE(fs::exists(o.out / "aggregate.txt"));
  const std::string echoed = read_text_file(o.out / "effective_config.ini");
  EXPECT_NE(echoed.find("runs = 100"), std::string::npos) << echoed;
}

TEST_F(Commands, ReRunningEchoedConfigReproduces) {
  const CommandOptions a = opts(kNominal, "a");
  ASSERT_EQ(cmd_plan(a, out_, err_), kExitOk);
  const CommandOptions b = opts(a.out / "effective_config.ini", "b");
  ASSERT_EQ(cmd_plan(b, out_, err_), kExitOk);
  for (const char* f : {"trajectory.csv", "corridor.txt", "solve_report.txt", "effective_config.ini"}) {
    EXPECT_EQ(read_text_file(a.out / f), read_text_file(b.out / f)) << f;
  }
}

TEST_F(Commands, RenderLayerGroups) {
  const CommandOptions p = opts(kNominal, "plan");
  ASSERT_EQ(cmd_plan(p, out_, err_), kExitOk);
  const fs::path c = write_config(
      "render.ini", "[scenario]\ntype = lane_change\n[output]\nsnapshot_times = 1.5\nrender_input = " +
                        p.out.string() + "\n");
  const CommandOptions r = opts(c, "fig");
  ASSERT_EQ(cmd_render(r, out_, err_), kExitOk) << err_.str();
  const std::string svg = read_text_file(r.out / figure_filename(1.5));
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  for (const char* g : {"road", "risk", "corridor", "obstacles", "trajectory"}) {
    EXPECT_NE(svg.find(std::string("<g id=\"") + g + "\""), std::string::npos) << g;
  }
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST_F(Commands, RenderTrajectoryOnly) {
  const CommandOptions p = opts(kNominal, "plan");
  ASSERT_EQ(cmd_plan(p, out_, err_), kExitOk);
  const fs::path c = write_config("render.ini", "[scenario]\ntype = lane_change\n[output]\nlayers = trajectory\n"
                                                "render_input = " + p.out.string() + "\n");
  const CommandOptions r = opts(c, "fig");
  ASSERT_EQ(cmd_render(r, out_, err_), kExitOk) << err_.str();
  const std::string svg = read_text_file(r.out / figure_filename(0.0));
  EXPECT_NE(svg.find("<g id=\"trajectory\""), std::string::npos);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_EQ(svg.find("<g id=\"risk\""), std::string::npos);
}

TEST_F(Commands, RenderMissingRiskGridNamesFile) {
  const CommandOptions p = opts(kNominal, "plan");
  ASSERT_EQ(cmd_plan(p, out_, err_), kExitOk);
  const fs::path c = write_config(
      "render.ini", "[scenario]\ntype = lane_change\n[output]\nlayers = risk\nsnapshot_times = 0.7\n"
                    "render_input = " + p.out.string() + "\n");
  EXPECT_EQ(cmd_render(opts(c, "fig"), out_, err_), kExitConfig);
  EXPECT_NE(err_.str().find(risk_grid_filename(0.7)), std::string::npos) << err_.str();
}

TEST_F(Commands, RenderEmptyLayersRejected) {
  const fs::path c = write_config("render.ini", "[scenario]\ntype = lane_change\n[output]\nlayers = \n");
  EXPECT_EQ(cmd_render(opts(c, "fig"), out_, err_), kExitConfig);
  EXPECT_NE(err_.str().find("output.layers"), std::string::npos) << err_.str();
}

}  // namespace
}  // namespace drf
