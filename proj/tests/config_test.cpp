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


#include <string>

#include <gtest/gtest.h>

#include "drf/config.hpp"
#include "drf/errors.hpp"

namespace drf {
namespace {

std::string message_of(const std::string& text) {
  try {
    to_run_config(load_config_text(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, MinimalFileGetsDefaults) {
  const RunConfig rc = to_run_config(load_config_text("[scenario]\ntype = lane_change\n"));
  EXPECT_EQ(rc.type, "lane_change");
  EXPECT_EQ(rc.settings.risk, RiskFieldParams{});
  EXPECT_EQ(rc.settings.vehicle, VehicleParams{});
  EXPECT_EQ(rc.settings.horizon, 30);
  EXPECT_EQ(rc.settings.plan_dt, 0.1);
  EXPECT_EQ(rc.scenario.plant_dt, 0.01);
  EXPECT_FALSE(rc.scenario.obstacles.empty());
}

TEST(Config, MissingTypeIsRejected) {
  EXPECT_THROW(load_config_text("[risk]\nA_s = 1\n"), ConfigError);
}

TEST(Config, NegativeSigmaNamesKey) {
  const std::string msg = message_of("[scenario]\ntype = lane_change\n[risk]\nsigma_x = -1\n");
  EXPECT_NE(msg.find("risk.sigma_x"), std::string::npos) << msg;
}

TEST(Config, UnknownKeyReportsLine) {
  try {
    parse_config("[scenario]\ntype = lane_change\n\n[risk]\nsigma_z = 2\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 5);
    EXPECT_NE(std::string(e.what()).find("sigma_z"), std::string::npos);
  }
}

TEST(Config, SyntaxErrors) {
  EXPECT_THROW(parse_config("[scenario\n"), ConfigError);
  EXPECT_THROW(parse_config("[nosuch]\n"), ConfigError);
  EXPECT_THROW(parse_config("[scenario]\ntype\n"), ConfigError);
  EXPECT_THROW(parse_config("[scenario]\ntype = a\ntype = b\n"), ConfigError);
  EXPECT_THROW(parse_config("[solver]\nhorizon = 2.5\n"), ConfigError);
  EXPECT_THROW(parse_config("[risk]\nA_s = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("schema=2\n"), ConfigError);
  EXPECT_NO_THROW(parse_config("schema=1\n# comment\n; other\n[risk]\nA_s = 2 # trailing\n"));
}

TEST(Config, BundledFilesLoad) {
  for (const char* name : {"lane_change_nominal", "roundabout_dual_lane", "lq_oracle"}) {
    EXPECT_NO_THROW(to_run_config(load_config(std::string(DRF_CONFIG_DIR) + "/" + name + ".ini")))
        << name;
  }
}

TEST(Config, PropertyRoundTrip) {
  for (const char* name : {"lane_change_nominal", "roundabout_dual_lane", "lq_oracle"}) {
    const ConfigDocument a = load_config(std::string(DRF_CONFIG_DIR) + "/" + name + ".ini");
    const std::string text = emit_config(a);
    const ConfigDocument b = load_config_text(text);
    EXPECT_EQ(a, b) << name;
    EXPECT_EQ(emit_config(b), text) << name;
    EXPECT_EQ(text.rfind("schema=1\n", 0), 0u);
  }
}

TEST(Config, ObstacleKeysAndOverrides) {
  const RunConfig rc = to_run_config(load_config_text(
      "[scenario]\ntype = lane_change\nobstacles = explicit\n"
      "obstacle4_motion = straight\nobstacle4_pose = 30, 3.5, 0, 7\n"));
  ASSERT_EQ(rc.scenario.obstacles.size(), 1u);
  EXPECT_EQ(rc.scenario.obstacles[0].id, 4);
  EXPECT_EQ(rc.scenario.obstacles[0].x, 30.0);
  EXPECT_EQ(rc.scenario.obstacles[0].v, 7.0);
  const RunConfig none =
      to_run_config(load_config_text("[scenario]\ntype = lane_change\nobstacles = none\n"));
  EXPECT_TRUE(none.scenario.obstacles.empty());
}

TEST(Config, OverlapIsInfeasibleSeed) {
  EXPECT_THROW(to_run_config(load_config_text(
                   "[scenario]\ntype = lane_change\nobstacles = explicit\n"
                   "obstacle1_motion = straight\nobstacle1_pose = 2, 0, 0, 10\n")),
               InfeasibleSeedError);
}

TEST(Config, RenderSpecValidation) {
  RenderSpec spec;
  EXPECT_THROW(validate(spec), ParameterError);
  spec.layers = {RenderLayer::kRoad};
  EXPECT_NO_THROW(validate(spec));
  spec.width_px = 0;
  EXPECT_THROW(validate(spec), ParameterError);
}

}  // namespace
}  // namespace drf
