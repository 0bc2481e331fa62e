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

#ifndef DRF_RENDER_HPP_
#define DRF_RENDER_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "drf/config.hpp"
#include "drf/risk_field.hpp"

namespace drf {

/// Everything drawn in one figure. Empty members are simply not drawn.
struct SceneData {
  double t = 0.0;
  std::optional<RoadGeometry> road;
  std::vector<Vec2> trajectory;
  std::optional<OrientedBox> host;
  std::vector<ConvexRegion> corridor;
  int highlighted_region = -1;
  std::vector<OrientedBox> obstacles;
  std::optional<RiskGrid> risk;
};

/// Window shown for a scenario around the host at one instant; also used as
/// the extent of exported risk grids.
GridBounds view_bounds(const RoadGeometry& road, const VehicleState& host);

/// One SVG document with a <g id="..."> group per enabled layer.
std::string render_svg(const SceneData& scene, const RenderSpec& spec);

std::string figure_filename(double t);

/// Reads a plan or simulation output directory and writes one figure per
/// snapshot time (the start time when none is given) into `out_dir`.
/// Throws FormatError naming the first missing file a requested layer needs.
std::vector<std::filesystem::path> render_directory(const std::filesystem::path& input_dir,
                                                    const std::filesystem::path& out_dir,
                                                    const RenderSpec& spec);

}  // namespace drf

#endif  // DRF_RENDER_HPP_
